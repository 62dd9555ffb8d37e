#pragma once

/**
 * @file tower.hpp
 * @brief Stabilizer dimensions along the frame-bundle tower at random
 *        frames, with JSON and CSV reports.
 *
 * Sample k uses the seed splitmix64(seed + k), so results do not depend on
 * thread scheduling.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "jetprolong/errors.hpp"
#include "jetprolong/frame_bundle.hpp"
#include "jetprolong/infinitesimal.hpp"
#include "jetprolong/rank.hpp"

namespace jetprolong {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) { return splitmix64(seed + index); }

/// Half-width of the uniform distribution for higher frame coefficients.
inline constexpr double kFrameSpread = 0.5;

struct ScanOptions {
  double tol = kDefaultRankTolerance;
  /// Samples stay at least this far from every exclusion hyperplane.
  double margin = 0.05;
  bool first_order = true;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Drawn base points are replaced by these when set (cycled).
  std::vector<std::vector<double>> fixed_points;
};

/// Frame of order `order` over `p`: identity linear part, uniform higher coefficients.
inline FramePoint random_frame(std::span<const double> p, int order, std::mt19937_64& rng) {
  auto poly = PolyMap<double>::identity(static_cast<int>(p.size()), order, std::vector<double>(p.size(), 0.0));
  std::uniform_real_distribution<double> u(-kFrameSpread, kFrameSpread);
  const std::size_t first_higher = 1 + p.size();
  for (std::size_t e = 0; e < p.size(); ++e) {
    poly[e][0] = p[e];
    for (std::size_t k = first_higher; k < poly[e].size(); ++k) poly[e][k] = u(rng);
  }
  return FramePoint(std::move(poly));
}

/// Uniform point in the sampling box, redrawn while inside an exclusion band.
inline std::vector<double> random_base_point(const ActionSpec& a, double margin, std::mt19937_64& rng) {
  auto box = sampling_box(a);
  std::vector<double> p(box.size());
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::uniform_real_distribution<double>(box[i].lo, box[i].hi)(rng);
    bool ok = a.space.contains(p);
    for (const auto& ex : a.exclusions) {
      if (std::abs(p[static_cast<std::size_t>(ex.coordinate)] - ex.value) < margin) ok = false;
    }
    if (ok) return p;
  }
  throw PreconditionError("could not draw a base point outside the exclusion bands; reduce the margin");
}

struct LevelResult {
  int level = 0;
  int rank = 0;
  int stab_dim = 0;
  std::optional<int> first_order_stab_dim;
  double threshold = 0.0;
  std::optional<double> smallest_accepted;
  std::optional<double> largest_rejected;
};

struct SampleResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<double> base_point;
  bool skipped = false;
  std::string skip_reason;
  std::vector<LevelResult> levels;
};

struct StabilizerReport {
  std::string action;
  int group_dim = 0;
  int space_dim = 0;
  int level_min = 0;
  int level_max = 0;
  double tolerance = kDefaultRankTolerance;
  std::uint64_t seed = 0;
  std::vector<SampleResult> samples;

  /// Most frequent stab_dim at `level` over non-skipped samples (ties: smaller).
  std::optional<int> generic_stab_dim(int level) const {
    std::map<int, int> counts;
    for (const auto& s : samples) {
      if (s.skipped) continue;
      for (const auto& l : s.levels) {
        if (l.level == level) ++counts[l.stab_dim];
      }
    }
    if (counts.empty()) return std::nullopt;
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    return best->first;
  }

  /// (sample index, level) pairs where stab_dim increases from level-1 to level.
  std::vector<std::pair<std::size_t, int>> monotone_violations() const {
    std::vector<std::pair<std::size_t, int>> out;
    for (const auto& s : samples) {
      for (std::size_t k = 1; k < s.levels.size(); ++k) {
        if (s.levels[k].stab_dim > s.levels[k - 1].stab_dim) out.emplace_back(s.index, s.levels[k].level);
      }
    }
    return out;
  }

  std::size_t skipped_count() const {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.skipped; }));
  }
};

inline SampleResult scan_sample(const ActionSpec& a, int level_min, int level_max, std::uint64_t seed, std::size_t index,
                                const ScanOptions& opt) {
  SampleResult r;
  r.index = index;
  r.seed = sample_seed(seed, index);
  std::mt19937_64 rng(r.seed);
  try {
    if (!opt.fixed_points.empty()) {
      r.base_point = opt.fixed_points[index % opt.fixed_points.size()];
      if (!a.space.contains(r.base_point)) throw DomainError("fixed base point outside the action's domain");
    } else {
      r.base_point = random_base_point(a, opt.margin, rng);
    }
    const FramePoint top = random_frame(r.base_point, level_max, rng);
    for (int j = level_min; j <= level_max; ++j) {
      const FramePoint q = j == level_max ? top : top.truncated(j);
      auto st = stabilizer(a, q, opt.tol);
      LevelResult l;
      l.level = j;
      l.rank = st.rank;
      l.stab_dim = st.stab_dim;
      l.threshold = st.decision.threshold;
      l.smallest_accepted = st.decision.smallest_accepted;
      l.largest_rejected = st.decision.largest_rejected;
      if (opt.first_order) {
        // The first-order algebra sits inside the stabilizer algebra.
        l.first_order_stab_dim = st.stab_dim == 0 ? 0 : first_order_stab_dim(a, q, opt.tol);
      }
      r.levels.push_back(l);
    }
  } catch (const Error& e) {
    r.skipped = true;
    r.skip_reason = e.what();
    r.levels.clear();
  }
  return r;
}

inline StabilizerReport tower_scan(const ActionSpec& a, int level_min, int level_max, std::size_t samples,
                                   std::uint64_t seed, const ScanOptions& opt = {}) {
  if (level_min < 0 || level_max < level_min) throw PreconditionError("levels must satisfy 0 <= min <= max");
  if (samples < 1) throw PreconditionError("at least one sample is required");
  if (!(opt.tol > 0.0)) throw PreconditionError("rank tolerance must be positive");
  validate_action(a);
  StabilizerReport rep;
  rep.action = a.name;
  rep.group_dim = a.group_dim;
  rep.space_dim = a.space_dim;
  rep.level_min = level_min;
  rep.level_max = level_max;
  rep.tolerance = opt.tol;
  rep.seed = seed;
  rep.samples.resize(samples);

  unsigned threads = opt.threads != 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, samples));
  auto work = [&](unsigned t) {
    for (std::size_t k = t; k < samples; k += threads) rep.samples[k] = scan_sample(a, level_min, level_max, seed, k, opt);
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return rep;
}

namespace detail {

inline nlohmann::json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

inline nlohmann::json to_json(const StabilizerReport& r) {
  using nlohmann::json;
  json out;
  out["action"] = r.action;
  out["n"] = r.group_dim;
  out["D"] = r.space_dim;
  out["levels"] = {r.level_min, r.level_max};
  out["tolerance"] = r.tolerance;
  out["seed"] = r.seed;
  json generic = json::array();
  for (int j = r.level_min; j <= r.level_max; ++j) {
    auto g = r.generic_stab_dim(j);
    generic.push_back(g ? json(*g) : json(nullptr));
  }
  out["generic_stab_dim"] = generic;
  json viol = json::array();
  for (const auto& [idx, level] : r.monotone_violations()) viol.push_back({{"sample", idx}, {"level", level}});
  out["monotone_violations"] = viol;
  out["skipped"] = r.skipped_count();
  json samples = json::array();
  for (const auto& s : r.samples) {
    for (const auto& l : s.levels) {
      json row;
      row["sample"] = s.index;
      row["level"] = l.level;
      row["base_point"] = s.base_point;
      row["seed"] = s.seed;
      row["rank"] = l.rank;
      row["stab_dim"] = l.stab_dim;
      row["first_order_stab_dim"] = l.first_order_stab_dim ? json(*l.first_order_stab_dim) : json(nullptr);
      row["pivots"] = {{"threshold", l.threshold},
                       {"smallest_accepted", detail::optional_number(l.smallest_accepted)},
                       {"largest_rejected", detail::optional_number(l.largest_rejected)}};
      samples.push_back(std::move(row));
    }
    if (s.skipped) {
      samples.push_back({{"sample", s.index}, {"seed", s.seed}, {"base_point", s.base_point}, {"skipped", s.skip_reason}});
    }
  }
  out["samples"] = samples;
  return out;
}

inline std::string to_csv(const StabilizerReport& r) {
  std::ostringstream os;
  os << "sample,level,base_point,seed,rank,stab_dim,first_order_stab_dim,threshold,smallest_accepted,largest_rejected,"
        "skipped\n";
  auto point = [](const std::vector<double>& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ";" : "") + detail::csv_number(p[i]);
    return s;
  };
  auto opt = [](const std::optional<double>& v) { return v ? detail::csv_number(*v) : std::string(); };
  for (const auto& s : r.samples) {
    for (const auto& l : s.levels) {
      os << s.index << ',' << l.level << ',' << point(s.base_point) << ',' << s.seed << ',' << l.rank << ',' << l.stab_dim
         << ',' << (l.first_order_stab_dim ? std::to_string(*l.first_order_stab_dim) : std::string()) << ','
         << detail::csv_number(l.threshold) << ',' << opt(l.smallest_accepted) << ',' << opt(l.largest_rejected) << ",\n";
    }
    if (s.skipped) os << s.index << ",," << point(s.base_point) << ',' << s.seed << ",,,,,,,1\n";
  }
  return os.str();
}

}  // namespace jetprolong
