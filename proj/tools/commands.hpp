#pragma once

/**
 * @file commands.hpp
 * @brief Subcommands of the jetprolong tool. Kept in a header so the test
 *        suite can drive them in-process.
 *
 * Exit codes: 0 success, 1 usage or configuration error, 2 property violation.
 */

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jetprolong/jetprolong.hpp"

namespace jetprolong::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;

inline constexpr const char* kToleranceEnv = "JETPROLONG_TOL";

struct RunConfig {
  std::string action = "poly-example n=2";
  int level_min = 0;
  int level_max = 1;
  std::size_t samples = 20;
  std::uint64_t seed = 1;
  double tol = kDefaultRankTolerance;
  std::optional<std::vector<Interval>> domain;
  std::string out;
  std::string format = "json";
  unsigned threads = 0;
};

/// "a..b" or a single L meaning 0..L.
inline std::pair<int, int> parse_levels(const std::string& s) {
  static const std::regex range(R"(\s*(\d+)\s*\.\.\s*(\d+)\s*)");
  static const std::regex single(R"(\s*(\d+)\s*)");
  std::smatch m;
  if (std::regex_match(s, m, range)) {
    int a = std::stoi(m[1].str());
    int b = std::stoi(m[2].str());
    if (b < a) throw PreconditionError("levels '" + s + "': upper end below lower end");
    return {a, b};
  }
  if (std::regex_match(s, m, single)) return {0, std::stoi(m[1].str())};
  throw PreconditionError("levels '" + s + "': expected 'a..b' or 'L'");
}

/// "x1:[a,b],x2:[c,d]"; unnamed coordinates keep the default sampling range.
inline std::vector<Interval> parse_domain(const std::string& s, int dim) {
  std::vector<Interval> box(static_cast<std::size_t>(dim), Interval{-kDefaultSampleRadius, kDefaultSampleRadius});
  static const std::regex item(R"(\s*x(\d+)\s*:\s*\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\]\s*(,|$))");
  auto it = s.cbegin();
  std::smatch m;
  while (it != s.cend()) {
    if (!std::regex_search(it, s.cend(), m, item, std::regex_constants::match_continuous)) {
      throw PreconditionError("domain '" + s + "': expected items like x1:[a,b]");
    }
    int idx = std::stoi(m[1].str());
    if (idx < 1 || idx > dim) throw PreconditionError("domain '" + s + "': coordinate x" + std::to_string(idx) + " out of range");
    double lo = 0;
    double hi = 0;
    try {
      lo = std::stod(m[2].str());
      hi = std::stod(m[3].str());
    } catch (const std::exception&) {
      throw PreconditionError("domain '" + s + "': bounds must be numbers");
    }
    if (!(lo < hi)) throw PreconditionError("domain '" + s + "': need lo < hi");
    box[static_cast<std::size_t>(idx - 1)] = Interval{lo, hi};
    it = m.suffix().first;
  }
  return box;
}

/// Default tolerance, overridden by JETPROLONG_TOL.
inline double default_tolerance() {
  const char* env = std::getenv(kToleranceEnv);
  if (env == nullptr || *env == '\0') return kDefaultRankTolerance;
  char* end = nullptr;
  double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw PreconditionError(std::string(kToleranceEnv) + " must be a positive number, got '" + env + "'");
  }
  return v;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

inline std::string format_point(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_double(p[i]);
  return s + ")";
}

/// Prints the order-k Taylor coefficients of a comma-separated list of expressions.
inline int cmd_jet(const std::string& exprs, const std::vector<double>& point, int order, std::ostream& out,
                   std::ostream& err) {
  try {
    if (order < 0) throw PreconditionError("order must be non-negative");
    VectorExpression f;
    std::size_t start = 0;
    while (true) {
      auto comma = exprs.find(',', start);
      f.push_back(Expression::parse(exprs.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    int dim = 1;
    for (const auto& e : f) dim = std::max(dim, e.variable_arity());
    for (const auto& e : f) {
      if (e.parameter_arity() > 0) throw PreconditionError("group parameters are not allowed in 'jet'");
    }
    std::vector<double> x = point;
    if (x.empty()) x.assign(static_cast<std::size_t>(dim), 0.0);
    if (static_cast<int>(x.size()) < dim) {
      throw PreconditionError("expression uses x" + std::to_string(dim) + " but the point has " + std::to_string(x.size()) +
                              " coordinates");
    }
    auto jet = taylor_of_expression(f, x, order);
    const Basis& basis = jet[0].basis();
    for (int e = 0; e < jet.dim_out(); ++e) {
      out << "component " << (e + 1) << ": " << f[static_cast<std::size_t>(e)].to_string() << " about "
          << format_point(x) << "\n";
      for (std::size_t a = 0; a < basis.size(); ++a) {
        out << "  " << basis[a].to_string() << " " << format_double(jet[static_cast<std::size_t>(e)][a]) << "\n";
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

/// True when each non-skipped sample reaches stab_dim 0 at a scanned level <= n-1.
inline bool tower_certifies(const StabilizerReport& r) {
  std::size_t used = 0;
  for (const auto& s : r.samples) {
    if (s.skipped) continue;
    ++used;
    bool reached = false;
    for (const auto& l : s.levels) {
      if (l.level <= r.group_dim - 1 && l.stab_dim == 0) reached = true;
    }
    if (!reached) return false;
  }
  return used > 0 && r.monotone_violations().empty();
}

inline void print_generic(const StabilizerReport& r, std::ostream& out) {
  out << "modal stab_dim by level:";
  for (int j = r.level_min; j <= r.level_max; ++j) {
    auto g = r.generic_stab_dim(j);
    out << " " << j << ":" << (g ? std::to_string(*g) : std::string("-"));
  }
  out << "\n";
}

inline int cmd_tower(RunConfig cfg, std::ostream& out, std::ostream& err) {
  StabilizerReport rep;
  try {
    if (cfg.format != "json" && cfg.format != "csv") throw PreconditionError("format must be json or csv");
    ActionSpec action = load_action(cfg.action);
    if (cfg.domain) {
      if (static_cast<int>(cfg.domain->size()) != action.space_dim) throw PreconditionError("domain dimension mismatch");
      action.space = ChartedSpace::box(*cfg.domain);
    }
    ScanOptions opt;
    opt.tol = cfg.tol;
    opt.threads = cfg.threads;
    rep = tower_scan(action, cfg.level_min, cfg.level_max, cfg.samples, cfg.seed, opt);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::string body = cfg.format == "json" ? to_json(rep).dump(2) + "\n" : to_csv(rep);
  if (cfg.out.empty()) {
    out << body;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << cfg.out << "\n";
      return kExitUsage;
    }
    f << body;
    print_generic(rep, out);
  }
  for (const auto& [idx, level] : rep.monotone_violations()) {
    err << "monotonicity violated: sample " << idx << " at level " << level << "\n";
  }
  if (rep.skipped_count() > 0) err << rep.skipped_count() << " sample(s) skipped\n";
  if (!tower_certifies(rep)) {
    err << "stabilizer does not vanish by level " << (rep.group_dim - 1) << " on every sample\n";
    return kExitViolation;
  }
  return kExitOk;
}

/// Frames over x1 = 0 checked in addition to the generic samples.
inline std::size_t degenerate_sample_count(std::size_t samples) { return std::max<std::size_t>(5, samples / 10); }

struct Counterexample {
  std::string check;
  const SampleResult* sample = nullptr;
  const LevelResult* level = nullptr;
  int expected = 0;
};

inline void print_counterexample(const Counterexample& c, std::ostream& out) {
  out << "counterexample (" << c.check << "): sample " << c.sample->index << " seed " << c.sample->seed << " base point "
      << format_point(c.sample->base_point);
  if (c.level != nullptr) {
    out << " level " << c.level->level << " stab_dim " << c.level->stab_dim << " expected " << c.expected << " pivots[threshold "
        << format_double(c.level->threshold) << ", smallest accepted "
        << (c.level->smallest_accepted ? format_double(*c.level->smallest_accepted) : std::string("none"))
        << ", largest rejected "
        << (c.level->largest_rejected ? format_double(*c.level->largest_rejected) : std::string("none")) << "]";
  } else {
    out << " skipped: " << c.sample->skip_reason;
  }
  out << "\n";
}

/**
 * Checks the polynomial-shear family with n parameters:
 * (a) stab_dim >= 1 at level n-2 on every frame, including frames over x1 = 0;
 * (b) stab_dim = 0 at level n-1 when |x1| >= 0.05;
 * (c) every level agrees with the closed form.
 */
inline int cmd_verify_example(int n, std::size_t samples, std::uint64_t seed, double tol, const std::string& report_path,
                              std::ostream& out, std::ostream& err) {
  if (n < 2 || n > 6) {
    err << "error: verify-example needs 2 <= n <= 6 (got " << n << ")\n";
    return kExitUsage;
  }
  if (samples < 1) {
    err << "error: at least one sample is required\n";
    return kExitUsage;
  }
  if (!(tol > 0.0)) {
    err << "error: tolerance must be positive\n";
    return kExitUsage;
  }
  const ActionSpec action = poly_example_action(n);
  ScanOptions opt;
  opt.tol = tol;
  StabilizerReport generic;
  StabilizerReport degenerate;
  try {
    generic = tower_scan(action, 0, n - 1, samples, seed, opt);
    std::mt19937_64 rng(splitmix64(seed ^ 0xde9e7e7a7eULL));
    std::uniform_real_distribution<double> y(-kDefaultSampleRadius, kDefaultSampleRadius);
    for (std::size_t k = 0; k < degenerate_sample_count(samples); ++k) opt.fixed_points.push_back({0.0, y(rng)});
    degenerate = tower_scan(action, 0, n - 1, opt.fixed_points.size(), seed + 1, opt);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::optional<Counterexample> failure;
  auto check = [&](const StabilizerReport& rep, bool generic_points) {
    for (const auto& s : rep.samples) {
      if (failure) return;
      if (s.skipped) {
        failure = Counterexample{"sample skipped", &s, nullptr, 0};
        return;
      }
      const double x0 = s.base_point[0];
      for (const auto& l : s.levels) {
        const int expected = closed_form_stab_dim_example(n, l.level, x0);
        if (l.level == n - 2 && l.stab_dim < 1) {
          failure = Counterexample{"(a) stabilizer discrete at level n-2", &s, &l, expected};
        } else if (generic_points && l.level == n - 1 && std::abs(x0) >= 0.05 && l.stab_dim != 0) {
          failure = Counterexample{"(b) stabilizer not discrete at level n-1", &s, &l, 0};
        } else if (l.stab_dim != expected) {
          failure = Counterexample{"(c) pipeline differs from closed form", &s, &l, expected};
        }
        if (failure) return;
      }
    }
  };
  check(generic, true);
  check(degenerate, false);

  out << "poly-example n=" << n << " seed " << seed << " tolerance " << format_double(tol) << "\n";
  out << "generic frames: " << generic.samples.size() << ", frames over x1 = 0: " << degenerate.samples.size() << "\n";
  out << "generic frames, ";
  print_generic(generic, out);
  out << "frames over x1 = 0, ";
  print_generic(degenerate, out);
  if (!report_path.empty()) {
    std::ofstream f(report_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << report_path << "\n";
      return kExitUsage;
    }
    f << to_json(generic).dump(2) << "\n";
  }
  if (failure) {
    print_counterexample(*failure, out);
    out << "FAIL\n";
    return kExitViolation;
  }
  out << "(a) level " << (n - 2) << " stabilizer non-discrete on all frames: ok\n";
  out << "(b) level " << (n - 1) << " stabilizer discrete on generic frames: ok\n";
  out << "(c) closed form matched on all frames and levels: ok\n";
  out << "PASS\n";
  return kExitOk;
}

/// Entry point shared by main() and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Jets, frame-bundle prolongations and infinitesimal stabilizers"};
  app.require_subcommand(1);

  std::string expr;
  std::vector<double> point;
  int order = 2;
  auto* jet = app.add_subcommand("jet", "Print the Taylor coefficients of an expression");
  jet->add_option("expr", expr, "Expression(s) in x1..xD, comma separated")->required();
  jet->add_option("--at", point, "Base point (defaults to the origin)")->delimiter(',');
  jet->add_option("--order,-k", order, "Truncation order")->check(CLI::NonNegativeNumber);

  RunConfig cfg;
  std::string levels = "0..1";
  std::string domain;
  std::optional<double> tol_flag;
  auto* tower = app.add_subcommand("tower", "Stabilizer dimensions along the frame-bundle tower");
  tower->add_option("--action", cfg.action, "Built-in action name or action file")->required();
  tower->add_option("--levels", levels, "Levels 'a..b' or 'L' (= 0..L)");
  tower->add_option("--samples", cfg.samples, "Number of sampled frames")->check(CLI::PositiveNumber);
  tower->add_option("--seed", cfg.seed, "Random seed");
  tower->add_option("--tol", tol_flag, "Relative rank tolerance")->check(CLI::PositiveNumber);
  tower->add_option("--domain", domain, "Sampling box, e.g. x1:[0.1,2],x2:[-1,1]");
  tower->add_option("--out", cfg.out, "Report path (default: standard output)");
  tower->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  tower->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");

  int n = 2;
  std::size_t v_samples = 100;
  std::uint64_t v_seed = 1;
  std::optional<double> v_tol;
  std::string v_out;
  auto* verify = app.add_subcommand("verify-example", "Check the polynomial-shear example against its closed form");
  verify->add_option("--n,-n", n, "Number of group parameters (2..6)")->required();
  verify->add_option("--samples", v_samples, "Number of generic frames");
  verify->add_option("--seed", v_seed, "Random seed");
  verify->add_option("--tol", v_tol, "Relative rank tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--out", v_out, "Write the JSON report of the generic scan here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*jet) return cmd_jet(expr, point, order, out, err);
    if (*tower) {
      std::tie(cfg.level_min, cfg.level_max) = parse_levels(levels);
      cfg.tol = tol_flag ? *tol_flag : default_tolerance();
      if (!domain.empty()) {
        cfg.domain = parse_domain(domain, load_action(cfg.action).space_dim);
      }
      return cmd_tower(cfg, out, err);
    }
    if (*verify) return cmd_verify_example(n, v_samples, v_seed, v_tol ? *v_tol : default_tolerance(), v_out, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace jetprolong::cli
