/**
 * @file acceptance.cpp
 * @brief Acceptance gate: one PASS/FAIL line per criterion. Exit status is
 *        nonzero if any criterion fails.
 */

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "jetprolong/jetprolong.hpp"
#include "oracle/constructions.hpp"
#include "oracle/fd_taylor.hpp"
#include "oracle/random_inputs.hpp"
#include "oracle/sym_poly.hpp"

using namespace jetprolong;

namespace {

// Pinned tolerances and sample counts.
constexpr double kRankTol = 1e-8;
constexpr double kMargin = 0.05;
constexpr std::size_t kShearSamples = 60;
constexpr std::size_t kDegenerateSamples = 20;
constexpr double kShearTimeBudgetSeconds = 60.0;
constexpr double kComposeTol = 1e-12;
constexpr int kComposeCases = 500;
constexpr double kFdRelTol = 1e-5;
constexpr int kFdCases = 100;
constexpr double kGroupTol = 1e-9;
constexpr int kGroupCases = 100;
constexpr double kAgreeTol = 1e-6;
constexpr double kDifferGap = 1e-4;
constexpr int kContactPairs = 20;
constexpr double kVanishTol = 1e-6;
constexpr int kConversePairs = 10;
constexpr double kInjectiveGap = 1e-6;
constexpr int kInjectiveCases = 50;
constexpr double kNaturalityTol = 1e-8;
constexpr int kNaturalityCases = 10;
constexpr std::size_t kDecaySamples = 30;

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects the first failure message.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && pass_) {
      pass_ = false;
      first_ = what;
    }
  }
  Outcome done(const std::string& summary) const { return {pass_, pass_ ? summary : "first failure: " + first_}; }

 private:
  bool pass_ = true;
  std::string first_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double frame_gap(const FramePoint& a, const FramePoint& b) {
  return max_coefficient_gap(a.poly(), b.poly(), std::min(a.order(), b.order()));
}

Outcome shear_sharpness() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0;
  for (int n = 2; n <= 4; ++n) {
    ScanOptions opt;
    opt.tol = kRankTol;
    opt.margin = kMargin;
    auto rep = tower_scan(poly_example_action(n), 0, n, kShearSamples, 1000 + static_cast<std::uint64_t>(n), opt);
    c.expect(rep.skipped_count() == 0, "n=" + std::to_string(n) + ": skipped samples");
    for (const auto& s : rep.samples) {
      const double x0 = s.base_point[0];
      c.expect(std::abs(x0) >= kMargin, "sample inside the excluded band");
      for (const auto& l : s.levels) {
        const int target = std::max(n - l.level - 1, 0);
        const int oracle = closed_form_stab_dim_example(n, l.level, x0);
        ++checked;
        c.expect(l.stab_dim == target && l.stab_dim == oracle,
                 "n=" + std::to_string(n) + " level " + std::to_string(l.level) + " x0=" + fmt(x0) + ": got " +
                     std::to_string(l.stab_dim) + ", expected " + std::to_string(target));
        if (l.level == n - 2) c.expect(l.stab_dim >= 1, "level n-2 stabilizer discrete");
        if (l.level == n - 1) c.expect(l.stab_dim == 0, "level n-1 stabilizer not discrete");
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < kShearTimeBudgetSeconds, "runtime " + fmt(secs) + " s");
  return c.done(std::to_string(checked) + " (sample, level) pairs for n=2..4 match max(n-j-1,0) in " + fmt(secs) + " s");
}

Outcome degenerate_fibers() {
  Check c;
  std::size_t checked = 0;
  oracle::Rng rng(2);
  for (int n = 2; n <= 4; ++n) {
    ScanOptions opt;
    opt.tol = kRankTol;
    for (std::size_t k = 0; k < kDegenerateSamples; ++k) opt.fixed_points.push_back({0.0, rng.uniform(-2, 2)});
    auto rep = tower_scan(poly_example_action(n), 0, n, kDegenerateSamples, 7, opt);
    for (const auto& s : rep.samples) {
      c.expect(!s.skipped, "skipped sample over x1 = 0");
      for (const auto& l : s.levels) {
        ++checked;
        const int want = n - l.level;
        c.expect(l.stab_dim == want && closed_form_stab_dim_example(n, l.level, 0.0) == want,
                 "n=" + std::to_string(n) + " level " + std::to_string(l.level) + ": got " + std::to_string(l.stab_dim) +
                     ", expected " + std::to_string(want));
      }
    }
  }
  return c.done(std::to_string(checked) + " (frame, level) pairs over x1 = 0 give n - j");
}

Outcome jet_kernel() {
  Check c;
  oracle::Rng rng(3);
  double worst = 0.0;
  for (int t = 0; t < kComposeCases; ++t) {
    const int din = rng.integer(1, 3), mid = rng.integer(1, 3), dout = rng.integer(1, 3), k = rng.integer(0, 4);
    std::vector<double> x0(static_cast<std::size_t>(din));
    for (auto& x : x0) x = rng.dyadic();
    auto inner = oracle::random_dyadic_map(din, mid, k, x0, rng);
    auto outer = oracle::random_dyadic_map(mid, dout, k, inner.value_at_base(), rng);
    auto inner_sym = oracle::to_sym_offsets(inner);
    const auto b = inner.value_at_base();
    for (int i = 0; i < mid; ++i) {
      inner_sym[static_cast<std::size_t>(i)] =
          inner_sym[static_cast<std::size_t>(i)] - oracle::SymPoly::constant(din, b[static_cast<std::size_t>(i)]);
    }
    double gap = oracle::gap_to_sym(compose(outer, inner), oracle::sym_compose_truncate(oracle::to_sym_offsets(outer), inner_sym, k));
    worst = std::max(worst, gap);
    c.expect(gap <= kComposeTol, "compose case " + std::to_string(t) + " gap " + fmt(gap));
  }
  double worst_rel = 0.0;
  for (int t = 0; t < kFdCases; ++t) {
    const int d = rng.integer(1, 2);
    auto f = oracle::random_expression(d, 4, rng);
    auto x = rng.point(static_cast<std::size_t>(d), -1, 1);
    auto jet = taylor_of_expression(f, x, 2);
    auto fd = oracle::fd_taylor_map(f, x, 2);
    for (std::size_t a = 0; a < jet[0].size(); ++a) {
      const double rel = std::abs(jet[0][a] - fd[0][a]) / std::max(std::abs(fd[0][a]), 1.0);
      worst_rel = std::max(worst_rel, rel);
      c.expect(rel <= kFdRelTol, "finite differences on " + f.to_string());
    }
  }
  return c.done("compose max gap " + fmt(worst) + " over 500 cases; Taylor vs finite differences max rel " + fmt(worst_rel));
}

Outcome group_axioms() {
  Check c;
  oracle::Rng rng(4);
  double worst = 0.0;
  for (int t = 0; t < kGroupCases; ++t) {
    const int d = rng.integer(1, 2), j = rng.integer(1, 3);
    auto a = oracle::random_group_element(d, j, rng);
    auto b = oracle::random_group_element(d, j, rng);
    auto e3 = oracle::random_group_element(d, j, rng);
    auto id = JetGroupElement::identity(d, j);
    for (double g : {max_coefficient_gap(group_mul(group_mul(a, b), e3).poly(), group_mul(a, group_mul(b, e3)).poly(), j),
                     max_coefficient_gap(group_mul(a, id).poly(), a.poly(), j),
                     max_coefficient_gap(group_mul(id, a).poly(), a.poly(), j),
                     max_coefficient_gap(group_mul(a, group_inv(a)).poly(), id.poly(), j),
                     max_coefficient_gap(group_mul(group_inv(a), a).poly(), id.poly(), j)}) {
      worst = std::max(worst, g);
      c.expect(g <= kGroupTol, "group axiom gap " + fmt(g));
    }
  }
  double worst_bundle = 0.0;
  for (int t = 0; t < kGroupCases; ++t) {
    const int d = rng.integer(1, 2), j = rng.integer(1, 3);
    auto p = rng.point(static_cast<std::size_t>(d), -1, 1);
    auto f = oracle::random_diffeo(p, 3, rng);
    auto g = oracle::random_diffeo(taylor_of_expression(f, p, 0).value_at_base(), 3, rng);
    VectorExpression gf;
    for (const auto& e : g) gf.push_back(e.substitute(f));
    auto q = oracle::random_frame_over(p, j, rng);
    auto h = oracle::random_group_element(d, j, rng);
    for (double gap : {frame_gap(prolong_map(gf, q), prolong_map(g, prolong_map(f, q))),
                       frame_gap(prolong_map(f, right_action(q, h)), right_action(prolong_map(f, q), h))}) {
      worst_bundle = std::max(worst_bundle, gap);
      c.expect(gap <= kGroupTol, "prolongation gap " + fmt(gap));
    }
  }
  return c.done("group axioms max gap " + fmt(worst) + "; functoriality/equivariance max gap " + fmt(worst_bundle));
}

Outcome order_transfer() {
  Check c;
  oracle::Rng rng(5);
  double worst_agree = 0.0;
  double least_differ = 1e300;
  for (auto [i, j] : std::array<std::pair<int, int>, 3>{{{0, 1}, {1, 1}, {1, 2}}}) {
    for (int t = 0; t < kContactPairs; ++t) {
      const int d = 1 + t % 2;
      auto agree = oracle::make_contact_pair(d, i + j + 1, i + j + 1, rng);
      auto q = oracle::random_frame_over(agree.p, j, rng);
      double g = max_coefficient_gap(prolonged_map_jet(agree.f, q, i), prolonged_map_jet(agree.phi, q, i), i);
      worst_agree = std::max(worst_agree, g);
      c.expect(g <= kAgreeTol, "agreeing pair differs by " + fmt(g));
      auto differ = oracle::make_contact_pair(d, rng.integer(1, i + j), i + j + 1, rng);
      auto q2 = oracle::random_frame_over(differ.p, j, rng);
      double h = max_coefficient_gap(prolonged_map_jet(differ.f, q2, i), prolonged_map_jet(differ.phi, q2, i), i);
      least_differ = std::min(least_differ, h);
      c.expect(h > kDifferGap, "differing pair agrees to " + fmt(h));
    }
  }
  return c.done("agreeing pairs max gap " + fmt(worst_agree) + "; differing pairs min gap " + fmt(least_differ));
}

double jet_size(const PolyMap<double>& jet, int order) {
  auto z = PolyMap<double>::zero(jet.dim_in(), jet.dim_out(), order, std::vector<double>(jet.base_point().begin(), jet.base_point().end()));
  return max_coefficient_gap(jet, z, order);
}

Outcome induced_map_lemmas() {
  Check c;
  oracle::Rng rng(6);
  double worst = 0.0;
  double least = 1e300;
  for (auto [i, j] : std::array<std::pair<int, int>, 3>{{{1, 1}, {2, 1}, {1, 2}}}) {
    for (int t = 0; t < kConversePairs; ++t) {
      const int d = 1 + t % 2;
      auto big_q = oracle::random_polynomial(d, j, rng);
      double g = jet_size(induced_map_jet(oracle::vanishing_map(big_q.value_at_base(), i + j, rng), big_q, i), i);
      worst = std::max(worst, g);
      c.expect(g <= kVanishTol, "induced jet does not vanish: " + fmt(g));
      auto id = PolyMap<double>::identity(d, j, std::vector<double>(static_cast<std::size_t>(d), 0.0));
      const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
      double pos = jet_size(induced_map_jet(oracle::vanishing_map(origin, i + j, rng), id, i), i);
      double neg = jet_size(induced_map_jet(oracle::non_vanishing_map(origin, i + j, rng), id, i), i);
      worst = std::max(worst, pos);
      least = std::min(least, neg);
      c.expect(pos <= kVanishTol, "converse positive case " + fmt(pos));
      c.expect(neg > kDifferGap, "converse negative case " + fmt(neg));
    }
  }
  return c.done("vanishing cases max " + fmt(worst) + "; non-vanishing at identity min " + fmt(least));
}

Outcome embedding_properties() {
  Check c;
  oracle::Rng rng(7);
  double least = 1e300;
  for (int t = 0; t < kInjectiveCases; ++t) {
    const int d = 1 + t % 2;
    auto a = oracle::random_frame_over(rng.point(static_cast<std::size_t>(d), -1, 1), 2, rng);
    auto poly = a.poly();
    const auto slot = static_cast<std::size_t>(rng.integer(0, static_cast<int>(poly[0].size()) - 1));
    poly[static_cast<std::size_t>(rng.integer(0, d - 1))][slot] += rng.signed_magnitude(0.1, 1.0);
    double g = max_coefficient_gap(iterated_embed(a, 1, 1).poly(), iterated_embed(FramePoint(poly), 1, 1).poly(), 1);
    least = std::min(least, g);
    c.expect(g > kInjectiveGap, "distinct jets collide: " + fmt(g));
  }
  double worst = 0.0;
  for (int d = 1; d <= 2; ++d) {
    for (int t = 0; t < kNaturalityCases; ++t) {
      auto p = rng.point(static_cast<std::size_t>(d), -1, 1);
      auto f = oracle::random_diffeo(p, 3, rng);
      auto lambda = oracle::random_frame_over(p, 2, rng);
      double g = frame_gap(prolong_on_frame_bundle(f, iterated_embed(lambda, 1, 1), d, 1),
                           iterated_embed(prolong_map(f, lambda), 1, 1));
      worst = std::max(worst, g);
      c.expect(g <= kNaturalityTol, "naturality gap " + fmt(g));
    }
  }
  return c.done("injectivity min gap " + fmt(least) + "; naturality max gap " + fmt(worst));
}

Outcome decay_monotonicity() {
  Check c;
  std::vector<ActionSpec> actions{translation_action(1), translation_action(2), translation_action(3), affine_action(),
                                  poly_example_action(2), poly_example_action(3), poly_example_action(4)};
  std::size_t rows = 0;
  for (const auto& a : actions) {
    ScanOptions opt;
    opt.tol = kRankTol;
    auto rep = tower_scan(a, 0, a.group_dim, kDecaySamples, 8, opt);
    c.expect(rep.monotone_violations().empty(), a.name + ": stab_dim increases along the tower");
    c.expect(rep.skipped_count() == 0, a.name + ": skipped samples");
    const bool shear = a.name.rfind("poly-example", 0) == 0;
    for (const auto& s : rep.samples) {
      for (const auto& l : s.levels) {
        ++rows;
        if (shear && l.stab_dim >= 1) {
          c.expect(l.first_order_stab_dim && *l.first_order_stab_dim <= l.stab_dim - 1,
                   a.name + ": first-order stabilizer not smaller at level " + std::to_string(l.level));
        }
      }
    }
  }
  return c.done(std::to_string(rows) + " (sample, level) rows over 7 built-in actions, no increase");
}

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  int raw = pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

Outcome cli_reproducibility() {
  Check c;
  for (int n = 2; n <= 4; ++n) {
    const std::string cmd =
        std::string("\"") + JETPROLONG_CLI_PATH + "\" verify-example -n " + std::to_string(n) + " --samples 50 --seed 2024";
    int s1 = 0, s2 = 0;
    auto a = run_capture(cmd, s1);
    auto b = run_capture(cmd, s2);
    c.expect(s1 == 0 && s2 == 0, "n=" + std::to_string(n) + " exit status " + std::to_string(s1));
    c.expect(!a.empty() && a == b, "n=" + std::to_string(n) + " output differs between runs");
  }
  return c.done("verify-example byte-identical across two runs and exits 0 for n=2,3,4");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"shear family stabilizer dims match max(n-j-1,0)", shear_sharpness},
      {"frames over x1 = 0 give n-j", degenerate_fibers},
      {"composition and Taylor kernels match oracles", jet_kernel},
      {"jet group axioms, functoriality, equivariance", group_axioms},
      {"order of contact transfers to prolonged jets", order_transfer},
      {"induced maps on polynomial spaces", induced_map_lemmas},
      {"iterated embedding injective and natural", embedding_properties},
      {"stabilizer dims non-increasing along the tower", decay_monotonicity},
      {"CLI verify-example reproducible", cli_reproducibility},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (k + 1) << ": " << criteria[k].first << " (" << o.detail
              << ")" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
