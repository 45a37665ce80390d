// One PASS/FAIL line per acceptance criterion, with the measured quantity and
// wall time. Exit status is the number of failures (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "gwforest/census.hpp"
#include "gwforest/exact.hpp"
#include "gwforest/experiments.hpp"
#include "gwforest/offspring.hpp"
#include "gwforest/oracle.hpp"
#include "gwforest/sampler.hpp"
#include "gwforest/tree.hpp"

using namespace gwforest;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<OffspringDistribution> trio() {
  return {builtin(Builtin::full_binary), builtin(Builtin::motzkin), builtin(Builtin::plane)};
}

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

Outcome oracle_equivalence() {
  double worst = 0;
  std::size_t checks = 0;
  for (const auto& d : trio()) {
    for (std::size_t n = 1; n <= 9; ++n) {
      if (prob_total_size(d, n) == 0) continue;
      const auto law = exact_conditional_distribution(d, n);
      for (std::size_t k = 1; k <= 4; ++k) {
        for (const auto& t : enumerate_trees(k)) {
          const auto fr = exact_count_pmf(law, d, t, CountMode::fringe);
          const auto nf = exact_count_pmf(law, d, t, CountMode::nonfringe);
          const auto mom = second_factorial_nonfringe(d, n, t);
          worst = std::max({worst, rel_err(expected_fringe_count(d, n, t), fr.mean),
                            rel_err(expected_nonfringe_count(d, n, t), nf.mean), rel_err(mom.mean, nf.mean),
                            rel_err(mom.second_factorial, nf.second_factorial)});
          checks += 4;
        }
      }
    }
  }
  return {worst <= 1e-10, fmt("max rel err %.3g over %zu checks (tol 1e-10)", worst, checks)};
}

Outcome sampler_exactness() {
  double worst = 0;
  std::string where;
  for (const auto& d : trio()) {
    for (const std::uint64_t n : {5u, 7u}) {
      const auto law = exact_conditional_distribution(d, n);
      SampleConfig cfg;
      cfg.n = n;
      Rng rng(derive_seed(2024, n * 31 + d.fingerprint() % 97));
      constexpr int draws = 1'000'000;
      std::map<TreeKey, double> hist;
      for (int i = 0; i < draws; ++i) hist[tree_key(sample_conditional(d, cfg, rng))] += 1.0;
      double diff = 0;
      for (const auto& [key, p] : law.entries) diff += std::abs(hist[key] / draws - p);
      for (const auto& [key, c] : hist) diff += law.entries.contains(key) ? 0.0 : c / draws;
      if (diff / 2 >= worst) {
        worst = diff / 2;
        where = d.name() + " n=" + std::to_string(n);
      }
    }
  }
  return {worst <= 0.01, fmt("max TV %.5f at %s (tol 0.01, 1e6 draws each)", worst, where.c_str())};
}

Outcome local_limit() {
  double lo = 1e9, hi = -1e9;
  for (const auto& d : trio()) {
    const std::uint64_t n = d.span() == 2 ? 10'001 : 10'000;
    const double sigma2 = constants(d).sigma2;
    const double r = prob_total_size(d, n) * std::pow(double(n), 1.5) * std::sqrt(2 * std::numbers::pi * sigma2) / d.span();
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo >= 0.95 && hi <= 1.05, fmt("ratios in [%.5f, %.5f] (want [0.95, 1.05])", lo, hi)};
}

Outcome poisson_grid() {
  int violations = 0;
  double tightest = 1e9;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double mu = 0.01 * std::pow(10.0, 4.0 * i / 9), nu = 0.013 * std::pow(10.0, 3.8 * j / 9);
      const auto tv = poisson_tv(mu, nu);
      if (tv.exact > tv.bound + 1e-12) ++violations;
      tightest = std::min(tightest, tv.bound - tv.exact);
    }
  }
  return {violations == 0, fmt("%d violations on 100 (mu, nu) pairs; min slack %.3g", violations, tightest)};
}

Outcome min_probability_limits() {
  const std::vector<std::pair<OffspringDistribution, double>> want{
      {builtin(Builtin::full_binary), 0.5},
      {builtin(Builtin::motzkin), 1.0 / 3},
      {builtin(Builtin::d_ary, 3), 4.0 / 27},
      {builtin(Builtin::plane), 0.25}};
  double worst_L = 0;
  for (const auto& [d, L] : want) worst_L = std::max(worst_L, std::abs(constants(d).L - L));
  const double plane = std::exp(pmin(builtin(Builtin::plane), 100).log_probability / 100);
  const double fb = std::exp(pmin(builtin(Builtin::full_binary), 101).log_probability / 101);
  const double e_plane = std::abs(plane - 0.25), e_fb = std::abs(fb - 0.5);
  return {worst_L <= 1e-12 && e_plane <= 0.02 && e_fb <= 0.05,
          fmt("max |L - L*| %.2g; plane pmin_100^(1/100) = %.5f (|diff| %.4f); full-binary pmin_101^(1/101) = %.5f "
              "(|diff| %.4f)",
              worst_L, plane, e_plane, fb, e_fb)};
}

Outcome labeled_star() {
  const auto lab = builtin(Builtin::labeled, 2, 1e-300);
  int bad = 0;
  double worst = 0;
  for (std::size_t k = 20; k <= 60; ++k) {
    const auto res = pmin(lab, k);
    const double want = std::pow(lab.p(0), double(k - 1)) * lab.p(k - 1);
    const double err = rel_err(res.probability, want);
    worst = std::max(worst, err);
    if (res.tree != star(k) || err > 1e-12) ++bad;
  }
  return {bad == 0, fmt("%d of 41 sizes off; max rel err %.3g (tol 1e-12)", bad, worst)};
}

RunOptions opts(std::uint64_t reps, std::uint64_t seed) {
  RunOptions o;
  o.replicates = reps;
  o.seed = seed;
  return o;
}

Outcome poisson_regime() {
  const auto s = run_poisson_regimes(builtin(Builtin::plane), {10'000}, "chain:6", opts(100'000, 7));
  const auto& row = s.rows.at(0);
  const double npi = *row.reference_mean;
  return {npi >= 1 && npi <= 4 && *row.tv <= 0.05,
          fmt("pattern %s, n pi = %.4f, TV = %.5f (tol 0.05)", row.pattern.c_str(), npi, *row.tv)};
}

Outcome nonfringe_concentration() {
  const auto s =
      run_nonfringe_concentration(builtin(Builtin::motzkin), {100'000}, "tree:2,2,0,0,2,0,0", opts(1000, 8));
  const double r = s.rows.at(0).diagnostics.at("mean_ratio");
  return {r >= 0.95 && r <= 1.05, fmt("mean N/(n pi_nf) = %.5f (want [0.95, 1.05])", r)};
}

Outcome variance_inflation() {
  // n p_1^h closest to 2 in log scale: h = round(log_3(n / 2)).
  const auto s = run_nonfringe_concentration(builtin(Builtin::motzkin), {10'000}, "chain:round(log(n/2)/log(3))",
                                             opts(100'000, 9));
  const auto& row = s.rows.at(0);
  const double ratio = row.variance / row.mean;
  return {ratio >= 1.8 && ratio <= 2.2,
          fmt("pattern %s, mean %.4f, var/mean = %.4f (want [1.8, 2.2])", row.pattern.c_str(), row.mean, ratio)};
}

Outcome heights() {
  const auto fb = builtin(Builtin::full_binary);
  const std::uint64_t n = 1'000'001;
  const auto f = run_heights(fb, {n}, 2, HeightMode::fringe, opts(200, 10));
  const auto nf = run_heights(fb, {n}, 2, HeightMode::nonfringe, opts(200, 10));
  const double center = std::log2(std::log(double(n))) - alpha_r(fb, 2);
  const double med = f.rows.at(0).quantiles.at("median");
  const double ratio = nf.rows.at(0).quantiles.at("median") / std::log2(std::log(double(n)));
  return {std::abs(med - center) <= 1 && ratio >= 0.75 && ratio <= 1.35,
          fmt("median H = %.1f vs centerline %.4f (tol 1); median H_nf / log2 ln n = %.4f (want [0.75, 1.35])", med,
              center, ratio)};
}

Outcome kn() {
  const std::uint64_t n = 100'000;
  const auto s = run_Kn(builtin(Builtin::plane), {n}, 12, opts(200, 11));
  const double ln = std::log(double(n));
  const double center = (ln - std::log(ln)) / std::log(4.0);
  const double med = s.rows.at(0).quantiles.at("median");
  return {std::abs(med - center) <= 2, fmt("median K = %.1f vs centerline %.4f (tol 2)", med, center)};
}

Outcome switching() {
  const auto plane = builtin(Builtin::plane);
  const auto law = exact_conditional_distribution(plane, 5);
  SampleConfig cfg;
  cfg.n = 5;
  Rng rng(12);
  constexpr int runs = 1'000'000;
  std::map<TreeKey, double> hist;
  for (int i = 0; i < runs; ++i) {
    const auto t1 = sample_conditional(plane, cfg, rng);
    const auto t2 = sample_conditional(plane, cfg, rng);
    hist[tree_key(switch_random_fringe(t1, t2, 2, rng))] += 1.0;
  }
  double diff = 0;
  for (const auto& [key, p] : law.entries) diff += std::abs(hist[key] / runs - p);
  return {diff / 2 <= 0.01, fmt("plane n=5, k=2: TV = %.5f (tol 0.01)", diff / 2)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"sampler exactness", sampler_exactness},
      {"local limit of P(|T| = n)", local_limit},
      {"Poisson TV bound", poisson_grid},
      {"minimum-probability limits", min_probability_limits},
      {"labeled least likely tree is a star", labeled_star},
      {"Poisson regime", poisson_regime},
      {"non-fringe concentration", nonfringe_concentration},
      {"chain variance inflation", variance_inflation},
      {"complete binary heights", heights},
      {"K_n centerline", kn},
      {"subtree switching", switching},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !out.pass;
    std::printf("%s criterion %2zu  %-38s %s  [%.1f s]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
