#include "gwforest/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <stdexcept>

#include "gwforest/kernels.hpp"

namespace gwforest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Lattice {
  std::int64_t offset = 0;
  std::vector<double> values;
};

Lattice base_lattice(const OffspringDistribution& dist) {
  const std::uint32_t h = dist.span();
  Lattice b;
  b.values.assign(dist.max_degree() / h + 1, 0.0);
  for (const auto& a : dist.atoms()) b.values[a.degree / h] = a.probability;
  return b;
}

void trim(Lattice& x) {
  std::size_t lo = 0, hi = x.values.size();
  while (lo < hi && x.values[lo] < kUnderflowCut) ++lo;
  while (hi > lo && x.values[hi - 1] < kUnderflowCut) --hi;
  if (lo == hi) throw std::underflow_error("convolution underflowed entirely");
  x.values = std::vector<double>(x.values.begin() + static_cast<std::ptrdiff_t>(lo),
                                 x.values.begin() + static_cast<std::ptrdiff_t>(hi));
  x.offset += static_cast<std::int64_t>(lo);
}

Lattice multiply(const Lattice& a, const Lattice& b) {
  const std::size_t len = a.values.size() + b.values.size() - 1;
  if (len > kConvolutionEntryCap) throw std::length_error("convolution table exceeds memory cap");
  Lattice out;
  out.offset = a.offset + b.offset;
  out.values.assign(len, 0.0);
  // Iterate over the shorter operand; each row is one SIMD axpy.
  const Lattice& outer = a.values.size() <= b.values.size() ? a : b;
  const Lattice& inner = &outer == &a ? b : a;
  std::span<double> dst(out.values);
  for (std::size_t i = 0; i < outer.values.size(); ++i) {
    const double w = outer.values[i];
    if (w == 0.0) continue;
    kernels::axpy(w, inner.values, dst.subspan(i));
  }
  trim(out);
  return out;
}

Lattice power(const Lattice& base, std::uint64_t m) {
  Lattice result;
  result.values = {1.0};
  if (m == 0) return result;
  Lattice p = base;
  bool first = true;
  while (true) {
    if (m & 1) {
      result = first ? p : multiply(result, p);
      first = false;
    }
    m >>= 1;
    if (!m) break;
    p = multiply(p, p);
  }
  return result;
}

ConvolutionTable to_table(const OffspringDistribution& dist, std::uint64_t m, Lattice x) {
  return ConvolutionTable(m, dist.span(), x.offset, std::move(x.values));
}

Lattice from_table(const ConvolutionTable& t) {
  Lattice x;
  x.offset = t.min_value() / static_cast<std::int64_t>(t.span());
  x.values.assign(t.lattice_values().begin(), t.lattice_values().end());
  return x;
}

class ConvolutionCache {
 public:
  std::shared_ptr<const ConvolutionTable> get(const OffspringDistribution& dist, std::uint64_t m) {
    const std::uint64_t fp = dist.fingerprint();
    std::shared_ptr<const ConvolutionTable> below;
    {
      std::shared_lock lock(mutex_);
      const auto it = tables_.upper_bound({fp, m});
      if (it != tables_.begin()) {
        const auto prev = std::prev(it);
        if (prev->first.first == fp) {
          if (prev->first.second == m) return prev->second;
          below = prev->second;
        }
      }
    }
    const Lattice base = base_lattice(dist);
    std::size_t base_nonzero = 0;
    for (double v : base.values) base_nonzero += v > 0.0;

    Lattice x;
    std::uint64_t from = 0;
    const auto steppable = [&](const ConvolutionTable& t) {
      return (m - t.m()) * base_nonzero <= 3 * std::max<std::size_t>(t.lattice_values().size(), 64);
    };
    if (below && steppable(*below)) {
      x = from_table(*below);
      from = below->m();
    } else if (m >= 512) {
      // Power to an aligned anchor and cache it, so neighbouring m step from it.
      const std::uint64_t anchor = m & ~std::uint64_t{255};
      auto anchor_table = std::make_shared<const ConvolutionTable>(to_table(dist, anchor, power(base, anchor)));
      insert(fp, anchor, anchor_table);
      x = from_table(*anchor_table);
      from = anchor;
    } else {
      x = power(base, m);
      from = m;
    }
    for (; from < m; ++from) x = multiply(x, base);
    auto table = std::make_shared<const ConvolutionTable>(to_table(dist, m, std::move(x)));
    return insert(fp, m, std::move(table));
  }

  void clear() {
    std::unique_lock lock(mutex_);
    tables_.clear();
  }

 private:
  std::shared_ptr<const ConvolutionTable> insert(std::uint64_t fp, std::uint64_t m,
                                                 std::shared_ptr<const ConvolutionTable> table) {
    std::unique_lock lock(mutex_);
    if (tables_.size() > 4096) tables_.clear();
    const auto [it, fresh] = tables_.emplace(std::pair{fp, m}, std::move(table));
    return it->second;
  }

  std::shared_mutex mutex_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const ConvolutionTable>> tables_;
};

ConvolutionCache& cache() {
  static ConvolutionCache instance;
  return instance;
}

double denominator(const OffspringDistribution& dist, std::uint64_t n) {
  if (n == 0) throw ConfigError("conditional tree needs n >= 1");
  const double d = prob_sum(dist, n, static_cast<std::int64_t>(n) - 1);
  if (!(d > 0.0)) {
    throw ConfigError("conditional tree of size " + std::to_string(n) + " is undefined for " + dist.name() +
                      " (P(|T| = n) = 0)");
  }
  return d;
}

// T_v embeds at the root of T: walk both preorders in lockstep, letting
// pattern leaves swallow whole host subtrees.
bool embeds_at_root(std::span<const Degree> host, std::span<const Degree> pattern) {
  std::size_t pos = 0;
  for (const Degree d : pattern) {
    if (pos >= host.size()) return false;
    if (d == 0) {
      std::int64_t open = 1;
      while (open > 0) open += static_cast<std::int64_t>(host[pos++]) - 1;
    } else if (host[pos] == d) {
      ++pos;
    } else {
      return false;
    }
  }
  return true;
}

// n * exp(log_weight) * P(S_m = s) / P(S_n = n - 1), in logs so small
// pattern probabilities do not underflow early.
double scaled_ratio(const OffspringDistribution& dist, std::uint64_t n, double log_weight, std::int64_t m,
                    std::int64_t s, double denom) {
  if (m < 0 || s < 0 || log_weight == -kInf) return 0.0;
  const double num = prob_sum(dist, static_cast<std::uint64_t>(m), s);
  if (num == 0.0) return 0.0;
  return std::exp(std::log(static_cast<double>(n)) + log_weight + std::log(num) - std::log(denom));
}

}  // namespace

double ConvolutionTable::operator()(std::int64_t s) const noexcept {
  if (s % static_cast<std::int64_t>(span_) != 0) return 0.0;
  const std::int64_t idx = s / static_cast<std::int64_t>(span_) - offset_;
  if (idx < 0 || idx >= static_cast<std::int64_t>(values_.size())) return 0.0;
  return values_[static_cast<std::size_t>(idx)];
}

double ConvolutionTable::total_mass() const noexcept {
  double total = 0.0;
  for (double v : values_) total += v;
  return total;
}

ConvolutionTable convolve(const OffspringDistribution& dist, std::uint64_t m) {
  return to_table(dist, m, power(base_lattice(dist), m));
}

std::shared_ptr<const ConvolutionTable> cached_convolution(const OffspringDistribution& dist,
                                                           std::uint64_t m) {
  return cache().get(dist, m);
}

void clear_convolution_cache() { cache().clear(); }

double prob_sum(const OffspringDistribution& dist, std::uint64_t m, std::int64_t s) {
  if (s < 0) return 0.0;
  if (m == 0) return s == 0 ? 1.0 : 0.0;
  return (*cached_convolution(dist, m))(s);
}

double log_prob_tree(const OffspringDistribution& dist, const PlaneTree& t) {
  double total = 0.0;
  for (const Degree d : t.degrees()) {
    const double p = dist.p(d);
    if (!(p > 0.0)) return -kInf;
    total += std::log(p);
  }
  return total;
}

double prob_tree(const OffspringDistribution& dist, const PlaneTree& t) {
  double product = 1.0;
  for (const Degree d : t.degrees()) product *= dist.p(d);
  return product;
}

double log_prob_nonfringe_root(const OffspringDistribution& dist, const PlaneTree& t) {
  double total = 0.0;
  for (const Degree d : t.degrees()) {
    if (d == 0) continue;
    const double p = dist.p(d);
    if (!(p > 0.0)) return -kInf;
    total += std::log(p);
  }
  return total;
}

double prob_nonfringe_root(const OffspringDistribution& dist, const PlaneTree& t) {
  double product = 1.0;
  for (const Degree d : t.degrees()) {
    if (d > 0) product *= dist.p(d);
  }
  return product;
}

double prob_total_size(const OffspringDistribution& dist, std::uint64_t n) {
  if (n == 0) return 0.0;
  return prob_sum(dist, n, static_cast<std::int64_t>(n) - 1) / static_cast<double>(n);
}

double expected_fringe_count(const OffspringDistribution& dist, std::uint64_t n, const PlaneTree& t) {
  const double denom = denominator(dist, n);
  const auto k = static_cast<std::int64_t>(t.size());
  const auto nn = static_cast<std::int64_t>(n);
  if (k > nn) return 0.0;
  return scaled_ratio(dist, n, log_prob_tree(dist, t), nn - k, nn - k, denom);
}

double expected_fringe_size_count(const OffspringDistribution& dist, std::uint64_t n, std::size_t k) {
  const double denom = denominator(dist, n);
  const auto kk = static_cast<std::int64_t>(k);
  const auto nn = static_cast<std::int64_t>(n);
  if (k == 0 || kk > nn) return 0.0;
  const double size_prob = prob_total_size(dist, k);
  if (!(size_prob > 0.0)) return 0.0;
  return scaled_ratio(dist, n, std::log(size_prob), nn - kk, nn - kk, denom);
}

double expected_nonfringe_count(const OffspringDistribution& dist, std::uint64_t n, const PlaneTree& t) {
  const double denom = denominator(dist, n);
  const auto v = static_cast<std::int64_t>(t.internal_count());
  const auto l = static_cast<std::int64_t>(t.leaf_count());
  const auto nn = static_cast<std::int64_t>(n);
  if (v == 0) return static_cast<double>(n);
  return scaled_ratio(dist, n, log_prob_nonfringe_root(dist, t), nn - v, nn - v - l, denom);
}

std::vector<PlaneTree> t_boxplus_t(const PlaneTree& t) {
  const auto d = t.degrees();
  const auto sizes = subtree_sizes(d);
  std::set<PlaneTree> out;
  for (std::size_t v = 0; v < d.size(); ++v) {
    if (d[v] == 0) continue;
    const auto sub = d.subspan(v, sizes[v]);
    if (!embeds_at_root(d, sub)) continue;
    std::vector<Degree> spliced(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(v));
    spliced.insert(spliced.end(), d.begin(), d.end());
    spliced.insert(spliced.end(), d.begin() + static_cast<std::ptrdiff_t>(v + sizes[v]), d.end());
    PlaneTree candidate = PlaneTree::from_valid(std::move(spliced));
    if (candidate != t) out.insert(std::move(candidate));
  }
  return {out.begin(), out.end()};
}

MomentReport second_factorial_nonfringe(const OffspringDistribution& dist, std::uint64_t n,
                                        const PlaneTree& t) {
  const double denom = denominator(dist, n);
  MomentReport report;
  const auto nn = static_cast<std::int64_t>(n);
  const auto v = static_cast<std::int64_t>(t.internal_count());
  const auto l = static_cast<std::int64_t>(t.leaf_count());
  if (v == 0) {
    // A leaf pattern matches every node: N = n exactly.
    report.mean = static_cast<double>(n);
    report.second_factorial = static_cast<double>(n) * static_cast<double>(n - 1);
    report.variance = 0.0;
    return report;
  }
  report.mean = expected_nonfringe_count(dist, n, t);

  const double log_pi = log_prob_nonfringe_root(dist, t);
  double first = 0.0;
  if (nn - 2 * v + 1 > 0) {
    first = static_cast<double>(nn - 2 * v + 1) *
            scaled_ratio(dist, n, 2 * log_pi, nn - 2 * v, nn + 1 - 2 * (v + l), denom);
  }
  double second = 0.0;
  for (auto& overlap : t_boxplus_t(t)) {
    const auto v2 = static_cast<std::int64_t>(overlap.internal_count());
    const auto l2 = static_cast<std::int64_t>(overlap.leaf_count());
    const double term =
        2.0 * scaled_ratio(dist, n, log_prob_nonfringe_root(dist, overlap), nn - v2, nn - v2 - l2, denom);
    second += term;
    report.overlap_terms.emplace_back(std::move(overlap), term);
  }
  report.second_factorial = first + second;
  report.variance = report.second_factorial + report.mean - report.mean * report.mean;
  return report;
}

namespace {

struct PminDp {
  std::vector<double> g;                       // g[s]: min log pi over possible trees of size s
  std::vector<Degree> root_choice;             // root degree attaining g[s]
  std::vector<std::vector<double>> f;          // f[d][j]: min sum of g over compositions of j into d parts
  std::vector<std::vector<std::uint32_t>> first_part;  // first part size attaining f[d][j]
};

bool improves(double candidate, double best) {
  if (best == kInf) return candidate < kInf;
  return candidate < best - 1e-12 * std::max(1.0, std::abs(best));
}

PminDp run_pmin_dp(const OffspringDistribution& dist, std::size_t k) {
  if (k == 0) throw std::invalid_argument("pmin: k must be >= 1");
  if (k > kPminCap) throw std::length_error("pmin: k above cap");
  std::vector<Degree> degrees;
  for (const auto& a : dist.atoms()) {
    if (a.degree > 0 && a.degree < k) degrees.push_back(a.degree);
  }
  const std::size_t dmax = degrees.empty() ? 0 : degrees.back();

  PminDp dp;
  dp.g.assign(k + 1, kInf);
  dp.root_choice.assign(k + 1, 0);
  dp.f.assign(dmax + 1, std::vector<double>(k + 1, kInf));
  dp.first_part.assign(dmax + 1, std::vector<std::uint32_t>(k + 1, 0));

  for (std::size_t s = 1; s <= k; ++s) {
    if (s == 1) {
      dp.g[1] = std::log(dist.p(0));
    } else {
      for (const Degree d : degrees) {
        if (d > s - 1) break;
        const double rest = dp.f[d][s - 1];
        if (rest == kInf) continue;
        const double cand = std::log(dist.p(d)) + rest;
        if (improves(cand, dp.g[s])) {
          dp.g[s] = cand;
          dp.root_choice[s] = d;
        }
      }
    }
    // Compositions of j = s into d parts now have every g they need.
    if (dmax >= 1) {
      dp.f[1][s] = dp.g[s];
      dp.first_part[1][s] = static_cast<std::uint32_t>(s);
    }
    for (std::size_t d = 2; d <= std::min(dmax, s); ++d) {
      double best = kInf;
      std::uint32_t arg = 0;
      for (std::size_t a = 1; a + (d - 1) <= s; ++a) {
        if (dp.g[a] == kInf) continue;
        const double tail = dp.f[d - 1][s - a];
        if (tail == kInf) continue;
        const double cand = dp.g[a] + tail;
        if (improves(cand, best)) {
          best = cand;
          arg = static_cast<std::uint32_t>(a);
        }
      }
      dp.f[d][s] = best;
      dp.first_part[d][s] = arg;
    }
  }
  return dp;
}

void rebuild(const PminDp& dp, std::size_t s, std::vector<Degree>& out) {
  if (s == 1) {
    out.push_back(0);
    return;
  }
  const Degree d = dp.root_choice[s];
  out.push_back(d);
  std::size_t j = s - 1;
  for (Degree parts = d; parts >= 1; --parts) {
    const std::size_t a = parts == 1 ? j : dp.first_part[parts][j];
    rebuild(dp, a, out);
    j -= a;
  }
}

}  // namespace

PminResult pmin(const OffspringDistribution& dist, std::size_t k) {
  const PminDp dp = run_pmin_dp(dist, k);
  std::size_t best_size = 1;
  for (std::size_t s = 2; s <= k; ++s) {
    if (dp.g[s] != kInf && improves(dp.g[s], dp.g[best_size])) best_size = s;
  }
  std::vector<Degree> seq;
  seq.reserve(best_size);
  rebuild(dp, best_size, seq);
  PminResult result{PlaneTree::from_valid(std::move(seq)), std::exp(dp.g[best_size]), dp.g[best_size]};
  return result;
}

std::vector<double> log_pmin_table(const OffspringDistribution& dist, std::size_t k) {
  const PminDp dp = run_pmin_dp(dist, k);
  std::vector<double> out(k);
  double running = kInf;
  for (std::size_t s = 1; s <= k; ++s) {
    if (dp.g[s] != kInf && (running == kInf || dp.g[s] < running)) running = dp.g[s];
    out[s - 1] = running;
  }
  return out;
}

std::vector<double> poisson_pmf(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poisson_pmf: mu must be >= 0");
  if (mu == 0.0) return {1.0};
  const auto x_max = static_cast<std::size_t>(std::ceil(mu + 12.0 * std::sqrt(mu) + 40.0));
  std::vector<double> pmf(x_max + 1);
  const double log_mu = std::log(mu);
  for (std::size_t x = 0; x <= x_max; ++x) {
    pmf[x] = std::exp(static_cast<double>(x) * log_mu - mu - std::lgamma(static_cast<double>(x) + 1.0));
  }
  return pmf;
}

PoissonTv poisson_tv(double mu, double nu) {
  if (!(mu >= 0.0) || !(nu >= 0.0)) throw std::invalid_argument("poisson_tv: means must be >= 0");
  // Common support; beyond it both tails are far below 1e-12 and are dropped.
  const std::size_t len = poisson_pmf(std::max(mu, nu)).size();
  const auto pmf_on = [len](double m) {
    std::vector<double> out(len, 0.0);
    if (m == 0.0) {
      out[0] = 1.0;
      return out;
    }
    const double log_m = std::log(m);
    for (std::size_t x = 0; x < len; ++x) {
      out[x] = std::exp(static_cast<double>(x) * log_m - m - std::lgamma(static_cast<double>(x) + 1.0));
    }
    return out;
  };
  const auto pa = pmf_on(mu), pb = pmf_on(nu);
  double diff = 0.0;
  for (std::size_t x = 0; x < len; ++x) diff += std::abs(pa[x] - pb[x]);
  return {std::min(1.0, 0.5 * diff), std::abs(std::sqrt(mu) - std::sqrt(nu))};
}

CouponBounds coupon_bounds(std::span<const double> probs, double m) {
  double miss = 0.0;
  for (const double p : probs) {
    if (!(p > 0.0)) throw std::invalid_argument("coupon_bounds: probabilities must be positive");
    miss += std::pow(1.0 - std::min(p, 1.0), m);
  }
  CouponBounds b;
  b.lower = 1.0 - miss;
  b.upper = miss > 0.0 ? std::min(1.0, 1.0 / miss) : 1.0;
  return b;
}

double alpha_r(const OffspringDistribution& dist, std::uint32_t r) {
  if (r < 2) throw std::invalid_argument("alpha_r: r must be >= 2");
  const double pr = dist.p(r);
  if (!(pr > 0.0)) throw ConfigError("alpha_r: p_" + std::to_string(r) + " = 0");
  const double inner = std::log(1.0 / dist.p(0)) + std::log(1.0 / pr) / (r - 1.0);
  return std::log(inner) / std::log(static_cast<double>(r));
}

std::string to_string(KRegime regime) {
  switch (regime) {
    case KRegime::automatic:
      return "automatic";
    case KRegime::well_behaved:
      return "well-behaved";
    case KRegime::first_order:
      return "first-order";
    case KRegime::super_exponential:
      return "super-exponential";
    case KRegime::cayley:
      return "cayley";
  }
  return "unknown";
}

namespace {

struct PowerFit {
  double scale = 0.0, exponent = 0.0, residual = kInf;
};

// Fits log(1/p_i) ~ c + a i^b over the tail of the support by grid search on b
// with linear least squares for (c, a).
PowerFit fit_power_tail(const OffspringDistribution& dist) {
  std::vector<double> xs, ys;
  for (const auto& at : dist.atoms()) {
    if (at.degree >= 2 && at.probability > 1e-300) {
      xs.push_back(at.degree);
      ys.push_back(-std::log(at.probability));
    }
  }
  PowerFit best;
  if (xs.size() < 3) return best;
  for (double b = 1.0; b <= 4.0 + 1e-9; b += 0.005) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double u = std::pow(xs[i], b);
      sx += u;
      sy += ys[i];
      sxx += u * u;
      sxy += u * ys[i];
    }
    const double det = cnt * sxx - sx * sx;
    if (det <= 0) continue;
    const double a = (cnt * sxy - sx * sy) / det;
    const double c = (sy - a * sx) / cnt;
    double res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (c + a * std::pow(xs[i], b));
      res += e * e;
    }
    if (res < best.residual) best = {a, b, res};
  }
  return best;
}

// Fits log(1/p^min_i) = gamma i ln i + beta ln i + c over i in [lo, hi].
double fit_cayley_gamma(const OffspringDistribution& dist) {
  const std::size_t hi = std::min<std::size_t>(60, dist.max_degree() + 1);
  const std::size_t lo = std::max<std::size_t>(5, hi / 4);
  if (hi < lo + 3) throw ConfigError("predict_K: support too short to fit a Cayley-type tail");
  const auto table = log_pmin_table(dist, hi);
  // Normal equations for three regressors.
  double A[3][3] = {}, rhs[3] = {};
  for (std::size_t i = lo; i <= hi; ++i) {
    const double li = std::log(static_cast<double>(i));
    const double x[3] = {static_cast<double>(i) * li, li, 1.0};
    const double y = -table[i - 1];
    for (int r = 0; r < 3; ++r) {
      rhs[r] += x[r] * y;
      for (int c = 0; c < 3; ++c) A[r][c] += x[r] * x[c];
    }
  }
  // Gaussian elimination.
  for (int p = 0; p < 3; ++p) {
    for (int r = p + 1; r < 3; ++r) {
      const double factor = A[r][p] / A[p][p];
      for (int c = p; c < 3; ++c) A[r][c] -= factor * A[p][c];
      rhs[r] -= factor * rhs[p];
    }
  }
  double sol[3];
  for (int r = 2; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < 3; ++c) acc -= A[r][c] * sol[c];
    sol[r] = acc / A[r][r];
  }
  return sol[0];
}

double first_order_value(double n, double alpha, double beta, double gamma) {
  const double m = std::log(n);
  const double base = m / std::pow(std::log(m), beta);
  return std::pow(base, 1.0 / alpha) * std::pow(std::pow(alpha, beta) / gamma, 1.0 / alpha);
}

}  // namespace

KPrediction predict_K(const OffspringDistribution& dist, double n, const KHint& hint) {
  if (!(n >= 3.0)) throw std::invalid_argument("predict_K: n must be >= 3");
  const DistributionConstants c = constants(dist, 2);
  const double m = std::log(n);
  KPrediction out;
  KRegime regime = hint.regime;
  if (regime == KRegime::automatic) {
    out.heuristic = true;
    if (c.well_behaved() && c.L > 0.0) {
      regime = KRegime::well_behaved;
    } else if (c.L > 0.0 && !c.L_truncated) {
      regime = KRegime::first_order;
    } else {
      const PowerFit fit = fit_power_tail(dist);
      regime = fit.exponent >= 1.5 ? KRegime::super_exponential : KRegime::cayley;
    }
  }
  out.regime = regime;
  switch (regime) {
    case KRegime::well_behaved: {
      if (!(c.L > 0.0)) throw ConfigError("predict_K: well-behaved regime needs L > 0");
      out.gamma = std::log(1.0 / c.L);
      out.value = (m - std::log(m)) / out.gamma;
      out.note = "(ln n - ln ln n) / ln(1/L)";
      break;
    }
    case KRegime::first_order: {
      out.alpha = hint.alpha.value_or(1.0);
      out.beta = hint.beta.value_or(0.0);
      if (hint.gamma) {
        out.gamma = *hint.gamma;
      } else if (c.L > 0.0) {
        out.gamma = std::log(1.0 / c.L);
      } else {
        throw ConfigError("predict_K: first-order regime needs gamma when L = 0");
      }
      out.value = first_order_value(n, out.alpha, out.beta, out.gamma);
      out.note = "first-order only";
      break;
    }
    case KRegime::super_exponential: {
      const PowerFit fit = fit_power_tail(dist);
      if (!(fit.scale > 0.0)) throw ConfigError("predict_K: could not fit a super-exponential tail");
      out.f_scale = fit.scale;
      out.f_exponent = fit.exponent;
      out.value = std::pow(m / fit.scale, 1.0 / fit.exponent);
      out.note = "f^{-1}(ln n) with f(i) = a i^b";
      break;
    }
    case KRegime::cayley: {
      out.gamma = hint.gamma ? *hint.gamma : fit_cayley_gamma(dist);
      const double m1 = std::log(m / out.gamma);
      const double m2 = std::log(m1);
      if (!(m1 > 1.0) || !(m1 > m2)) {
        // Refined centerline undefined this small; fall back to the first-order law.
        out.regime = KRegime::first_order;
        out.alpha = 1.0;
        out.beta = 1.0;
        out.value = first_order_value(n, 1.0, 1.0, out.gamma);
        out.note = "first-order only (n too small for the refined Cayley centerline)";
        break;
      }
      out.alpha = 1.0;
      out.beta = 1.0;
      out.value = m / (out.gamma * (m1 - m2)) * (1.0 - m2 / (m1 * (m1 - m2)));
      out.note = "m/(gamma (m1 - m2)) (1 - m2/(m1 (m1 - m2)))";
      break;
    }
    case KRegime::automatic:
      break;
  }
  return out;
}

std::uint64_t trinomial_tree_count(std::uint64_t k, std::uint64_t n0, std::uint64_t ni, std::uint64_t nj,
                                   std::uint64_t i, std::uint64_t j) {
  if (k == 0 || n0 + ni + nj != k || i * ni + j * nj != k - 1) {
    throw std::invalid_argument("trinomial_tree_count: counts do not describe a tree of size k");
  }
  using u128 = unsigned __int128;
  constexpr u128 kLimit = ~u128{0} / 2;
  const auto binom = [&](std::uint64_t n, std::uint64_t r) {
    r = std::min(r, n - r);
    u128 acc = 1;
    for (std::uint64_t t = 1; t <= r; ++t) {
      if (acc > kLimit / (n - r + t)) throw std::overflow_error("trinomial_tree_count: overflow");
      acc = acc * (n - r + t) / t;
    }
    return acc;
  };
  const u128 a = binom(k, n0);
  const u128 b = binom(k - n0, ni);
  if (b != 0 && a > kLimit / b) throw std::overflow_error("trinomial_tree_count: overflow");
  const u128 total = a * b;
  if (total % k != 0) throw std::logic_error("trinomial_tree_count: multinomial not divisible by k");
  const u128 result = total / k;
  if (result > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("trinomial_tree_count: overflow");
  return static_cast<std::uint64_t>(result);
}

}  // namespace gwforest
