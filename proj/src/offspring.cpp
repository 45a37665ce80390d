#include "gwforest/offspring.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace gwforest {
namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kMeanTolerance = 1e-9;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

double parse_probability(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_number(text);
  const double num = parse_number(text.substr(0, slash));
  const double den = parse_number(text.substr(slash + 1));
  if (den == 0.0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xFF;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Truncates an unbounded pmf given by `term(i)` at the first index whose
// remaining tail is <= eps. `tail(i)` returns sum_{j > i} p_j computed directly
// (not as 1 - prefix, which cancels catastrophically for tiny eps).
template <class Term, class Tail>
OffspringDistribution truncate_unbounded(std::string name, double eps, Term term, Tail tail) {
  if (!(eps > 0.0) || eps >= 1e-3) throw ConfigError("tail_epsilon must lie in (0, 1e-3)");
  std::vector<Atom> atoms;
  double removed = 0.0;
  for (Degree i = 0;; ++i) {
    const double p = term(i);
    if (!(p > 0.0)) {
      removed = tail(i == 0 ? 0 : i - 1);
      break;
    }
    atoms.push_back({i, p});
    const double rest = tail(i);
    if (rest <= eps) {
      removed = rest;
      break;
    }
  }
  const double kept = 1.0 - removed;
  for (auto& a : atoms) a.probability /= kept;
  return OffspringDistribution::from_atoms(std::move(atoms), std::move(name), SupportKind::unbounded,
                                           eps, removed);
}

}  // namespace

OffspringDistribution OffspringDistribution::from_atoms(std::vector<Atom> atoms, std::string name,
                                                        SupportKind kind, double tail_epsilon,
                                                        double truncated_mass) {
  std::erase_if(atoms, [](const Atom& a) { return a.probability == 0.0; });
  if (atoms.empty()) throw ConfigError("offspring law has no atoms");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.degree < b.degree; });
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].probability > 0.0) || atoms[i].probability > 1.0 || !std::isfinite(atoms[i].probability)) {
      throw ConfigError("probability for degree " + std::to_string(atoms[i].degree) + " outside (0, 1]");
    }
    if (i > 0 && atoms[i].degree == atoms[i - 1].degree) {
      throw ConfigError("degree " + std::to_string(atoms[i].degree) + " listed twice");
    }
  }

  OffspringDistribution dist;
  dist.name_ = std::move(name);
  dist.kind_ = kind;
  dist.tail_epsilon_ = tail_epsilon;
  dist.truncated_mass_ = truncated_mass;
  dist.dense_.assign(atoms.back().degree + 1, 0.0);

  double total = 0.0, first = 0.0, second = 0.0;
  std::uint32_t g = 0;
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& a : atoms) {
    dist.dense_[a.degree] = a.probability;
    total += a.probability;
    first += a.degree * a.probability;
    second += static_cast<double>(a.degree) * a.degree * a.probability;
    if (a.degree > 0) g = std::gcd(g, a.degree);
    dist.p_max_ = std::max(dist.p_max_, a.probability);
    h = fnv1a(h, a.degree);
    h = fnv1a(h, std::bit_cast<std::uint64_t>(a.probability));
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "probabilities sum to " << total << ", expected 1";
    throw ConfigError(msg.str());
  }
  if (std::abs(first - 1.0) > kMeanTolerance) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "offspring mean is " << first << ", expected 1 (critical law)";
    throw ConfigError(msg.str());
  }
  dist.mean_ = first;
  dist.variance_ = second - first * first;
  if (!(dist.variance_ > 1e-12)) throw ConfigError("offspring variance must be positive");
  dist.span_ = g;
  dist.fingerprint_ = h;
  dist.atoms_ = std::move(atoms);

  // Vose alias construction.
  const std::size_t m = dist.atoms_.size();
  dist.alias_threshold_.assign(m, 1.0);
  dist.alias_index_.resize(m);
  std::vector<double> scaled(m);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < m; ++i) {
    scaled[i] = dist.atoms_[i].probability / total * static_cast<double>(m);
    dist.alias_index_[i] = static_cast<std::uint32_t>(i);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    dist.alias_threshold_[s] = scaled[s];
    dist.alias_index_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  return dist;
}

OffspringDistribution OffspringDistribution::parse_pmf(std::string_view text) {
  std::vector<Atom> atoms;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError("expected 'degree:probability', got '" + std::string(item) + "'");
    }
    const double degree = parse_number(item.substr(0, colon));
    if (degree < 0 || degree != std::floor(degree) || degree > 1e9) {
      throw ConfigError("bad degree in '" + std::string(item) + "'");
    }
    atoms.push_back({static_cast<Degree>(degree), parse_probability(item.substr(colon + 1))});
  }
  return from_atoms(std::move(atoms));
}

Degree OffspringDistribution::sample(Rng& rng) const noexcept {
  const std::uint64_t column = rng.below(atoms_.size());
  const double u = rng.uniform();
  const std::uint32_t pick = u < alias_threshold_[column] ? static_cast<std::uint32_t>(column)
                                                          : alias_index_[column];
  return atoms_[pick].degree;
}

std::string OffspringDistribution::to_pmf_string() const {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) out << ',';
    out << atoms_[i].degree << ':' << atoms_[i].probability;
  }
  return out.str();
}

Degree sample_degree(const OffspringDistribution& dist, Rng& rng) noexcept { return dist.sample(rng); }

OffspringDistribution builtin(Builtin which, std::uint32_t d, double tail_epsilon) {
  switch (which) {
    case Builtin::full_binary:
      return OffspringDistribution::from_atoms({{0, 0.5}, {2, 0.5}}, "full-binary");
    case Builtin::motzkin:
      return OffspringDistribution::from_atoms({{0, 1.0 / 3}, {1, 1.0 / 3}, {2, 1.0 / 3}}, "motzkin");
    case Builtin::d_ary: {
      if (d < 2) throw ConfigError("d-ary law needs d >= 2");
      if (d > 1000) throw ConfigError("d-ary law: d too large");
      std::vector<Atom> atoms;
      const double q = 1.0 / d;
      for (Degree i = 0; i <= d; ++i) {
        const double log_p = std::lgamma(d + 1.0) - std::lgamma(i + 1.0) - std::lgamma(d - i + 1.0) +
                             i * std::log(q) + (d - i) * std::log1p(-q);
        atoms.push_back({i, std::exp(log_p)});
      }
      // lgamma round-off: renormalise onto the simplex.
      double total = 0.0;
      for (const auto& a : atoms) total += a.probability;
      for (auto& a : atoms) a.probability /= total;
      return OffspringDistribution::from_atoms(std::move(atoms), std::to_string(d) + "-ary");
    }
    case Builtin::plane:
      // p_i = 2^{-(i+1)}, tail after i is 2^{-(i+1)}.
      return truncate_unbounded(
          "plane", tail_epsilon, [](Degree i) { return std::ldexp(1.0, -static_cast<int>(i) - 1); },
          [](Degree i) { return std::ldexp(1.0, -static_cast<int>(i) - 1); });
    case Builtin::labeled: {
      auto term = [](Degree i) { return std::exp(-1.0 - std::lgamma(i + 1.0)); };
      auto tail = [term](Degree i) {
        double rest = 0.0;
        for (Degree j = i + 1; j < i + 60; ++j) {
          const double t = term(j);
          rest += t;
          if (t < rest * 1e-18) break;
        }
        return rest;
      };
      return truncate_unbounded("labeled", tail_epsilon, term, tail);
    }
  }
  throw ConfigError("unknown builtin");
}

OffspringDistribution parse_distribution(std::string_view text, double tail_epsilon) {
  text = trim(text);
  if (text == "plane") return builtin(Builtin::plane, 2, tail_epsilon);
  if (text == "full-binary" || text == "binary") return builtin(Builtin::full_binary);
  if (text == "motzkin") return builtin(Builtin::motzkin);
  if (text == "labeled" || text == "cayley") return builtin(Builtin::labeled, 2, tail_epsilon);
  std::string_view digits;
  if (text.starts_with("d-ary:")) {
    digits = text.substr(6);
  } else if (text.ends_with("-ary")) {
    digits = text.substr(0, text.size() - 4);
  }
  if (!digits.empty()) {
    const double d = parse_number(digits);
    if (d != std::floor(d) || d < 0) throw ConfigError("bad d in '" + std::string(text) + "'");
    return builtin(Builtin::d_ary, static_cast<std::uint32_t>(d));
  }
  if (text.find(':') != std::string_view::npos) return OffspringDistribution::parse_pmf(text);
  throw ConfigError("unknown distribution '" + std::string(text) + "'");
}

double L_candidate(const OffspringDistribution& dist, Degree i) {
  const double p0 = dist.p(0);
  const double pi = dist.p(i);
  if (i == 0 || !(pi > 0.0)) return std::numeric_limits<double>::infinity();
  const double inv = 1.0 / static_cast<double>(i);
  return std::exp((1.0 - inv) * std::log(p0) + inv * std::log(pi));
}

DistributionConstants constants(const OffspringDistribution& dist, std::uint32_t k_max) {
  DistributionConstants c;
  c.sigma2 = dist.variance();
  c.span = dist.span();
  c.p_max = dist.p_max();

  const double p0 = dist.p(0);
  double best = p0;
  Degree best_index = 0;
  for (const auto& a : dist.atoms()) {
    if (a.degree == 0) continue;
    const double v = L_candidate(dist, a.degree);
    if (v < best) {
      best = v;
      best_index = a.degree;
    }
  }
  c.L = best;
  for (const auto& a : dist.atoms()) {
    if (a.degree > 0 && std::abs(L_candidate(dist, a.degree) - c.L) <= 1e-12) {
      c.kappa = a.degree;
      break;
    }
  }
  if (dist.support_kind() == SupportKind::unbounded && c.kappa && *c.kappa == dist.max_degree() &&
      best_index == dist.max_degree()) {
    // The infimum is only reached at the truncation point: not attained.
    c.kappa.reset();
    c.L_truncated = true;
  }

  c.L_k.reserve(k_max);
  double running = p0;
  for (std::uint32_t k = 1; k <= k_max; ++k) {
    if (k >= 2) running = std::min(running, L_candidate(dist, k - 1));
    c.L_k.push_back(running);
  }
  return c;
}

}  // namespace gwforest
