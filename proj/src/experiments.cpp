#include "gwforest/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gwforest/census.hpp"
#include "gwforest/exact.hpp"
#include "gwforest/rules.hpp"
#include "gwforest/sampler.hpp"

namespace gwforest {
namespace {

using Clock = std::chrono::steady_clock;

// Runs body(i, rng) for every replicate i with its own derived stream.
// Output order depends only on i, so any thread count gives the same vector.
std::vector<std::uint64_t> run_replicates(std::uint64_t count, std::uint64_t master, unsigned threads,
                                          const std::function<std::uint64_t(Rng&)>& body) {
  std::vector<std::uint64_t> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(count, 1)));

  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::uint64_t error_index = count;
  std::exception_ptr error;
  constexpr std::uint64_t kChunk = 16;

  const auto worker = [&] {
    while (true) {
      const std::uint64_t begin = next.fetch_add(kChunk);
      if (begin >= count) return;
      const std::uint64_t end = std::min(count, begin + kChunk);
      for (std::uint64_t i = begin; i < end; ++i) {
        try {
          Rng rng(derive_seed(master, i));
          out[i] = body(rng);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
          next.store(count);
          return;
        }
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

ExperimentRow summarize(std::uint64_t n, std::string statistic, std::vector<std::uint64_t> values) {
  ExperimentRow row;
  row.n = n;
  row.statistic = std::move(statistic);
  const double count = static_cast<double>(values.size());
  long double s1 = 0;
  for (const auto v : values) {
    ++row.histogram[v];
    s1 += v;
  }
  row.mean = static_cast<double>(s1 / count);
  long double m2 = 0, m3 = 0;
  for (const auto v : values) {
    const long double d = static_cast<long double>(v) - row.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double pop_var = static_cast<double>(m2 / count);
  row.variance = values.size() > 1 ? static_cast<double>(m2 / (count - 1)) : 0.0;
  row.skewness = pop_var > 0 ? static_cast<double>(m3 / count) / std::pow(pop_var, 1.5) : 0.0;

  std::sort(values.begin(), values.end());
  const std::pair<const char*, double> levels[] = {{"q05", 0.05}, {"q25", 0.25}, {"median", 0.5},
                                                   {"q75", 0.75}, {"q95", 0.95}};
  for (const auto& [name, p] : levels) {
    const auto idx = static_cast<std::size_t>(std::max(1.0, std::ceil(p * count))) - 1;
    row.quantiles[name] = static_cast<double>(values[idx]);
  }
  return row;
}

void attach_poisson(ExperimentRow& row, double mu, std::uint64_t replicates) {
  const auto po = poisson_pmf(mu);
  const double total = static_cast<double>(replicates);
  double diff = 0.0, covered = 0.0;
  std::size_t support = 0;
  for (std::size_t x = 0; x < po.size(); ++x) {
    const auto it = row.histogram.find(x);
    const double emp = it == row.histogram.end() ? 0.0 : static_cast<double>(it->second) / total;
    diff += std::abs(emp - po[x]);
    covered += po[x];
    if (po[x] > 1e-12 || emp > 0) ++support;
  }
  for (const auto& [x, c] : row.histogram) {
    if (x >= po.size()) {
      diff += static_cast<double>(c) / total;
      ++support;
    }
  }
  diff += std::max(0.0, 1.0 - covered);
  row.reference_mean = mu;
  row.tv = std::clamp(0.5 * diff, 0.0, 1.0);
  row.tv_bias_bound = 0.5 * std::sqrt(static_cast<double>(support) / total);
}

double fraction_where(const ExperimentRow& row, const std::function<bool(std::uint64_t)>& pred) {
  std::uint64_t hits = 0, total = 0;
  for (const auto& [x, c] : row.histogram) {
    total += c;
    if (pred(x)) hits += c;
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

std::uint64_t row_master(const RunOptions& opts, std::uint64_t n) { return derive_seed(opts.seed, n); }

ExperimentSummary start(std::string kind, const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                        std::string rule, const RunOptions& opts) {
  if (n_list.empty()) throw ConfigError("experiment needs at least one n");
  if (opts.replicates == 0) throw ConfigError("experiment needs at least one replicate");
  for (const auto n : n_list) {
    if (n == 0 || (n - 1) % dist.span() != 0) {
      throw ConfigError("n = " + std::to_string(n) + " is not 1 mod span " + std::to_string(dist.span()) +
                        " of " + dist.name());
    }
  }
  ExperimentSummary s;
  s.kind = std::move(kind);
  s.distribution = dist.name();
  s.pmf = dist.to_pmf_string();
  s.n_values = n_list;
  s.rule = std::move(rule);
  s.replicates = opts.replicates;
  s.seed = opts.seed;
  return s;
}

PlaneTree draw(const OffspringDistribution& dist, std::uint64_t n, const RunOptions& opts, Rng& rng) {
  SampleConfig cfg;
  cfg.n = n;
  cfg.max_rejections = opts.max_rejections;
  return sample_conditional(dist, cfg, rng);
}

void flag_large_pattern(ExperimentRow& row, std::size_t k, std::uint64_t n) {
  if (static_cast<double>(k) > 0.1 * static_cast<double>(n)) {
    row.warnings.push_back("pattern size " + std::to_string(k) + " exceeds n/10");
  }
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

bool same_results(const ExperimentSummary& a, const ExperimentSummary& b) {
  if (a.kind != b.kind || a.pmf != b.pmf || a.n_values != b.n_values || a.rule != b.rule ||
      a.replicates != b.replicates || a.seed != b.seed || a.parameters != b.parameters ||
      a.rows.size() != b.rows.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.n != y.n || x.statistic != y.statistic || x.pattern != y.pattern || x.histogram != y.histogram ||
        x.mean != y.mean || x.variance != y.variance || x.quantiles != y.quantiles || x.tv != y.tv ||
        x.diagnostics != y.diagnostics) {
      return false;
    }
  }
  return true;
}

ExperimentSummary run_poisson_regimes(const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                                      const std::string& pattern_rule, const RunOptions& opts) {
  const auto t0 = Clock::now();
  const PatternRule rule = PatternRule::parse(pattern_rule);
  ExperimentSummary s = start("poisson", dist, n_list, pattern_rule, opts);
  for (const auto n : n_list) {
    const PlaneTree pattern = rule(static_cast<double>(n), dist);
    const auto values = run_replicates(opts.replicates, row_master(opts, n), opts.threads, [&](Rng& rng) {
      return count_fringe(draw(dist, n, opts, rng), pattern);
    });
    ExperimentRow row = summarize(n, "fringe_count", values);
    row.pattern = pattern.to_string();
    flag_large_pattern(row, pattern.size(), n);
    const double n_pi = static_cast<double>(n) * prob_tree(dist, pattern);
    attach_poisson(row, n_pi, opts.replicates);
    row.diagnostics["n_pi"] = n_pi;
    row.diagnostics["exact_mean"] = expected_fringe_count(dist, n, pattern);
    row.diagnostics["variance_over_mean"] = row.mean > 0 ? row.variance / row.mean : 0.0;
    row.diagnostics["zero_fraction"] = fraction_where(row, [](std::uint64_t x) { return x == 0; });
    row.diagnostics["standardized_skewness"] = row.skewness;
    s.rows.push_back(std::move(row));
  }
  s.runtime_seconds = seconds_since(t0);
  return s;
}

ExperimentSummary run_size_class(const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                                 const std::string& k_rule, const RunOptions& opts) {
  const auto t0 = Clock::now();
  const Expression rule = Expression::parse(k_rule);
  ExperimentSummary s = start("sizeclass", dist, n_list, k_rule, opts);
  for (const auto n : n_list) {
    const auto k = static_cast<std::size_t>(as_count(rule(static_cast<double>(n)), "k"));
    if (k == 0) throw ConfigError("size class k must be >= 1");
    const auto values = run_replicates(opts.replicates, row_master(opts, n), opts.threads, [&](Rng& rng) {
      return count_fringe_size(draw(dist, n, opts, rng), k);
    });
    ExperimentRow row = summarize(n, "size_class_count", values);
    row.pattern = "S_" + std::to_string(k);
    flag_large_pattern(row, k, n);
    const double pi_sk = prob_total_size(dist, k);
    attach_poisson(row, static_cast<double>(n) * pi_sk, opts.replicates);
    row.diagnostics["k"] = static_cast<double>(k);
    row.diagnostics["pi_S_k"] = pi_sk;
    row.diagnostics["exact_mean"] = expected_fringe_size_count(dist, n, k);
    row.diagnostics["mean_over_n"] = row.mean / static_cast<double>(n);
    row.diagnostics["variance_over_mean"] = row.mean > 0 ? row.variance / row.mean : 0.0;
    s.rows.push_back(std::move(row));
  }
  s.runtime_seconds = seconds_since(t0);
  return s;
}

ExperimentSummary run_nonfringe_concentration(const OffspringDistribution& dist,
                                              const std::vector<std::uint64_t>& n_list,
                                              const std::string& pattern_rule, const RunOptions& opts) {
  const auto t0 = Clock::now();
  const PatternRule rule = PatternRule::parse(pattern_rule);
  ExperimentSummary s = start("nonfringe", dist, n_list, pattern_rule, opts);
  for (const auto n : n_list) {
    const PlaneTree pattern = rule(static_cast<double>(n), dist);
    const auto values = run_replicates(opts.replicates, row_master(opts, n), opts.threads, [&](Rng& rng) {
      return count_nonfringe(draw(dist, n, opts, rng), pattern);
    });
    ExperimentRow row = summarize(n, "nonfringe_count", values);
    row.pattern = pattern.to_string();
    flag_large_pattern(row, pattern.size(), n);
    const double n_pi = static_cast<double>(n) * prob_nonfringe_root(dist, pattern);
    attach_poisson(row, n_pi, opts.replicates);
    row.diagnostics["n_pi_nf"] = n_pi;
    row.diagnostics["mean_ratio"] = n_pi > 0 ? row.mean / n_pi : 0.0;
    row.diagnostics["ratio_within_10pct"] = fraction_where(row, [n_pi](std::uint64_t x) {
      const double r = static_cast<double>(x) / n_pi;
      return r >= 0.9 && r <= 1.1;
    });
    row.diagnostics["zero_fraction"] = fraction_where(row, [](std::uint64_t x) { return x == 0; });
    row.diagnostics["variance_over_mean"] = row.mean > 0 ? row.variance / row.mean : 0.0;
    const MomentReport moments = second_factorial_nonfringe(dist, n, pattern);
    row.diagnostics["exact_mean"] = moments.mean;
    row.diagnostics["exact_variance"] = moments.variance;
    const bool is_chain = std::all_of(pattern.degrees().begin(), pattern.degrees().end(),
                                      [](Degree d) { return d <= 1; });
    if (is_chain && pattern.size() > 1) {
      const double p1 = dist.p(1);
      row.diagnostics["chain_inflation_reference"] = (1 + p1) / (1 - p1);
    }
    s.rows.push_back(std::move(row));
  }
  s.runtime_seconds = seconds_since(t0);
  return s;
}

ExperimentSummary run_heights(const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                              std::uint32_t r, HeightMode mode, const RunOptions& opts) {
  if (r == 0) throw ConfigError("heights: r must be >= 1");
  const auto t0 = Clock::now();
  const bool fringe = mode == HeightMode::fringe;
  ExperimentSummary s = start("heights", dist, n_list, "", opts);
  s.parameters["r"] = std::to_string(r);
  s.parameters["mode"] = fringe ? "fringe" : "nonfringe";
  for (const auto n : n_list) {
    const auto values = run_replicates(opts.replicates, row_master(opts, n), opts.threads, [&](Rng& rng) {
      const PlaneTree t = draw(dist, n, opts, rng);
      return std::uint64_t{fringe ? max_r_ary_fringe_height(t, r) : max_r_ary_nonfringe_height(t, r)};
    });
    ExperimentRow row = summarize(n, fringe ? "H" : "H_nf", values);
    row.pattern = "complete " + std::to_string(r) + "-ary";
    if (!dist.supports(r)) {
      row.warnings.push_back("p_" + std::to_string(r) + " = 0: heights are identically 0");
    } else {
      const double ln_n = std::log(static_cast<double>(n));
      double centerline;
      if (r == 1) {
        if (dist.p(1) >= 1.0) throw ConfigError("heights: p_1 = 1");
        centerline = ln_n / std::log(1.0 / dist.p(1));
      } else {
        centerline = std::log(ln_n) / std::log(static_cast<double>(r));
        row.diagnostics["log_r_log_n"] = centerline;
        if (fringe) {
          const double a = alpha_r(dist, r);
          row.diagnostics["alpha_r"] = a;
          centerline -= a;
        }
      }
      row.diagnostics["centerline"] = centerline;
      row.diagnostics["median_over_centerline"] = row.quantiles["median"] / centerline;
      row.diagnostics["ratio_within_20pct"] = fraction_where(row, [centerline](std::uint64_t x) {
        const double q = static_cast<double>(x) / centerline;
        return q >= 0.8 && q <= 1.2;
      });
    }
    s.rows.push_back(std::move(row));
  }
  s.runtime_seconds = seconds_since(t0);
  return s;
}

ExperimentSummary run_Kn(const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                         std::size_t k_cap, const RunOptions& opts) {
  if (k_cap == 0 || k_cap > kMaxKCap) {
    throw ConfigError("K_n: k_cap must lie in [1, " + std::to_string(kMaxKCap) + "]");
  }
  const auto t0 = Clock::now();
  ExperimentSummary s = start("kn", dist, n_list, "", opts);
  s.parameters["k_cap"] = std::to_string(k_cap);
  for (const auto n : n_list) {
    std::atomic<std::uint64_t> saturated{0};
    const auto values = run_replicates(opts.replicates, row_master(opts, n), opts.threads, [&](Rng& rng) {
      const KResult k = compute_K(draw(dist, n, opts, rng), dist, k_cap);
      if (k.saturated) saturated.fetch_add(1, std::memory_order_relaxed);
      return std::uint64_t{k.K};
    });
    ExperimentRow row = summarize(n, "K", values);
    row.diagnostics["saturated_fraction"] =
        static_cast<double>(saturated.load()) / static_cast<double>(opts.replicates);
    if (saturated.load() > 0) row.warnings.push_back("some replicates reached k_cap; K is a lower bound there");
    if (n >= 3) {
      try {
        const KPrediction p = predict_K(dist, static_cast<double>(n));
        row.diagnostics["centerline"] = p.value;
        row.diagnostics["centerline_heuristic"] = p.heuristic ? 1.0 : 0.0;
        row.pattern = "regime " + to_string(p.regime);
      } catch (const ConfigError& e) {
        row.warnings.push_back(std::string("no centerline: ") + e.what());
      }
    }
    s.rows.push_back(std::move(row));
  }
  s.runtime_seconds = seconds_since(t0);
  return s;
}

std::string to_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out.precision(17);
  out << "n,statistic,key,value\n";
  for (const auto& row : s.rows) {
    const auto put = [&](const std::string& key, double v) {
      out << row.n << ',' << row.statistic << ',' << key << ',' << v << '\n';
    };
    put("mean", row.mean);
    put("variance", row.variance);
    put("skewness", row.skewness);
    for (const auto& [k, v] : row.quantiles) put(k, v);
    if (row.reference_mean) put("reference_mean", *row.reference_mean);
    if (row.tv) put("tv", *row.tv);
    if (row.tv_bias_bound) put("tv_bias_bound", *row.tv_bias_bound);
    for (const auto& [k, v] : row.diagnostics) put(k, v);
    for (const auto& [x, c] : row.histogram) put("hist_" + std::to_string(x), static_cast<double>(c));
  }
  return out.str();
}

std::string to_json(const ExperimentSummary& s, int indent) {
  nlohmann::ordered_json j;
  j["config"] = {{"kind", s.kind},       {"distribution", s.distribution}, {"pmf", s.pmf},
                 {"n", s.n_values},      {"rule", s.rule},                 {"replicates", s.replicates},
                 {"seed", s.seed},       {"parameters", s.parameters}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : s.rows) {
    nlohmann::ordered_json r;
    r["n"] = row.n;
    r["statistic"] = row.statistic;
    if (!row.pattern.empty()) r["pattern"] = row.pattern;
    r["mean"] = row.mean;
    r["variance"] = row.variance;
    r["skewness"] = row.skewness;
    r["quantiles"] = row.quantiles;
    if (row.reference_mean) r["reference_mean"] = *row.reference_mean;
    if (row.tv) r["tv"] = *row.tv;
    if (row.tv_bias_bound) r["tv_bias_bound"] = *row.tv_bias_bound;
    auto hist = nlohmann::ordered_json::object();
    for (const auto& [x, c] : row.histogram) hist[std::to_string(x)] = c;
    r["histogram"] = hist;
    r["diagnostics"] = row.diagnostics;
    if (!row.warnings.empty()) r["warnings"] = row.warnings;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["runtime_seconds"] = s.runtime_seconds;
  return j.dump(indent);
}

}  // namespace gwforest
