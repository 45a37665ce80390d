// gwforest: command-line front end for the conditional Galton-Watson tree library.

#include <cmath>
#include <cstdio>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwforest/census.hpp"
#include "gwforest/exact.hpp"
#include "gwforest/experiments.hpp"
#include "gwforest/kernels.hpp"
#include "gwforest/oracle.hpp"
#include "gwforest/rules.hpp"
#include "gwforest/sampler.hpp"

namespace gw = gwforest;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitExhausted = 3;

gw::OffspringDistribution load_dist(const std::string& spec, double tail_eps) {
  return gw::parse_distribution(spec, tail_eps);
}

std::vector<std::uint64_t> parse_n_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // Accept "1e5" style values as well as plain integers.
    double v = 0;
    try {
      v = std::stod(item);
    } catch (const std::exception&) {
      throw gw::ConfigError("bad n value \"" + item + "\"");
    }
    out.push_back(gw::as_count(v, "n"));
  }
  if (out.empty()) throw gw::ConfigError("empty n list");
  return out;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw gw::ConfigError("cannot write " + path);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::vector<gw::PlaneTree> read_trees(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw gw::ConfigError("cannot read " + path);
  std::vector<gw::PlaneTree> trees;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    trees.push_back(gw::PlaneTree::parse(line));
  }
  return trees;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional Galton-Watson trees: sampling, subtree census, exact formulas and Monte Carlo"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand.
  app.fallthrough();

  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel ISA: auto, scalar or avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  std::string dist_spec = "plane";
  double tail_eps = gw::kDefaultTailEpsilon;
  app.add_option("--tail-eps", tail_eps, "Truncation tail mass for unbounded laws");

  // sample
  auto* sample = app.add_subcommand("sample", "Draw conditioned trees, one degree sequence per line");
  std::uint64_t n = 0, seed = 1, count = 1, max_rej = 10'000'000;
  std::string method = "counts";
  sample->add_option("--dist", dist_spec, "Builtin name or i:p list")->capture_default_str();
  sample->add_option("--n", n, "Tree size")->required();
  sample->add_option("--seed", seed)->capture_default_str();
  sample->add_option("--count", count, "Number of trees")->capture_default_str();
  sample->add_option("--method", method)->check(CLI::IsMember({"counts", "per-element"}))->capture_default_str();
  sample->add_option("--max-rejections", max_rej)->capture_default_str();
  std::string out_path = "-";
  sample->add_option("--out", out_path, "Output path, - for stdout")->capture_default_str();

  // census
  auto* census = app.add_subcommand("census", "Subtree statistics of given or sampled trees (CSV)");
  std::string tree_text, input_path;
  std::vector<std::string> patterns;
  std::vector<std::size_t> sizes;
  std::vector<std::uint32_t> r_values;
  std::size_t k_cap = 0;
  census->add_option("--dist", dist_spec)->capture_default_str();
  census->add_option("--tree", tree_text, "Host tree as a degree sequence");
  census->add_option("--in,--input", input_path, "File of host trees, one per line");
  census->add_option("--n", n, "Sample a host of this size instead");
  census->add_option("--seed", seed)->capture_default_str();
  census->add_option("--pattern", patterns, "Pattern tree (repeatable)");
  census->add_option("--size", sizes, "k for N_{S_k} (repeatable)");
  census->add_option("--r", r_values, "r for the r-ary heights (repeatable)");
  census->add_option("--kcap,--k-cap", k_cap, "Compute K_n up to this size (0 skips)");
  std::string census_mode = "both";
  census->add_option("--mode", census_mode, "Pattern counts to report")
      ->check(CLI::IsMember({"fringe", "nonfringe", "both"}))
      ->capture_default_str();
  std::string census_out = "-";
  census->add_option("--out", census_out, "Output path, - for stdout")->capture_default_str();

  // exact
  auto* exact = app.add_subcommand("exact", "Exact formulas; without a subcommand, moments of one pattern");
  exact->require_subcommand(0, 1);
  std::string pattern_text = "0", what = "mean,var,fm2", exact_mode = "nonfringe";
  exact->add_option("--dist", dist_spec)->capture_default_str();
  exact->add_option("--n", n);
  exact->add_option("--pattern", pattern_text)->capture_default_str();
  exact->add_option("--mode", exact_mode)->check(CLI::IsMember({"fringe", "nonfringe"}))->capture_default_str();
  exact->add_option("--what", what, "Any of pi,mean,var,fm2,overlap")->capture_default_str();
  auto* ex_const = exact->add_subcommand("constants", "sigma^2, span, p_max, L, kappa, L_k");
  std::uint32_t k_max = 10;
  ex_const->add_option("--dist", dist_spec)->capture_default_str();
  ex_const->add_option("--k-max", k_max, "Print L_k for k <= k-max")->capture_default_str();

  auto* ex_mom = exact->add_subcommand("moments", "Expected fringe and non-fringe counts");
  ex_mom->add_option("--dist", dist_spec)->capture_default_str();
  ex_mom->add_option("--n", n)->required();
  ex_mom->add_option("--pattern", pattern_text)->capture_default_str();

  auto* ex_size = exact->add_subcommand("size", "P(|T| = n) and the local-limit ratio");
  ex_size->add_option("--dist", dist_spec)->capture_default_str();
  ex_size->add_option("--n", n)->required();

  auto* ex_pmin = exact->add_subcommand("pmin", "Least likely tree of size <= k");
  std::size_t k = 10;
  ex_pmin->add_option("--dist", dist_spec)->capture_default_str();
  ex_pmin->add_option("--k", k)->required();

  auto* ex_pred = exact->add_subcommand("predict-k", "Centerline prediction for K_n");
  double n_real = 0;
  std::string regime = "auto";
  std::optional<double> alpha, beta, gamma;
  ex_pred->add_option("--dist", dist_spec)->capture_default_str();
  ex_pred->add_option("--n", n_real)->required();
  ex_pred->add_option("--regime", regime)
      ->check(CLI::IsMember({"auto", "well-behaved", "first-order", "super-exponential", "cayley"}))
      ->capture_default_str();
  ex_pred->add_option("--alpha", alpha);
  ex_pred->add_option("--beta", beta);
  ex_pred->add_option("--gamma", gamma);

  auto* ex_tv = exact->add_subcommand("poisson-tv", "TV distance between two Poisson laws");
  double mu = 0, nu = 0;
  ex_tv->add_option("--mu", mu)->required();
  ex_tv->add_option("--nu", nu)->required();

  auto* ex_alpha = exact->add_subcommand("alpha", "alpha_r for the fringe height centerline");
  std::uint32_t r = 2;
  ex_alpha->add_option("--dist", dist_spec)->capture_default_str();
  ex_alpha->add_option("--r", r)->capture_default_str();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Brute-force count law for n <= 12 (CSV)");
  std::string mode = "fringe";
  oracle->add_option("--dist", dist_spec)->capture_default_str();
  oracle->add_option("--n", n)->required();
  oracle->add_option("--pattern", pattern_text)->capture_default_str();
  oracle->add_option("--mode", mode)->check(CLI::IsMember({"fringe", "nonfringe"}))->capture_default_str();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo campaigns (CSV + JSON)");
  std::string kind, n_text, rule, csv_path = "-", json_path;
  unsigned threads = 0;
  std::uint64_t replicates = 1000;
  experiment->add_option("--kind", kind)
      ->required()
      ->check(CLI::IsMember({"poisson", "sizeclass", "nonfringe", "heights", "kn"}));
  experiment->add_option("--dist", dist_spec)->capture_default_str();
  experiment->add_option("--n", n_text, "Comma-separated sizes")->required();
  experiment->add_option("--rule", rule, "Pattern rule (poisson, nonfringe) or k expression (sizeclass)");
  experiment->add_option("--r", r)->capture_default_str();
  experiment->add_option("--mode", mode)->check(CLI::IsMember({"fringe", "nonfringe"}))->capture_default_str();
  experiment->add_option("--k-cap", k_cap, "Largest size tried for K_n");
  experiment->add_option("--replicates", replicates)->capture_default_str();
  experiment->add_option("--seed", seed)->capture_default_str();
  experiment->add_option("--threads", threads, "0 uses every core")->capture_default_str();
  experiment->add_option("--max-rejections", max_rej)->capture_default_str();
  experiment->add_option("--csv", csv_path, "CSV output path, - for stdout")->capture_default_str();
  experiment->add_option("--json", json_path, "JSON summary path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (isa == "scalar") gw::kernels::select_isa(gw::kernels::Isa::scalar);
    if (isa == "avx2") gw::kernels::select_isa(gw::kernels::Isa::avx2);
    std::cout.precision(17);

    if (*sample) {
      const auto dist = load_dist(dist_spec, tail_eps);
      gw::SampleConfig cfg;
      cfg.n = n;
      cfg.max_rejections = max_rej;
      cfg.seed = seed;
      cfg.method = method == "counts" ? gw::DrawMethod::counts : gw::DrawMethod::per_element;
      std::ostringstream text;
      for (std::uint64_t i = 0; i < count; ++i) {
        gw::Rng rng(gw::derive_seed(seed, i));
        text << gw::sample_conditional(dist, cfg, rng).to_string() << '\n';
      }
      write_or_print(out_path, text.str());
    } else if (*census) {
      const auto dist = load_dist(dist_spec, tail_eps);
      std::vector<gw::PlaneTree> hosts;
      if (!tree_text.empty()) hosts.push_back(gw::PlaneTree::parse(tree_text));
      if (!input_path.empty()) {
        auto more = read_trees(input_path);
        hosts.insert(hosts.end(), more.begin(), more.end());
      }
      if (n > 0) {
        gw::SampleConfig cfg;
        cfg.n = n;
        gw::Rng rng(seed);
        hosts.push_back(gw::sample_conditional(dist, cfg, rng));
      }
      if (hosts.empty()) throw gw::ConfigError("census needs --tree, --input or --n");
      gw::CensusOptions opts;
      for (const auto& p : patterns) opts.patterns.push_back(gw::PlaneTree::parse(p));
      opts.sizes = sizes;
      opts.r_values = r_values;
      opts.k_cap = k_cap;
      std::ostringstream out;
      out << "host,n";
      const bool fringe = census_mode != "nonfringe", nonfringe = census_mode != "fringe";
      for (const auto& p : opts.patterns) {
        if (fringe) out << ",\"N[" << p.to_string() << "]\"";
        if (nonfringe) out << ",\"Nnf[" << p.to_string() << "]\"";
      }
      for (const auto kk : opts.sizes) out << ",N_S" << kk;
      for (const auto rr : opts.r_values) out << ",H_" << rr << ",H_nf_" << rr;
      if (k_cap > 0) out << ",K,K_saturated";
      out << '\n';
      for (std::size_t h = 0; h < hosts.size(); ++h) {
        const auto rep = gw::census(hosts[h], dist, opts);
        out << h << ',' << rep.n;
        for (const auto& p : opts.patterns) {
          if (fringe) out << ',' << rep.fringe_counts.at(gw::tree_key(p));
          if (nonfringe) out << ',' << rep.nonfringe_counts.at(gw::tree_key(p));
        }
        for (const auto kk : opts.sizes) out << ',' << rep.size_counts.at(kk);
        for (const auto rr : opts.r_values) out << ',' << rep.H_r.at(rr) << ',' << rep.H_r_nf.at(rr);
        if (k_cap > 0) out << ',' << rep.K.K << ',' << (rep.K.saturated ? 1 : 0);
        out << '\n';
      }
      for (const auto rr : gw::census(hosts[0], dist, opts).r_impossible) {
        std::cerr << "gwforest: p_" << rr << " = 0, H_" << rr << " reported as 0\n";
      }
      write_or_print(census_out, out.str());
    } else if (*exact && exact->get_subcommands().empty()) {
      if (n == 0) throw gw::ConfigError("exact needs --n (or a subcommand)");
      const auto dist = load_dist(dist_spec, tail_eps);
      const auto t = gw::PlaneTree::parse(pattern_text);
      const bool nf = exact_mode == "nonfringe";
      std::cout << "key,value\n";
      std::stringstream ss(what);
      std::string item;
      std::optional<gw::MomentReport> moments;
      const auto nf_moments = [&]() -> const gw::MomentReport& {
        if (!moments) moments = gw::second_factorial_nonfringe(dist, n, t);
        return *moments;
      };
      while (std::getline(ss, item, ',')) {
        if (item == "pi") {
          std::cout << "pi," << (nf ? gw::prob_nonfringe_root(dist, t) : gw::prob_tree(dist, t)) << '\n';
        } else if (item == "mean") {
          std::cout << "mean," << (nf ? gw::expected_nonfringe_count(dist, n, t) : gw::expected_fringe_count(dist, n, t))
                    << '\n';
        } else if (item == "var" || item == "fm2" || item == "overlap") {
          if (!nf) throw gw::ConfigError("--what " + item + " is only available with --mode nonfringe");
          if (item == "var") std::cout << "var," << nf_moments().variance << '\n';
          if (item == "fm2") std::cout << "fm2," << nf_moments().second_factorial << '\n';
          if (item == "overlap") {
            for (const auto& [tree, term] : nf_moments().overlap_terms) {
              std::cout << "\"overlap[" << tree.to_string() << "]\"," << term << '\n';
            }
          }
        } else {
          throw gw::ConfigError("unknown --what item \"" + item + "\"");
        }
      }
    } else if (*ex_const) {
      const auto dist = load_dist(dist_spec, tail_eps);
      const auto c = gw::constants(dist, std::max<std::uint32_t>(k_max, 2));
      std::cout << "key,value\n"
                << "sigma2," << c.sigma2 << "\nspan," << c.span << "\np_max," << c.p_max << "\nL," << c.L
                << "\nkappa," << (c.kappa ? std::to_string(*c.kappa) : "inf") << "\nL_truncated,"
                << c.L_truncated << "\ntruncated_mass," << dist.truncated_mass() << '\n';
      for (std::uint32_t i = 1; i <= k_max; ++i) std::cout << "L_" << i << ',' << c.L_k[i - 1] << '\n';
    } else if (*ex_mom) {
      const auto dist = load_dist(dist_spec, tail_eps);
      const auto t = gw::PlaneTree::parse(pattern_text);
      const auto m = gw::second_factorial_nonfringe(dist, n, t);
      std::cout << "key,value\n"
                << "pi," << gw::prob_tree(dist, t) << "\npi_nf," << gw::prob_nonfringe_root(dist, t)
                << "\nfringe_mean," << gw::expected_fringe_count(dist, n, t) << "\nnonfringe_mean," << m.mean
                << "\nnonfringe_second_factorial," << m.second_factorial << "\nnonfringe_variance,"
                << m.variance << '\n';
      for (const auto& [tree, term] : m.overlap_terms) std::cout << "overlap:" << tree.to_string() << ',' << term << '\n';
    } else if (*ex_size) {
      const auto dist = load_dist(dist_spec, tail_eps);
      const double p = gw::prob_total_size(dist, n);
      const double nn = static_cast<double>(n);
      const double local = p * std::pow(nn, 1.5) * std::sqrt(2 * M_PI * dist.variance()) / dist.span();
      std::cout << "key,value\nprob_total_size," << p << "\nlocal_limit_ratio," << local << '\n';
    } else if (*ex_pmin) {
      const auto dist = load_dist(dist_spec, tail_eps);
      const auto res = gw::pmin(dist, k);
      std::cout << "key,value\ntree,\"" << res.tree.to_string() << "\"\nsize," << res.tree.size()
                << "\nprobability," << res.probability << "\nlog_probability," << res.log_probability
                << "\nkth_root," << std::exp(res.log_probability / static_cast<double>(k)) << '\n';
    } else if (*ex_pred) {
      const auto dist = load_dist(dist_spec, tail_eps);
      gw::KHint hint;
      if (regime == "well-behaved") hint.regime = gw::KRegime::well_behaved;
      if (regime == "first-order") hint.regime = gw::KRegime::first_order;
      if (regime == "super-exponential") hint.regime = gw::KRegime::super_exponential;
      if (regime == "cayley") hint.regime = gw::KRegime::cayley;
      hint.alpha = alpha;
      hint.beta = beta;
      hint.gamma = gamma;
      const auto p = gw::predict_K(dist, n_real, hint);
      std::cout << "key,value\nK," << p.value << "\nregime," << gw::to_string(p.regime) << "\nheuristic,"
                << p.heuristic << "\ngamma," << p.gamma << "\nalpha," << p.alpha << "\nbeta," << p.beta
                << "\nnote,\"" << p.note << "\"\n";
    } else if (*ex_tv) {
      const auto tv = gw::poisson_tv(mu, nu);
      std::cout << "key,value\ntv," << tv.exact << "\nbound," << tv.bound << '\n';
    } else if (*ex_alpha) {
      const auto dist = load_dist(dist_spec, tail_eps);
      std::cout << "key,value\nalpha_r," << gw::alpha_r(dist, r) << '\n';
    } else if (*oracle) {
      const auto dist = load_dist(dist_spec, tail_eps);
      const auto t = gw::PlaneTree::parse(pattern_text);
      const auto law =
          gw::exact_count_pmf(dist, n, t, mode == "fringe" ? gw::CountMode::fringe : gw::CountMode::nonfringe);
      std::cout << "key,value\n";
      for (const auto& [c, p] : law.pmf) std::cout << "P(N=" << c << ")," << p << '\n';
      std::cout << "mean," << law.mean << "\nvariance," << law.variance << "\nsecond_factorial,"
                << law.second_factorial << "\npoisson_mean," << law.poisson_mean << "\ntv_to_poisson,"
                << law.tv_to_poisson << '\n';
    } else if (*experiment) {
      const auto dist = load_dist(dist_spec, tail_eps);
      const auto n_list = parse_n_list(n_text);
      gw::RunOptions opts;
      opts.replicates = replicates;
      opts.seed = seed;
      opts.threads = threads;
      opts.max_rejections = max_rej;
      gw::ExperimentSummary s;
      if (kind == "poisson") {
        if (rule.empty()) throw gw::ConfigError("--rule is required for poisson");
        s = gw::run_poisson_regimes(dist, n_list, rule, opts);
      } else if (kind == "sizeclass") {
        if (rule.empty()) throw gw::ConfigError("--rule (k expression) is required for sizeclass");
        s = gw::run_size_class(dist, n_list, rule, opts);
      } else if (kind == "nonfringe") {
        if (rule.empty()) throw gw::ConfigError("--rule is required for nonfringe");
        s = gw::run_nonfringe_concentration(dist, n_list, rule, opts);
      } else if (kind == "heights") {
        s = gw::run_heights(dist, n_list, r, mode == "fringe" ? gw::HeightMode::fringe : gw::HeightMode::nonfringe,
                            opts);
      } else {
        s = gw::run_Kn(dist, n_list, k_cap == 0 ? 12 : k_cap, opts);
      }
      write_or_print(csv_path, gw::to_csv(s));
      if (!json_path.empty()) write_or_print(json_path, gw::to_json(s));
    }
  } catch (const gw::SamplerExhausted& e) {
    std::cerr << "gwforest: " << e.what() << '\n';
    return kExitExhausted;
  } catch (const gw::ConfigError& e) {
    std::cerr << "gwforest: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    // Malformed trees and similar user input.
    std::cerr << "gwforest: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "gwforest: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
