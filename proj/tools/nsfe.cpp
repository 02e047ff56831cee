// nsfe: command-line front end for the estimators, priors and risk harness.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsfe/approx.hpp"
#include "nsfe/bench.hpp"
#include "nsfe/core.hpp"
#include "nsfe/error.hpp"
#include "nsfe/estimators.hpp"
#include "nsfe/io.hpp"
#include "nsfe/priors.hpp"

namespace {

using nlohmann::ordered_json;

// Writes to `out` when given, stdout otherwise.
void deliver(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    nsfe::write_text_file(out, text);
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + '\n'; }

ordered_json measure_json(const std::vector<double>& support, const std::vector<double>& weights) {
  ordered_json j;
  j["support"] = support;
  j["weights"] = weights;
  return j;
}

struct ConfigFlags {
  std::int64_t d = 0;
  std::int64_t s = 0;
  double eps = 1.0;
  double gamma = 1.0;
  double c = nsfe::ProblemConfig::kDefaultC;

  void add(CLI::App* app, bool with_c = true) {
    app->add_option("--d", d, "dimension")->required();
    app->add_option("--s", s, "sparsity")->required();
    app->add_option("--eps", eps, "noise level")->capture_default_str();
    app->add_option("--gamma", gamma, "exponent")->capture_default_str();
    if (with_c) app->add_option("--c", c, "dense-zone tuning constant")->capture_default_str();
  }
  nsfe::ProblemConfig config() const { return nsfe::ProblemConfig(d, s, eps, gamma, c); }
};

struct GridFlags {
  std::vector<std::int64_t> d;
  std::vector<std::int64_t> s;
  std::vector<double> eps{1.0};
  std::vector<double> gamma{1.0};
  std::vector<double> c{nsfe::ProblemConfig::kDefaultC};

  void add(CLI::App* app) {
    app->add_option("--d", d, "dimensions (comma-separated)")->delimiter(',');
    app->add_option("--s", s, "sparsities (comma-separated)")->delimiter(',');
    app->add_option("--eps", eps, "noise levels (comma-separated)")->delimiter(',');
    app->add_option("--gamma", gamma, "exponents (comma-separated)")->delimiter(',');
    app->add_option("--c", c, "tuning constants (comma-separated)")->delimiter(',');
  }

  // Cartesian product in the order d, s, eps, gamma, c (last varies fastest).
  // Combinations with s > d are left out.
  std::vector<nsfe::ProblemConfig> configs() const {
    if (d.empty() || s.empty()) throw nsfe::InvalidParameter("--d and --s are required");
    std::vector<nsfe::ProblemConfig> out;
    for (auto dd : d)
      for (auto ss : s)
        for (auto e : eps)
          for (auto g : gamma)
            for (auto cc : c)
              if (ss <= dd) out.emplace_back(dd, ss, e, g, cc);
    if (out.empty()) throw nsfe::InvalidParameter("grid is empty (every s exceeds d)");
    return out;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation of sum |theta_i|^gamma and the l_gamma norm under sparsity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nsfe 0.1.0");

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate N_gamma (and optionally the norm) from data");
  std::string est_data, est_choice = "auto", est_out;
  std::uint64_t est_seed = 0;
  bool est_norm = false;
  ConfigFlags est_cfg;
  est->add_option("--data", est_data, "observation file, one value per line")->required();
  est_cfg.add(est);
  est->add_option("--seed", est_seed, "seed for the auxiliary randomization")->capture_default_str();
  est->add_option("--estimator", est_choice, "auto|dense|even|sparse")->capture_default_str();
  est->add_flag("--norm", est_norm, "also report |value|^(1/gamma) (gamma >= 1)");
  est->add_option("--out", est_out, "write JSON here instead of stdout");

  // priors
  auto* pri = app.add_subcommand("priors", "build and certify the moment-matching prior pair");
  ConfigFlags pri_cfg;
  std::string pri_out;
  pri_cfg.add(pri, false);
  pri->add_option("--out", pri_out, "write JSON here instead of stdout");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo risk experiment");
  std::string sim_spec, sim_out, sim_format = "csv", sim_target = "functional";
  std::vector<std::string> sim_estimators{"auto"};
  std::vector<std::string> sim_profiles{"zero", "spikes-at-threshold", "spikes-large", "prior-draw"};
  int sim_replicates = 100;
  std::uint64_t sim_seed = 0;
  unsigned sim_workers = 0;
  bool sim_check = false;
  GridFlags sim_grid;
  sim->add_option("--spec", sim_spec, "experiment spec (JSON); overrides the inline flags");
  sim_grid.add(sim);
  sim->add_option("--estimators", sim_estimators, "auto,dense,even,sparse")->delimiter(',');
  sim->add_option("--profiles", sim_profiles, "zero,spikes-at-threshold,spikes-large,prior-draw")
      ->delimiter(',');
  sim->add_option("--replicates", sim_replicates)->capture_default_str();
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->add_option("--target", sim_target, "functional|norm")->capture_default_str();
  sim->add_option("--workers", sim_workers, "worker threads (0 = all cores)")->capture_default_str();
  sim->add_option("--out", sim_out, "report path (stdout when omitted)");
  sim->add_option("--format", sim_format, "csv|json")->capture_default_str();
  sim->add_flag("--check", sim_check, "run the rate check; exit 0 on PASS, 2 on FAIL");

  // rates
  auto* rat = app.add_subcommand("rates", "minimax rate table over a grid");
  GridFlags rat_grid;
  std::string rat_out, rat_format = "csv";
  rat_grid.add(rat);
  rat->add_option("--out", rat_out);
  rat->add_option("--format", rat_format, "csv|json")->capture_default_str();

  // approx
  auto* apx = app.add_subcommand("approx", "best uniform approximation of |x|^gamma on [-1, 1]");
  double apx_gamma = 1.0, apx_tol = nsfe::RemezOptions{}.tol;
  int apx_K = 1;
  std::string apx_out;
  apx->add_option("--gamma", apx_gamma)->required();
  apx->add_option("--K", apx_K, "half degree (degree 2K)")->required();
  apx->add_option("--tol", apx_tol)->capture_default_str();
  apx->add_option("--out", apx_out);

  // observe
  auto* obs = app.add_subcommand("observe", "generate y = theta + eps * xi");
  std::string obs_theta, obs_profile, obs_out;
  ConfigFlags obs_cfg;
  std::uint64_t obs_seed = 0;
  obs->add_option("--theta", obs_theta, "theta file, one value per line");
  obs->add_option("--profile", obs_profile, "zero|spikes-at-threshold|spikes-large|prior-draw");
  obs->add_option("--d", obs_cfg.d);
  obs->add_option("--s", obs_cfg.s);
  obs->add_option("--eps", obs_cfg.eps)->capture_default_str();
  obs->add_option("--gamma", obs_cfg.gamma, "exponent (prior-draw only)")->capture_default_str();
  obs->add_option("--seed", obs_seed)->capture_default_str();
  obs->add_option("--out", obs_out);

  // CLI11 would report a mistyped subcommand as a missing one.
  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    return app.exit(CLI::ExtrasError("unknown subcommand '" + std::string(argv[1]) + "'",
                                     static_cast<int>(CLI::ExitCodes::ExtrasError)));
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (*est) {
      const nsfe::ProblemConfig cfg = est_cfg.config();
      const nsfe::ThetaVector y = nsfe::read_theta_file(est_data);
      y.check_dimension(cfg);
      const auto r = nsfe::estimate(y.values(), cfg, est_seed,
                                    nsfe::parse_estimator_choice(est_choice), est_norm);
      ordered_json j;
      j["estimator_id"] = nsfe::to_string(r.estimator_id);
      j["value"] = r.value;
      j["norm_value"] = r.norm_value ? ordered_json(*r.norm_value) : ordered_json(nullptr);
      j["seed"] = r.seed;
      deliver(dump(j), est_out);
    } else if (*pri) {
      const auto pc = nsfe::prior_config(pri_cfg.d, pri_cfg.s, pri_cfg.eps);
      const auto prior = nsfe::matching_measures(pri_cfg.gamma, pc.K, pc.M);
      const auto chi = nsfe::chi_square_bound(pri_cfg.d, pri_cfg.s, pc);
      const auto ooc = nsfe::out_of_class_mass(pri_cfg.d, pri_cfg.s);
      ordered_json j;
      j["Lambda"] = pc.Lambda;
      j["M"] = pc.M;
      j["K"] = pc.K;
      j["measures"]["mu0"] = measure_json(prior.support0, prior.weights0);
      j["measures"]["mu1"] = measure_json(prior.support1, prior.weights1);
      j["gap"] = prior.gap;
      j["delta"] = prior.delta;
      j["chi2_bound"] = chi.bound;
      j["out_of_class"]["exact"] = ooc.exact;
      j["out_of_class"]["bound"] = ooc.bound;
      deliver(dump(j), pri_out);
    } else if (*sim) {
      nsfe::ExperimentSpec spec;
      if (!sim_spec.empty()) {
        spec = nsfe::parse_experiment_spec(nsfe::read_text_file(sim_spec));
      } else {
        spec.grid = sim_grid.configs();
        spec.estimators.clear();
        for (const auto& e : sim_estimators) spec.estimators.push_back(nsfe::parse_estimator_choice(e));
        spec.profiles.clear();
        for (const auto& p : sim_profiles) spec.profiles.push_back(nsfe::parse_theta_profile(p));
        spec.replicates = sim_replicates;
        spec.seed = sim_seed;
        spec.target = nsfe::parse_target(sim_target);
      }
      const auto report = nsfe::run_risk_experiment(spec, sim_workers);
      for (const auto& s : report.skipped) {
        std::cerr << "skipped: config " << s.config_index << ", " << s.estimator << ", " << s.profile
                  << ": " << s.reason << '\n';
      }
      if (sim_format == "csv") {
        deliver(nsfe::report_to_csv(report), sim_out);
      } else if (sim_format == "json") {
        deliver(nsfe::report_to_json(report), sim_out);
      } else {
        throw nsfe::InvalidParameter("unknown format '" + sim_format + "' (csv|json)");
      }
      if (sim_check) {
        const auto check = nsfe::rate_check(report);
        std::cerr << nsfe::rate_check_to_json(check);
        std::cerr << "rate check: " << (check.pass ? "PASS" : "FAIL") << '\n';
        return check.pass ? 0 : 2;
      }
    } else if (*rat) {
      const auto grid = rat_grid.configs();
      if (rat_format == "csv") {
        std::string text = "d,s,eps,gamma,regime,rate,lower,upper,bracket,label\n";
        for (const auto& cfg : grid) {
          const auto r = nsfe::minimax_rate(cfg);
          text += std::to_string(cfg.d()) + ',' + std::to_string(cfg.s()) + ',' +
                  nsfe::format_double(cfg.eps()) + ',' + nsfe::format_double(cfg.gamma()) + ',' +
                  nsfe::to_string(nsfe::regime(cfg)) + ',' + nsfe::format_double(r.value) + ',' +
                  nsfe::format_double(r.lower) + ',' + nsfe::format_double(r.upper) + ',' +
                  (r.bracket ? "true" : "false") + ",\"" + r.label + "\"\n";
        }
        deliver(text, rat_out);
      } else if (rat_format == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& cfg : grid) {
          const auto r = nsfe::minimax_rate(cfg);
          ordered_json j;
          j["d"] = cfg.d();
          j["s"] = cfg.s();
          j["eps"] = cfg.eps();
          j["gamma"] = cfg.gamma();
          j["regime"] = nsfe::to_string(nsfe::regime(cfg));
          j["rate"] = r.value;
          j["lower"] = r.lower;
          j["upper"] = r.upper;
          j["bracket"] = r.bracket;
          j["label"] = r.label;
          rows.push_back(std::move(j));
        }
        deliver(dump(rows), rat_out);
      } else {
        throw nsfe::InvalidParameter("unknown format '" + rat_format + "' (csv|json)");
      }
    } else if (*apx) {
      deliver(nsfe::to_json(nsfe::best_poly_approx(apx_gamma, apx_K, apx_tol)) + '\n', apx_out);
    } else if (*obs) {
      nsfe::ThetaVector theta;
      if (!obs_theta.empty() == !obs_profile.empty()) {
        throw nsfe::InvalidParameter("give exactly one of --theta and --profile");
      }
      if (!obs_theta.empty()) {
        theta = nsfe::read_theta_file(obs_theta);
      } else {
        theta = nsfe::theta_profile(nsfe::parse_theta_profile(obs_profile), obs_cfg.config(), obs_seed);
      }
      const auto y = nsfe::simulate_observations(theta.values(), obs_cfg.eps, obs_seed);
      deliver(nsfe::format_theta(nsfe::ThetaVector(y)), obs_out);
    }
  } catch (const nsfe::Error& e) {
    std::cerr << "nsfe: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
