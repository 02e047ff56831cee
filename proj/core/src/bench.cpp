#include "nsfe/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "nsfe/error.hpp"
#include "nsfe/io.hpp"
#include "nsfe/priors.hpp"
#include "nsfe/random.hpp"
#include "nsfe/special.hpp"

namespace nsfe {

namespace {

constexpr int kMaxPriorAttempts = 1000;
constexpr std::uint64_t kProfileSeedOffset = 1000;

std::uint64_t code(EstimatorChoice e) { return static_cast<std::uint64_t>(e); }
std::uint64_t code(ThetaProfile p) { return static_cast<std::uint64_t>(p); }

ThetaVector spikes(const ProblemConfig& cfg, double height) {
  std::vector<double> v(static_cast<std::size_t>(cfg.d()), 0.0);
  std::fill_n(v.begin(), cfg.s(), height);
  return ThetaVector(std::move(v));
}

// Why a cell cannot run, or nullopt.
std::optional<std::string> estimator_precondition(EstimatorChoice e, const ProblemConfig& cfg) {
  switch (e) {
    case EstimatorChoice::Dense:
      if (regime(cfg) != Regime::Dense) return "dense estimator needs s^2 >= 4d";
      break;
    case EstimatorChoice::Sparse:
      if (regime(cfg) != Regime::Sparse) return "sparse estimator needs s^2 < 4d";
      break;
    case EstimatorChoice::Even:
      if (!is_positive_integer(cfg.gamma())) return "even estimator needs an integer gamma";
      break;
    case EstimatorChoice::Auto:
      break;
  }
  return std::nullopt;
}

double target_value(std::span<const double> theta, double gamma, Target target) {
  return target == Target::Functional ? big_n_gamma(theta, gamma) : n_gamma(theta, gamma);
}

double estimate_value(const EstimateResult& r, double gamma, Target target) {
  if (target == Target::Norm && gamma > 1.0) return *r.norm_value;
  return r.value;
}

struct Cell {
  std::size_t config_index;
  EstimatorChoice estimator;
  ThetaProfile profile;
  const ThetaVector* theta;
  double truth;
  std::size_t offset;  // into the squared-error buffer
};

nlohmann::ordered_json row_json(const RiskRow& r) {
  nlohmann::ordered_json j;
  j["d"] = r.cfg.d();
  j["s"] = r.cfg.s();
  j["eps"] = r.cfg.eps();
  j["gamma"] = r.cfg.gamma();
  j["c"] = r.cfg.c();
  j["estimator"] = r.estimator;
  j["profile"] = r.profile;
  j["target"] = to_string(r.target);
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  j["mse"] = r.mse;
  j["se"] = r.se;
  j["rate"] = r.rate;
  j["ratio"] = r.ratio;
  return j;
}

}  // namespace

const char* to_string(ThetaProfile p) noexcept {
  switch (p) {
    case ThetaProfile::Zero:
      return "zero";
    case ThetaProfile::SpikesAtThreshold:
      return "spikes-at-threshold";
    case ThetaProfile::SpikesLarge:
      return "spikes-large";
    case ThetaProfile::PriorDraw:
      return "prior-draw";
  }
  return "?";
}

const char* to_string(Target t) noexcept {
  return t == Target::Functional ? "functional" : "norm";
}

ThetaProfile parse_theta_profile(const std::string& name) {
  for (auto p : {ThetaProfile::Zero, ThetaProfile::SpikesAtThreshold, ThetaProfile::SpikesLarge,
                 ThetaProfile::PriorDraw}) {
    if (name == to_string(p)) return p;
  }
  throw InvalidParameter("unknown theta profile '" + name +
                         "' (zero|spikes-at-threshold|spikes-large|prior-draw)");
}

Target parse_target(const std::string& name) {
  if (name == "functional") return Target::Functional;
  if (name == "norm") return Target::Norm;
  throw InvalidParameter("unknown target '" + name + "' (functional|norm)");
}

ExperimentSpec parse_experiment_spec(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("experiment spec: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(0, "experiment spec must be a JSON object");
  static const char* const known[] = {"grid", "estimators", "profiles", "replicates", "seed",
                                      "target"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ParseError(0, "experiment spec: unknown key '" + key + "'");
    }
  }
  ExperimentSpec spec;
  try {
    if (!j.contains("grid") || !j["grid"].is_array()) {
      throw ParseError(0, "experiment spec: 'grid' must be an array of configs");
    }
    for (const auto& item : j["grid"]) spec.grid.push_back(parse_config(item.dump()));
    if (j.contains("estimators")) {
      spec.estimators.clear();
      for (const auto& e : j["estimators"]) {
        spec.estimators.push_back(parse_estimator_choice(e.get<std::string>()));
      }
    }
    if (j.contains("profiles")) {
      spec.profiles.clear();
      for (const auto& p : j["profiles"]) spec.profiles.push_back(parse_theta_profile(p.get<std::string>()));
    }
    if (j.contains("replicates")) spec.replicates = j["replicates"].get<int>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("target")) spec.target = parse_target(j["target"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("experiment spec: ") + e.what());
  }
  if (spec.replicates < 2) throw InvalidParameter("replicates must be at least 2");
  return spec;
}

ThetaVector theta_profile(ThetaProfile profile, const ProblemConfig& cfg, std::uint64_t seed) {
  const double d = static_cast<double>(cfg.d());
  switch (profile) {
    case ThetaProfile::Zero:
      return ThetaVector(std::vector<double>(static_cast<std::size_t>(cfg.d()), 0.0));
    case ThetaProfile::SpikesAtThreshold:
      return spikes(cfg, cfg.eps() * sparse_threshold(cfg.d(), cfg.s()));
    case ThetaProfile::SpikesLarge:
      return spikes(cfg, 10.0 * cfg.eps() * std::sqrt(std::log(d)));
    case ThetaProfile::PriorDraw: {
      const PriorConfig pc = prior_config(cfg.d(), cfg.s(), cfg.eps());
      const MomentPrior prior = matching_measures(cfg.gamma(), pc.K, pc.M);
      for (int attempt = 0; attempt < kMaxPriorAttempts; ++attempt) {
        ThetaVector theta = sample_prior(prior, cfg.d(), cfg.s(), 1,
                                         derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
        if (theta.in_sparsity_class(cfg.s())) return theta;
      }
      throw ConstructionError("prior draw stayed outside B_0(s) after repeated attempts");
    }
  }
  throw InvalidParameter("unknown theta profile");
}

RiskReport run_risk_experiment(const ExperimentSpec& spec, unsigned workers) {
  if (spec.replicates < 2) throw InvalidParameter("replicates must be at least 2");
  const auto reps = static_cast<std::size_t>(spec.replicates);
  RiskReport report;

  // Profiles are built once per config, in order, on this thread.
  std::vector<std::vector<std::optional<ThetaVector>>> thetas(spec.grid.size());
  std::vector<std::vector<std::string>> theta_errors(spec.grid.size());
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    for (ThetaProfile p : spec.profiles) {
      try {
        thetas[i].emplace_back(
            theta_profile(p, spec.grid[i], derive_seed(spec.seed, {i, kProfileSeedOffset + code(p)})));
        theta_errors[i].emplace_back();
      } catch (const Error& e) {
        thetas[i].emplace_back(std::nullopt);
        theta_errors[i].emplace_back(e.what());
      }
    }
  }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    const ProblemConfig& cfg = spec.grid[i];
    for (EstimatorChoice e : spec.estimators) {
      const auto why = estimator_precondition(e, cfg);
      for (std::size_t k = 0; k < spec.profiles.size(); ++k) {
        const ThetaProfile p = spec.profiles[k];
        if (why) {
          report.skipped.push_back({i, to_string(e), to_string(p), *why});
        } else if (!thetas[i][k]) {
          report.skipped.push_back({i, to_string(e), to_string(p), theta_errors[i][k]});
        } else {
          const ThetaVector& theta = *thetas[i][k];
          cells.push_back({i, e, p, &theta, target_value(theta.values(), cfg.gamma(), spec.target),
                           cells.size() * reps});
        }
      }
    }
  }

  std::vector<double> sq_err(cells.size() * reps);
  const std::size_t tasks = sq_err.size();
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      const Cell& cell = cells[t / reps];
      const std::uint64_t r = t % reps;
      const ProblemConfig& cfg = spec.grid[cell.config_index];
      try {
        const std::uint64_t key =
            derive_seed(spec.seed, {cell.config_index, code(cell.estimator), code(cell.profile), r});
        const auto y = simulate_observations(cell.theta->values(), cfg.eps(), derive_seed(key, {1}));
        const EstimateResult est = estimate(y, cfg, derive_seed(key, {2}), cell.estimator,
                                            spec.target == Target::Norm);
        const double err = estimate_value(est, cfg.gamma(), spec.target) - cell.truth;
        sq_err[t] = err * err;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks);
        return;
      }
    }
  };

  unsigned n_workers = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, std::max<std::size_t>(tasks, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  // Assembly in a fixed order: per (config, estimator) the profile rows, then "max".
  std::size_t c = 0;
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    const ProblemConfig& cfg = spec.grid[i];
    const double rate = minimax_rate(cfg).value;
    for (EstimatorChoice e : spec.estimators) {
      std::optional<RiskRow> worst;
      bool any = false;
      while (c < cells.size() && cells[c].config_index == i && cells[c].estimator == e) {
        const std::span<const double> errs(sq_err.data() + cells[c].offset, reps);
        const double n = static_cast<double>(reps);
        const double mse = pairwise_sum(errs) / n;
        std::vector<double> dev(reps);
        for (std::size_t r = 0; r < reps; ++r) dev[r] = (errs[r] - mse) * (errs[r] - mse);
        const double se = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
        RiskRow row{cfg, to_string(e), to_string(cells[c].profile), spec.target, spec.replicates,
                    spec.seed, mse, se, rate, mse / rate};
        if (cells[c].profile != ThetaProfile::Zero && (!worst || row.mse > worst->mse)) worst = row;
        report.rows.push_back(std::move(row));
        any = true;
        ++c;
      }
      if (worst) {
        worst->profile = "max";
        report.rows.push_back(*worst);
      } else {
        report.skipped.push_back({i, to_string(e), "max", any ? "no non-zero profile ran" : "no profile ran"});
      }
    }
  }
  return report;
}

RateCheck rate_check(const RiskReport& report) {
  std::map<Regime, std::size_t> per_regime;
  std::map<std::tuple<std::string, Regime, double>, std::vector<double>> families;
  for (const RiskRow& row : report.rows) {
    if (row.profile != "max") continue;
    const Regime reg = regime(row.cfg);
    ++per_regime[reg];
    families[{row.estimator, reg, row.cfg.gamma()}].push_back(row.ratio);
  }
  if (per_regime.empty()) throw DiagnosticError("rate check: report has no summary rows");
  for (const auto& [reg, count] : per_regime) {
    if (count < 4) {
      throw DiagnosticError(std::string("rate check: ") + to_string(reg) + " regime has " +
                            std::to_string(count) + " summary rows, need at least 4");
    }
  }
  RateCheck check{{}, true};
  for (const auto& [key, ratios] : families) {
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    const double spread = *lo > 0.0 ? *hi / *lo : INFINITY;
    const bool pass = spread <= 10.0;
    check.families.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), ratios.size(),
                              *lo, *hi, spread, pass});
    check.pass = check.pass && pass;
  }
  return check;
}

std::string report_to_csv(const RiskReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const RiskRow& r : report.rows) {
    out += std::to_string(r.cfg.d()) + ',' + std::to_string(r.cfg.s()) + ',' +
           format_double(r.cfg.eps()) + ',' + format_double(r.cfg.gamma()) + ',' +
           format_double(r.cfg.c()) + ',' + r.estimator + ',' + r.profile + ',' +
           to_string(r.target) + ',' + std::to_string(r.replicates) + ',' +
           std::to_string(r.seed) + ',' + format_double(r.mse) + ',' + format_double(r.se) + ',' +
           format_double(r.rate) + ',' + format_double(r.ratio) + '\n';
  }
  return out;
}

std::string report_to_json(const RiskReport& report) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const RiskRow& r : report.rows) j["rows"].push_back(row_json(r));
  j["skipped"] = nlohmann::ordered_json::array();
  for (const SkippedCell& s : report.skipped) {
    nlohmann::ordered_json k;
    k["config_index"] = s.config_index;
    k["estimator"] = s.estimator;
    k["profile"] = s.profile;
    k["reason"] = s.reason;
    j["skipped"].push_back(std::move(k));
  }
  return j.dump(2) + '\n';
}

std::string rate_check_to_json(const RateCheck& check) {
  nlohmann::ordered_json j;
  j["pass"] = check.pass;
  j["families"] = nlohmann::ordered_json::array();
  for (const RateFamily& f : check.families) {
    nlohmann::ordered_json k;
    k["estimator"] = f.estimator;
    k["regime"] = to_string(f.regime);
    k["gamma"] = f.gamma;
    k["points"] = f.points;
    k["min_ratio"] = f.min_ratio;
    k["max_ratio"] = f.max_ratio;
    k["spread"] = f.spread;
    k["pass"] = f.pass;
    j["families"].push_back(std::move(k));
  }
  return j.dump(2) + '\n';
}

void emit(const RiskReport& report, const std::string& path, const std::string& format) {
  if (format == "csv") {
    write_text_file(path, report_to_csv(report));
  } else if (format == "json") {
    write_text_file(path, report_to_json(report));
  } else {
    throw InvalidParameter("unknown report format '" + format + "' (csv|json)");
  }
}

}  // namespace nsfe
