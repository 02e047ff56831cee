#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nsfe/core.hpp"
#include "nsfe/estimators.hpp"

namespace nsfe {

enum class ThetaProfile { Zero, SpikesAtThreshold, SpikesLarge, PriorDraw };
enum class Target { Functional, Norm };

const char* to_string(ThetaProfile p) noexcept;
const char* to_string(Target t) noexcept;
ThetaProfile parse_theta_profile(const std::string& name);
Target parse_target(const std::string& name);

struct ExperimentSpec {
  std::vector<ProblemConfig> grid;
  std::vector<EstimatorChoice> estimators{EstimatorChoice::Auto};
  std::vector<ThetaProfile> profiles{ThetaProfile::Zero, ThetaProfile::SpikesAtThreshold,
                                     ThetaProfile::SpikesLarge, ThetaProfile::PriorDraw};
  int replicates = 100;
  std::uint64_t seed = 0;
  Target target = Target::Functional;
};

/// JSON object:
///   {"grid": [{"d":..,"s":..,"eps":..,"gamma":..,"c":..}, ...],
///    "estimators": ["auto", ...], "profiles": ["zero", ...],
///    "replicates": 100, "seed": 0, "target": "functional" | "norm"}
/// Everything but "grid" is optional.
ExperimentSpec parse_experiment_spec(std::string_view json);

/// Deterministic s-sparse test vector:
///   zero               all zeros
///   spikes-at-threshold s entries eps * sqrt(2 ln(1 + d/s^2))
///   spikes-large       s entries 10 eps sqrt(ln d)
///   prior-draw         a draw from the mu1 moment prior of prior_config(d, s, eps),
///                      redrawn until it has at most s nonzeros
/// prior-draw needs the dense zone and a non-degenerate approximation
/// (throws WrongRegime / DegenerateApproximation otherwise).
ThetaVector theta_profile(ThetaProfile profile, const ProblemConfig& cfg, std::uint64_t seed = 0);

struct RiskRow {
  ProblemConfig cfg;
  std::string estimator;
  /// Profile name, or "max" for the max-over-profiles summary row.
  std::string profile;
  Target target;
  int replicates;
  std::uint64_t seed;
  double mse;
  double se;
  double rate;
  double ratio;
};

struct SkippedCell {
  std::size_t config_index;
  std::string estimator;
  std::string profile;
  std::string reason;
};

struct RiskReport {
  std::vector<RiskRow> rows;
  std::vector<SkippedCell> skipped;
};

/// Monte Carlo risk for every (config, estimator, profile) plus one "max" row
/// per (config, estimator) taken over the non-zero profiles.
///
/// Replicate r of cell (i, e, p) uses key = derive_seed(seed, {i, e, p, r})
/// with e, p the enum codes; observations come from derive_seed(key, {1}) and
/// estimator randomness from derive_seed(key, {2}). Profile p of config i is
/// drawn with derive_seed(seed, {i, 1000 + p}). Results do not depend on
/// `workers` (0 = hardware concurrency).
RiskReport run_risk_experiment(const ExperimentSpec& spec, unsigned workers = 0);

struct RateFamily {
  std::string estimator;
  Regime regime;
  double gamma;
  std::size_t points;
  double min_ratio;
  double max_ratio;
  double spread;
  bool pass;
};

struct RateCheck {
  std::vector<RateFamily> families;
  bool pass;
};

/// Groups the "max" rows by (estimator, regime, gamma) and checks that
/// max/min of mse/rate stays within 10. Throws DiagnosticError when some
/// regime present in the report has fewer than 4 summary rows.
RateCheck rate_check(const RiskReport& report);

inline constexpr std::string_view kCsvHeader =
    "d,s,eps,gamma,c,estimator,profile,target,replicates,seed,mse,se,rate,ratio";

std::string report_to_csv(const RiskReport& report);
std::string report_to_json(const RiskReport& report);
std::string rate_check_to_json(const RateCheck& check);

/// format is "csv" or "json". Throws IoError naming the path on failure.
void emit(const RiskReport& report, const std::string& path, const std::string& format);

}  // namespace nsfe
