#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsfe/approx.hpp"
#include "nsfe/core.hpp"
#include "nsfe/xreal.hpp"

namespace nsfe {

enum class EstimatorId { DenseBlock, EvenClone, SparseThreshold };
enum class EstimatorChoice { Auto, Dense, Even, Sparse };

const char* to_string(EstimatorId id) noexcept;
const char* to_string(EstimatorChoice choice) noexcept;
EstimatorChoice parse_estimator_choice(const std::string& name);

struct EstimateResult {
  EstimatorId estimator_id;
  double value;
  /// |value|^(1/gamma), filled by the norm estimators when gamma >= 1.
  std::optional<double> norm_value;
  std::uint64_t seed;
  std::map<std::string, double> aux;
};

/// Dense-zone block parameters; l = 0..L.
struct BlockSchedule {
  double sigma;
  double c;
  int L;
  std::vector<int> K;
  std::vector<double> M;
  std::vector<double> t;

  /// Block whose interval (sigma t_{l-1}, sigma t_l] contains |v| (v = 0 goes
  /// to block 0); L + 1 means |v| > sigma t_L.
  int block_of(double v) const noexcept;
};

/// Throws WrongRegime when s^2 < 4d.
BlockSchedule block_schedule(const ProblemConfig& cfg);

/// Shared read-mostly cache of best_poly_approx(gamma, K).
std::shared_ptr<const PolyApprox> cached_poly_approx(double gamma, int K);

/// P_hat(u) = sum_{k=1..K} sigma^(2k) a_{2k} M^(gamma-2k) He_{2k}(u / sigma).
/// The constant coefficient a_0 is left out.
class BlockPolynomial {
 public:
  BlockPolynomial(const PolyApprox& approx, double M, double sigma);

  double operator()(double u) const;
  /// E P_hat(X), X ~ N(theta, sigma^2), in closed form: sum_k a_{2k} M^(gamma-2k) theta^(2k).
  double mean(double theta) const;

  int K() const noexcept { return K_; }
  double M() const noexcept { return M_; }
  double sigma() const noexcept { return sigma_; }

 private:
  int K_;
  double gamma_;
  double M_;
  double sigma_;
  std::vector<xreal> a_;       // a_{2k}, k = 0..K
  std::vector<xreal> scaled_;  // sigma^(2k) a_{2k} M^(gamma-2k), k = 0..K (index 0 unused)
  std::vector<long double> scaled_fast_;
};

/// Per-coordinate statistic of the dense block estimator.
class DenseBlockEstimator {
 public:
  explicit DenseBlockEstimator(const ProblemConfig& cfg);

  const BlockSchedule& schedule() const noexcept { return schedule_; }
  const BlockPolynomial& block(int l) const { return blocks_.at(static_cast<std::size_t>(l)); }

  /// xi_gamma(u, v): block-l polynomial at u when |v| lies in block l, |u|^gamma past the last block.
  double term(double u, double v) const;

 private:
  double gamma_;
  BlockSchedule schedule_;
  std::vector<BlockPolynomial> blocks_;
};

/// (y + z, y - z), z_i ~ N(0, eps^2) i.i.d. from the seeded stream.
std::pair<std::vector<double>, std::vector<double>> duplicate_sample(std::span<const double> y,
                                                                     double eps,
                                                                     std::uint64_t seed);

/// Row-major d x gamma matrix of cloned observations.
struct CloneMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double operator()(std::size_t i, std::size_t m) const { return data[i * cols + m]; }
};

/// y_{i,m} = y_i + sqrt(gamma) (g_{i,m} - mean_m g_{i,m}), g ~ N(0, eps^2): entries
/// N(theta_i, gamma eps^2), independent across m.
CloneMatrix clone_sample(std::span<const double> y, double eps, int gamma, std::uint64_t seed);

EstimateResult estimate_dense(std::span<const double> y, const ProblemConfig& cfg,
                              std::uint64_t seed);
EstimateResult estimate_even(std::span<const double> y, const ProblemConfig& cfg,
                             std::uint64_t seed);
EstimateResult estimate_sparse(std::span<const double> y, const ProblemConfig& cfg);

/// Sparse -> SparseThreshold; dense with even integer gamma -> EvenClone;
/// dense otherwise -> DenseBlock.
EstimateResult estimate_auto(std::span<const double> y, const ProblemConfig& cfg,
                             std::uint64_t seed);

/// estimate_auto plus norm_value = |value|^(1/gamma) for gamma >= 1. For
/// gamma < 1 the target n_gamma is the functional itself and norm_value stays empty.
EstimateResult estimate_norm(std::span<const double> y, const ProblemConfig& cfg,
                             std::uint64_t seed);

/// Runs the named estimator; `norm` adds norm_value as in estimate_norm.
EstimateResult estimate(std::span<const double> y, const ProblemConfig& cfg, std::uint64_t seed,
                        EstimatorChoice choice, bool norm = false);

}  // namespace nsfe
