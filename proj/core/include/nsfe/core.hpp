#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nsfe {

/// One estimation problem: y_i = theta_i + eps * xi_i, i = 1..d, theta s-sparse,
/// target sum |theta_i|^gamma. `c` scales the polynomial degrees of the dense
/// block estimator.
class ProblemConfig {
 public:
  static constexpr double kDefaultC = 0.01;

  /// Validates all invariants; throws InvalidParameter.
  ProblemConfig(std::int64_t d, std::int64_t s, double eps, double gamma, double c = kDefaultC);

  std::int64_t d() const noexcept { return d_; }
  std::int64_t s() const noexcept { return s_; }
  double eps() const noexcept { return eps_; }
  double gamma() const noexcept { return gamma_; }
  double c() const noexcept { return c_; }

  /// The dense estimator's variance bounds need c small enough:
  /// 2c ln 6 <= 1/8, c ln 6 + c < 1/4 and c ln(1 + 4/c) < 1/8.
  static bool tuning_constant_admissible(double c) noexcept;

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;

 private:
  std::int64_t d_;
  std::int64_t s_;
  double eps_;
  double gamma_;
  double c_;
};

class ThetaVector {
 public:
  ThetaVector() = default;
  explicit ThetaVector(std::vector<double> values) : values_(std::move(values)) {}

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::size_t nonzero_count() const noexcept;
  bool in_sparsity_class(std::int64_t s) const noexcept {
    return static_cast<std::int64_t>(nonzero_count()) <= s;
  }
  /// Throws InvalidParameter when the length differs from cfg.d().
  void check_dimension(const ProblemConfig& cfg) const;

 private:
  std::vector<double> values_;
};

enum class Regime { Dense, Sparse };

const char* to_string(Regime r) noexcept;

/// Dense iff s^2 >= 4d (the tie goes to the dense estimator).
Regime regime(const ProblemConfig& cfg) noexcept;

/// sum |theta_i|^gamma.
double big_n_gamma(std::span<const double> theta, double gamma);
/// N_gamma for gamma <= 1, the l_gamma norm N_gamma^{1/gamma} for gamma > 1.
double n_gamma(std::span<const double> theta, double gamma);

/// Minimax rate expression (all constants set to 1).
///
/// The branch uses s <= sqrt(d) versus s > sqrt(d), which is not the same
/// boundary as `regime`. For gamma > 1 not an even integer in the s > sqrt(d)
/// branch only a bracket is known; `value` is then the upper end.
struct MinimaxRate {
  double value;
  double lower;
  double upper;
  bool bracket;
  std::string label;
};

MinimaxRate minimax_rate(const ProblemConfig& cfg);

bool is_even_integer(double gamma) noexcept;
bool is_positive_integer(double gamma) noexcept;

/// theta + eps * xi with xi drawn from NormalStream(derive_seed(seed, {})).
std::vector<double> simulate_observations(std::span<const double> theta, double eps,
                                          std::uint64_t seed);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> terms) noexcept;

}  // namespace nsfe
