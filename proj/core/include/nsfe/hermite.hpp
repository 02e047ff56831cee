#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nsfe {

inline constexpr int kMaxHermiteDegree = 512;

/// Probabilists' Hermite polynomial He_k(x), so that E He_k(X) = m^k for
/// X ~ N(m, 1). Upward three-term recurrence; switches to extended precision
/// for k > 40 and |x| > 5. Throws UnsupportedDegree for k > 512.
double hermite_eval(int k, double x);

/// out[j] = He_j(x) for j = 0..out.size()-1, double precision recurrence.
void hermite_sequence(double x, std::span<double> out);

/// Gauss-Hermite rule for the standard normal weight:
/// E f(m + sd * Z) ~= sum_i weights[i] * f(m + sd * nodes[i]).
class GaussHermiteRule {
 public:
  explicit GaussHermiteRule(int n);

  /// Shared 200-node rule.
  static const GaussHermiteRule& standard();

  double expectation(const std::function<double(double)>& f, double mean = 0.0,
                     double sd = 1.0) const;

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// E He_k(X), X ~ N(theta, 1), by 200-node quadrature. Equals theta^k.
double hermite_shifted_mean(int k, double theta);

/// E He_k(X)^2, X ~ N(theta, 1), by the same quadrature.
double hermite_shifted_second_moment(int k, double theta);

}  // namespace nsfe
