#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nsfe/xreal.hpp"

namespace nsfe {

/// Best uniform approximation of |x|^gamma on [-1, 1] by even polynomials of
/// degree <= 2K, stored canonically: P(x) = sum_k coeffs[k] * x^(2k).
struct PolyApprox {
  double gamma = 0.0;
  int K = 0;
  std::vector<xreal> coeffs;
  /// Certified sup-norm error; zero only for exactly representable targets.
  double delta = 0.0;
  /// Equioscillation abscissae in u = x^2, strictly increasing.
  std::vector<double> alternation;
};

struct RemezOptions {
  /// Stop once (max |residual| - levelled error) / levelled error < tol.
  double tol = 1e-10;
  int max_iterations = 100;
  /// Uniform u-grid used to certify delta.
  int certify_points = 100'000;
};

/// Remez exchange on g(u) = u^(gamma/2), u in [0, 1], in a shifted Chebyshev
/// basis; canonical coefficients are produced last in extended precision.
/// Throws InvalidParameter or ConvergenceError.
PolyApprox best_poly_approx(double gamma, int K, const RemezOptions& options);
PolyApprox best_poly_approx(double gamma, int K, double tol = RemezOptions{}.tol);

/// Horner in u = x^2 with extended-precision accumulation.
double eval_poly(const PolyApprox& p, double x);
xreal eval_poly(const PolyApprox& p, const xreal& x);

/// |x|^gamma - P(x).
double residual(const PolyApprox& p, double x);

/// Throws DegenerateApproximation when delta == 0.
std::vector<double> alternation_set(const PolyApprox& p);

/// {gamma, K, delta, coeffs: [decimal strings], alternation: [numbers]}
std::string to_json(const PolyApprox& p);
PolyApprox poly_approx_from_json(std::string_view text);

}  // namespace nsfe
