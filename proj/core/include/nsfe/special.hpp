#pragma once

#include <cstdint>

namespace nsfe {

/// P(|xi| > x) for standard normal xi.
double gaussian_two_sided_tail(double x);

/// E[|xi|^gamma 1{|xi| > x}] = 2^(gamma/2) / sqrt(pi) * Gamma((gamma+1)/2, x^2/2),
/// through an upper incomplete gamma (series / continued fraction).
double truncated_abs_moment(double gamma, double x);

/// Same quantity by adaptive Gauss-Kronrod quadrature of 2 * int_x^inf t^gamma phi(t) dt.
/// Independent of the incomplete-gamma route; used to cross-check it.
double truncated_abs_moment_quadrature(double gamma, double x);

/// sqrt(2 ln(1 + d / s^2)): the sparse-zone threshold in units of eps.
double sparse_threshold(std::int64_t d, std::int64_t s);

/// truncated_abs_moment(gamma, x*) / gaussian_two_sided_tail(x*), x* = sparse_threshold(d, s).
double alpha_gamma(double gamma, std::int64_t d, std::int64_t s);

namespace detail {

/// Upper incomplete gamma Gamma(a, z) (not regularized), a > 0, z >= 0.
double upper_incomplete_gamma(double a, double z);

}  // namespace detail

}  // namespace nsfe
