#pragma once

#include <cstdint>
#include <vector>

#include "nsfe/core.hpp"

namespace nsfe {

/// Two symmetric probability measures on [-M, M] with equal moments of order
/// 0..K and the largest possible gap in their |t|^gamma means.
struct MomentPrior {
  double gamma;
  int K;
  double M;
  std::vector<double> support0, weights0;
  std::vector<double> support1, weights1;
  /// int |t|^gamma dmu1 - int |t|^gamma dmu0 = 2 M^gamma delta_{K,gamma}.
  double gap;
  /// Best-approximation error of |x|^gamma by degree-K polynomials on [-1, 1].
  double delta;
};

struct PriorConfig {
  double Lambda;
  double M;
  int K;
};

/// K even >= 2. The measures sit on +-M x_j, x_j the alternation abscissae of
/// the best degree-K approximation, with weights solving the moment system.
/// Throws DegenerateApproximation, ConstructionError or CertificationError.
MomentPrior matching_measures(double gamma, int K, double M);

/// Lambda = sqrt(ln(s^2/d)), M = eps Lambda, K the smallest even integer >= (3/2) e ln(s^2/d).
/// Throws WrongRegime when s^2 < 4d.
PriorConfig prior_config(std::int64_t d, std::int64_t s, double eps);

/// int t^l dmu for the discrete measure, in extended precision.
double prior_moment(const std::vector<double>& support, const std::vector<double>& weights, int l);

struct ChiSquareBound {
  /// exp((s^2 / 2d) * series) - 1.
  double bound;
  /// sum_{k > K} Lambda^(2k) / k!.
  double series;
};

ChiSquareBound chi_square_bound(std::int64_t d, std::int64_t s, const PriorConfig& cfg);

struct ChiSquareExact {
  /// sum_k (E1(k) - E0(k))^2 / k! with moments of t / eps.
  double series;
  /// (1 + (s/2d)^2 / (1 - s/2d) * series)^d - 1.
  double chi_square;
};

ChiSquareExact chi_square_exact_small(std::int64_t d, std::int64_t s, const MomentPrior& prior,
                                      const PriorConfig& cfg);

/// theta_j = b_j * eta_j, b_j ~ Bernoulli(s / 2d), eta_j ~ mu_which. May leave B_0(s).
ThetaVector sample_prior(const MomentPrior& prior, std::int64_t d, std::int64_t s, int which,
                         std::uint64_t seed);

struct OutOfClassMass {
  /// P(Binomial(d, s/2d) > s).
  double exact;
  /// exp(-s / 16).
  double bound;
};

OutOfClassMass out_of_class_mass(std::int64_t d, std::int64_t s);

}  // namespace nsfe
