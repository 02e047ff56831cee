#include "nsfe/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nsfe/approx.hpp"
#include "nsfe/error.hpp"
#include "nsfe/linalg.hpp"
#include "nsfe/random.hpp"
#include "nsfe/xreal.hpp"

namespace nsfe {

namespace {

struct Atom {
  double t;
  double w;
};

// Symmetrized atoms +-M x with weight w/2 each (one atom at 0).
void add_symmetric(std::vector<Atom>& atoms, double x, double w, double M) {
  if (x == 0.0) {
    atoms.push_back({0.0, w});
  } else {
    atoms.push_back({-M * x, 0.5 * w});
    atoms.push_back({M * x, 0.5 * w});
  }
}

void split(std::vector<Atom> atoms, std::vector<double>& support, std::vector<double>& weights) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });
  for (const Atom& a : atoms) {
    support.push_back(a.t);
    weights.push_back(a.w);
  }
}

xreal moment_x(const std::vector<double>& support, const std::vector<double>& weights, int l,
               const xreal& scale = 1) {
  xreal acc = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    acc += xreal(weights[i]) * pow(xreal(support[i]) / scale, l);
  }
  return acc;
}

xreal abs_moment_x(const std::vector<double>& support, const std::vector<double>& weights,
                   double gamma) {
  xreal acc = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] != 0.0) acc += xreal(weights[i]) * pow(abs(xreal(support[i])), xreal(gamma));
  }
  return acc;
}

void certify(const MomentPrior& p) {
  auto fail = [](const std::string& what) { throw CertificationError("moment prior: " + what); };
  for (const auto* side : {&p.support0, &p.support1}) {
    const auto& s = *side;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != -s[s.size() - 1 - i]) fail("support not symmetric about 0");
      if (std::abs(s[i]) > p.M * (1 + 1e-15)) fail("support leaves [-M, M]");
    }
  }
  for (std::size_t i = 0; i < p.weights0.size(); ++i) {
    if (p.weights0[i] < 0 || p.weights0[i] != p.weights0[p.weights0.size() - 1 - i]) {
      fail("weights of mu0 not symmetric");
    }
  }
  for (std::size_t i = 0; i < p.weights1.size(); ++i) {
    if (p.weights1[i] < 0 || p.weights1[i] != p.weights1[p.weights1.size() - 1 - i]) {
      fail("weights of mu1 not symmetric");
    }
  }
  for (int l = 0; l <= p.K; ++l) {
    const xreal m0 = moment_x(p.support0, p.weights0, l);
    const xreal m1 = moment_x(p.support1, p.weights1, l);
    if (l == 0 && (abs(m0 - 1) > 1e-10 || abs(m1 - 1) > 1e-10)) fail("total mass differs from 1");
    if (abs(m0 - m1) > 1e-8 * std::pow(p.M, l)) {
      fail("moment of order " + std::to_string(l) + " not matched");
    }
  }
  const double expected = 2.0 * std::pow(p.M, p.gamma) * p.delta;
  if (std::abs(p.gap - expected) > 1e-6 * expected) {
    std::ostringstream msg;
    msg << "gap " << p.gap << " differs from 2 M^gamma delta = " << expected;
    fail(msg.str());
  }
}

}  // namespace

MomentPrior matching_measures(double gamma, int K, double M) {
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be positive");
  if (K < 2 || K % 2 != 0) throw InvalidParameter("K must be an even integer >= 2");
  if (!(M > 0.0)) throw InvalidParameter("M must be positive");

  const PolyApprox approx = best_poly_approx(gamma, K / 2);
  const std::vector<double> u = alternation_set(approx);
  const std::size_t n = u.size();

  std::vector<double> x(n);
  std::vector<int> sign(n);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::sqrt(u[j]);
    sign[j] = residual(approx, x[j]) > 0 ? 1 : -1;
    if (j > 0 && sign[j] == sign[j - 1]) {
      throw ConstructionError("alternation set does not alternate in sign; try another K");
    }
  }

  // Signed weights v_j annihilate 1, x^2, ..., x^K and have total variation 2.
  detail::XMatrix m(n);
  std::vector<xreal> rhs(n, xreal(0));
  const std::size_t even_moments = static_cast<std::size_t>(K / 2) + 1;
  if (n != even_moments + 1) throw ConstructionError("unexpected alternation set size");
  for (std::size_t j = 0; j < n; ++j) {
    const xreal uj = xreal(x[j]) * xreal(x[j]);
    xreal power = 1;
    for (std::size_t l = 0; l < even_moments; ++l) {
      m(l, j) = power;
      power *= uj;
    }
    m(n - 1, j) = sign[j];
  }
  rhs[n - 1] = 2;
  if (!detail::solve_in_place(std::move(m), rhs)) {
    throw ConstructionError("moment system is numerically singular; try another K");
  }

  std::vector<Atom> atoms0, atoms1;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = static_cast<double>(rhs[j] * sign[j]);
    if (w < 0.0) throw ConstructionError("negative weight in moment system; try another K");
    add_symmetric(sign[j] > 0 ? atoms1 : atoms0, x[j], w, M);
  }

  MomentPrior p{gamma, K, M, {}, {}, {}, {}, 0.0, approx.delta};
  split(std::move(atoms0), p.support0, p.weights0);
  split(std::move(atoms1), p.support1, p.weights1);
  p.gap = static_cast<double>(abs_moment_x(p.support1, p.weights1, gamma) -
                              abs_moment_x(p.support0, p.weights0, gamma));
  certify(p);
  return p;
}

PriorConfig prior_config(std::int64_t d, std::int64_t s, double eps) {
  if (d < 1 || s < 1 || s > d) throw InvalidParameter("need 1 <= s <= d");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  const double ratio = static_cast<double>(s) * static_cast<double>(s) / static_cast<double>(d);
  if (ratio < 4.0) throw WrongRegime("prior construction needs s^2 >= 4d");
  const double log_ratio = std::log(ratio);
  PriorConfig cfg;
  cfg.Lambda = std::sqrt(log_ratio);
  cfg.M = eps * cfg.Lambda;
  const double need = 1.5 * std::numbers::e * log_ratio;
  int K = static_cast<int>(std::ceil(need));
  if (K % 2 != 0) ++K;
  cfg.K = std::max(K, 2);
  return cfg;
}

double prior_moment(const std::vector<double>& support, const std::vector<double>& weights, int l) {
  return static_cast<double>(moment_x(support, weights, l));
}

ChiSquareBound chi_square_bound(std::int64_t d, std::int64_t s, const PriorConfig& cfg) {
  const double lam2 = cfg.Lambda * cfg.Lambda;
  double series = 0.0;
  if (lam2 > 0.0) {
    int k = cfg.K + 1;
    double term = std::exp(k * std::log(lam2) - std::lgamma(k + 1.0));
    for (;; ++k) {
      series += term;
      const double ratio = lam2 / (k + 1);
      const double next = term * ratio;
      if (ratio < 0.5 && next <= 1e-15 * series) {
        // Geometric remainder bound: sum_{j >= k+1} term_j <= next / (1 - ratio).
        series += next / (1.0 - ratio);
        break;
      }
      term = next;
    }
  }
  const double factor = static_cast<double>(s) * static_cast<double>(s) / (2.0 * static_cast<double>(d));
  return {std::expm1(factor * series), series};
}

ChiSquareExact chi_square_exact_small(std::int64_t d, std::int64_t s, const MomentPrior& prior,
                                      const PriorConfig& cfg) {
  if (d < 1 || s < 1 || s > d) throw InvalidParameter("need 1 <= s <= d");
  const xreal eps = xreal(cfg.M) / xreal(cfg.Lambda);
  const double lam2 = cfg.Lambda * cfg.Lambda;
  xreal series = 0;
  xreal factorial = 1;
  double envelope = 1.0;  // Lambda^(2k) / k!
  for (int k = 0; k < 2000; ++k) {
    if (k > 0) {
      factorial *= k;
      envelope *= lam2 / k;
    }
    if (k % 2 == 0) {
      const xreal diff = moment_x(prior.support1, prior.weights1, k, eps) -
                         moment_x(prior.support0, prior.weights0, k, eps);
      series += diff * diff / factorial;
    }
    if (k > prior.K && lam2 / (k + 1) < 0.5 && envelope <= 1e-15 * std::max(1e-300, static_cast<double>(series))) {
      break;
    }
  }
  const double p = static_cast<double>(s) / (2.0 * static_cast<double>(d));
  const double per_coordinate = p * p / (1.0 - p) * static_cast<double>(series);
  return {static_cast<double>(series), std::expm1(static_cast<double>(d) * std::log1p(per_coordinate))};
}

ThetaVector sample_prior(const MomentPrior& prior, std::int64_t d, std::int64_t s, int which,
                         std::uint64_t seed) {
  if (d < 1 || s < 1 || s > d) throw InvalidParameter("need 1 <= s <= d");
  if (which != 0 && which != 1) throw InvalidParameter("which must be 0 or 1");
  const auto& support = which == 0 ? prior.support0 : prior.support1;
  const auto& weights = which == 0 ? prior.weights0 : prior.weights1;
  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) cumulative[i] = (acc += weights[i]);

  const NormalStream stream(derive_seed(seed, {}));
  const double p = static_cast<double>(s) / (2.0 * static_cast<double>(d));
  std::vector<double> theta(static_cast<std::size_t>(d), 0.0);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (stream.uniform(2 * j) >= p) continue;
    const double pick = stream.uniform(2 * j + 1) * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                  support.size() - 1);
    theta[j] = support[idx];
  }
  return ThetaVector(std::move(theta));
}

OutOfClassMass out_of_class_mass(std::int64_t d, std::int64_t s) {
  if (d < 1 || s < 1 || s > d) throw InvalidParameter("need 1 <= s <= d");
  const double bound = std::exp(-static_cast<double>(s) / 16.0);
  if (s == d) return {0.0, bound};
  const double p = static_cast<double>(s) / (2.0 * static_cast<double>(d));
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgd = std::lgamma(static_cast<double>(d) + 1.0);
  double total = 0.0;
  // The pmf decreases past the mode s/2, so summing upward from s+1 is stable.
  for (std::int64_t k = s + 1; k <= d; ++k) {
    const double kk = static_cast<double>(k);
    const double term = std::exp(lgd - std::lgamma(kk + 1.0) - std::lgamma(static_cast<double>(d - k) + 1.0) +
                                 kk * lp + static_cast<double>(d - k) * lq);
    total += term;
    if (term < 1e-18 * total) break;
  }
  return {total, bound};
}

}  // namespace nsfe
