#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "nsfe/approx.hpp"
#include "nsfe/error.hpp"
#include "nsfe/priors.hpp"
#include "support.hpp"

using namespace nsfe;

namespace {

double abs_moment(const std::vector<double>& t, const std::vector<double>& w, double g) {
  double acc = 0;
  for (std::size_t i = 0; i < t.size(); ++i) acc += w[i] * std::pow(std::abs(t[i]), g);
  return acc;
}

double mass(const std::vector<double>& w) {
  double acc = 0;
  for (double x : w) acc += x;
  return acc;
}

// Weight of the measure at +-x (summed over both signs).
double weight_at(const std::vector<double>& t, const std::vector<double>& w, double x) {
  double acc = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(std::abs(t[i]) - x) < 1e-12) acc += w[i];
  }
  return acc;
}

}  // namespace

TEST_CASE("gamma = 1, K = 2, M = 1: the classical pair") {
  const auto p = matching_measures(1.0, 2, 1.0);
  CHECK(p.support0 == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(p.weights0[0] == doctest::Approx(0.125).epsilon(1e-9));
  CHECK(p.weights0[1] == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(p.weights0[2] == doctest::Approx(0.125).epsilon(1e-9));
  REQUIRE(p.support1.size() == 2);
  CHECK(p.support1[0] == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(p.support1[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p.weights1[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(p.gap - 0.25) < 1e-6);
  // Independent oracle: twice the brute-force best-approximation error.
  CHECK(std::abs(p.gap - 2 * nsfe_test::brute_force_delta_k1(1.0)) < 1e-6);
  for (int l = 0; l <= 2; ++l) {
    CHECK(prior_moment(p.support0, p.weights0, l) == doctest::Approx(prior_moment(p.support1, p.weights1, l)));
  }
}

TEST_CASE("K = 2 gap matches the brute-force minimax for other gamma") {
  for (double g : {0.5, 1.5, 3.0}) {
    const auto p = matching_measures(g, 2, 1.0);
    const double oracle = 2 * nsfe_test::brute_force_delta_k1(g);
    CHECK(p.gap >= oracle * (1 - 1e-9));
    CHECK(p.gap <= oracle * (1 + 1e-4));
  }
}

TEST_CASE("weights equal the divided-difference kernel of the alternation nodes") {
  // The only signed measure on n nodes u_j annihilating polynomials of degree n-2 in u
  // has weights proportional to 1 / prod_{i != j} (u_j - u_i).
  for (double g : {0.5, 1.0, 1.5}) {
    for (int K : {2, 4, 8, 12}) {
      const auto p = matching_measures(g, K, 1.0);
      const auto u = alternation_set(best_poly_approx(g, K / 2));
      std::vector<double> c(u.size());
      double total = 0;
      for (std::size_t j = 0; j < u.size(); ++j) {
        long double prod = 1;
        for (std::size_t i = 0; i < u.size(); ++i) {
          if (i != j) prod *= static_cast<long double>(u[j]) - u[i];
        }
        c[j] = static_cast<double>(1 / prod);
        total += std::abs(c[j]);
      }
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double x = std::sqrt(u[j]);
        const double expected = 2 * std::abs(c[j]) / total;
        const double got = weight_at(p.support0, p.weights0, x) + weight_at(p.support1, p.weights1, x);
        CAPTURE(g);
        CAPTURE(K);
        CAPTURE(j);
        CHECK(got == doctest::Approx(expected).epsilon(1e-9));
        // Sign pattern: positive kernel entries go to the same side throughout.
        if (j > 0) CHECK(c[j] * c[j - 1] < 0);
      }
    }
  }
}

TEST_CASE("certified properties on a grid of (gamma, K)") {
  for (double g : {0.5, 1.0, 1.5, 2.5, 3.0}) {
    for (int K : {2, 4, 6, 10, 16, 24}) {
      if (std::fmod(g, 2.0) == 0.0 && g <= K) continue;
      const double M = 1.7;
      const auto p = matching_measures(g, K, M);
      CAPTURE(g);
      CAPTURE(K);
      CHECK(std::abs(mass(p.weights0) - 1) <= 1e-10);
      CHECK(std::abs(mass(p.weights1) - 1) <= 1e-10);
      for (const auto* s : {&p.support0, &p.support1}) {
        for (std::size_t i = 0; i < s->size(); ++i) {
          CHECK((*s)[i] == -(*s)[s->size() - 1 - i]);
          CHECK(std::abs((*s)[i]) <= M);
        }
      }
      for (int l = 0; l <= K; ++l) {
        const double d = prior_moment(p.support0, p.weights0, l) - prior_moment(p.support1, p.weights1, l);
        CHECK(std::abs(d) <= 1e-8 * std::pow(M, l));
      }
      const double direct_gap = abs_moment(p.support1, p.weights1, g) - abs_moment(p.support0, p.weights0, g);
      const double expected = 2 * std::pow(M, g) * best_poly_approx(g, K / 2).delta;
      CHECK(direct_gap == doctest::Approx(expected).epsilon(1e-6));
      CHECK(p.gap == doctest::Approx(expected).epsilon(1e-6));
      CHECK(p.gap > 0);
    }
  }
}

TEST_CASE("scaling in M") {
  for (double g : {0.5, 1.0, 1.5}) {
    const auto unit = matching_measures(g, 6, 1.0);
    const double M = 3.25;
    const auto scaled = matching_measures(g, 6, M);
    REQUIRE(unit.support0.size() == scaled.support0.size());
    REQUIRE(unit.support1.size() == scaled.support1.size());
    for (std::size_t i = 0; i < unit.support0.size(); ++i) {
      CHECK(scaled.support0[i] == doctest::Approx(M * unit.support0[i]).epsilon(1e-8));
      CHECK(scaled.weights0[i] == doctest::Approx(unit.weights0[i]).epsilon(1e-8));
    }
    for (std::size_t i = 0; i < unit.support1.size(); ++i) {
      CHECK(scaled.support1[i] == doctest::Approx(M * unit.support1[i]).epsilon(1e-8));
    }
    CHECK(scaled.gap == doctest::Approx(std::pow(M, g) * unit.gap).epsilon(1e-8));
  }
}

TEST_CASE("matching_measures errors") {
  CHECK_THROWS_AS(matching_measures(1.0, 3, 1.0), InvalidParameter);
  CHECK_THROWS_AS(matching_measures(1.0, 0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(matching_measures(1.0, 2, 0.0), InvalidParameter);
  CHECK_THROWS_AS(matching_measures(0.0, 2, 1.0), InvalidParameter);
  CHECK_THROWS_AS(matching_measures(2.0, 2, 1.0), DegenerateApproximation);
  CHECK_THROWS_AS(matching_measures(4.0, 6, 1.0), DegenerateApproximation);
  CHECK_NOTHROW(matching_measures(4.0, 2, 1.0));
}

TEST_CASE("prior_config examples") {
  const auto c = prior_config(100, 20, 1.0);
  CHECK(c.Lambda == doctest::Approx(std::sqrt(std::log(4.0))).epsilon(1e-15));
  CHECK(std::abs(c.Lambda - 1.1774) < 1e-4);
  CHECK(1.5 * M_E * std::log(4.0) == doctest::Approx(5.653).epsilon(1e-3));
  CHECK(c.K == 6);
  CHECK(std::abs(prior_config(256, 256, 1.0).Lambda - 2.3548) < 1e-4);
  const auto e = prior_config(100, 40, 0.37);
  CHECK(e.M == 0.37 * e.Lambda);
  for (std::int64_t d : {16, 100, 1000}) {
    for (std::int64_t s = static_cast<std::int64_t>(std::ceil(2 * std::sqrt(double(d)))); s <= d; s += 7) {
      const auto p = prior_config(d, s, 1.0);
      CHECK(p.K % 2 == 0);
      CHECK(p.K >= 1.5 * M_E * p.Lambda * p.Lambda);
      CHECK(p.K - 2 < 1.5 * M_E * p.Lambda * p.Lambda);
    }
  }
  CHECK_THROWS_AS(prior_config(100, 19, 1.0), WrongRegime);
}

TEST_CASE("chi_square_bound") {
  const auto cfg = prior_config(100, 20, 1.0);
  const auto b = chi_square_bound(100, 20, cfg);
  CHECK(b.bound < 0.25);
  // Oracle: sum_{k > K} x^k / k! = e^x P(K + 1, x), P the regularized lower incomplete gamma.
  const double x = cfg.Lambda * cfg.Lambda;
  CHECK(b.series == doctest::Approx(std::exp(x) * boost::math::gamma_p(cfg.K + 1, x)).epsilon(1e-12));
  CHECK(b.series >= std::exp(x) * boost::math::gamma_p(cfg.K + 1, x));
  CHECK(b.bound == doctest::Approx(std::expm1(400.0 / 200.0 * b.series)).epsilon(1e-14));

  const auto tiny = chi_square_bound(100, 20, PriorConfig{1e-6, 1e-6, 6});
  CHECK(tiny.bound < 1e-40);
  CHECK(chi_square_bound(100, 20, PriorConfig{0.0, 0.0, 6}).bound == 0.0);

  double prev = INFINITY;
  for (int K = 2; K <= 30; K += 2) {
    auto c = cfg;
    c.K = K;
    const double v = chi_square_bound(100, 20, c).bound;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("chi_square_bound stays below 1/4 across the dense zone") {
  for (std::int64_t d : {4, 16, 64, 100, 256, 1000, 4096, 16384}) {
    for (std::int64_t s = static_cast<std::int64_t>(std::ceil(2 * std::sqrt(double(d)))); s <= d;
         s = std::max(s + 1, s * 5 / 4)) {
      CAPTURE(d);
      CAPTURE(s);
      CHECK(chi_square_bound(d, s, prior_config(d, s, 1.0)).bound < 0.25);
    }
  }
}

TEST_CASE("exact chi-square series against the bound ingredient") {
  for (auto [d, s] : std::vector<std::pair<std::int64_t, std::int64_t>>{{100, 20}, {100, 40}, {64, 64}, {1000, 100}}) {
    const auto cfg = prior_config(d, s, 1.3);
    for (double g : {0.5, 1.0, 1.5}) {
      const auto prior = matching_measures(g, cfg.K, cfg.M);
      const auto exact = chi_square_exact_small(d, s, prior, cfg);
      const auto bound = chi_square_bound(d, s, cfg);
      CHECK(exact.series >= 0.0);
      CHECK(exact.chi_square >= 0.0);
      CHECK(exact.series <= bound.series * (1 + 1e-6));
      CHECK(exact.chi_square <= bound.bound);
      // Matched moments: the terms k <= K vanish.
      const double eps = cfg.M / cfg.Lambda;
      for (int k = 0; k <= cfg.K; ++k) {
        const double diff = (prior_moment(prior.support1, prior.weights1, k) -
                             prior_moment(prior.support0, prior.weights0, k)) / std::pow(eps, k);
        CHECK(diff * diff / std::tgamma(k + 1.0) <= 1e-16);
      }
    }
  }
  // gamma = 1, K = 2, M = 1 with Lambda = M.
  const auto prior = matching_measures(1.0, 2, 1.0);
  const PriorConfig cfg{1.0, 1.0, 2};
  const auto exact = chi_square_exact_small(100, 20, prior, cfg);
  CHECK(exact.series <= chi_square_bound(100, 20, cfg).series * (1 + 1e-6));
  CHECK(exact.series > 0.0);
}

TEST_CASE("sample_prior") {
  const std::int64_t d = 200, s = 30;
  const auto cfg = prior_config(d, s, 1.0);
  const auto prior = matching_measures(1.0, cfg.K, cfg.M);
  std::vector<double> counts;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const auto theta = sample_prior(prior, d, s, 1, r);
    counts.push_back(static_cast<double>(theta.nonzero_count()));
    for (double t : theta.values()) CHECK(std::abs(t) <= cfg.M);
  }
  const auto ms = nsfe_test::mean_se(counts);
  // mu1 has no atom at 0 here, so nonzeros are exactly the Bernoulli gates.
  CHECK(weight_at(prior.support1, prior.weights1, 0.0) == 0.0);
  CHECK(std::abs(ms.mean - s / 2.0) <= 3 * ms.se);

  const auto a = sample_prior(prior, d, s, 0, 99);
  const auto b = sample_prior(prior, d, s, 0, 99);
  CHECK(std::vector<double>(a.values().begin(), a.values().end()) ==
        std::vector<double>(b.values().begin(), b.values().end()));
  CHECK_THROWS_AS(sample_prior(prior, d, s, 2, 1), InvalidParameter);
}

TEST_CASE("out_of_class_mass") {
  const auto m = out_of_class_mass(100, 10);
  CHECK(m.bound == doctest::Approx(std::exp(-10.0 / 16)).epsilon(1e-15));
  CHECK(std::abs(m.bound - 0.5353) < 1e-4);
  CHECK(m.exact <= m.bound);
  const boost::math::binomial_distribution<double> bin(100, 10.0 / 200);
  CHECK(m.exact == doctest::Approx(boost::math::cdf(boost::math::complement(bin, 10.0))).epsilon(1e-10));

  for (std::int64_t d : {1, 7, 50}) CHECK(out_of_class_mass(d, d).exact == 0.0);

  int points = 0;
  for (std::int64_t d : {10, 50, 200, 1000, 5000}) {
    for (std::int64_t s : {1L, 3L, d / 10 + 1, d / 2}) {
      const auto r = out_of_class_mass(d, s);
      const boost::math::binomial_distribution<double> oracle(double(d), double(s) / (2.0 * d));
      CHECK(r.exact <= r.bound);
      CHECK(r.exact == doctest::Approx(boost::math::cdf(boost::math::complement(oracle, double(s)))).epsilon(1e-9));
      ++points;
    }
  }
  CHECK(points == 20);
  CHECK_THROWS_AS(out_of_class_mass(10, 11), InvalidParameter);
}
