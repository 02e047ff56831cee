#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nsfe_test {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

/// E f(mean + sd * Z) by adaptive Gauss-Kronrod over mean +- 30 sd, split at
/// `breaks` (absolute points where f has kinks or jumps).
inline double gaussian_expectation(const std::function<double(double)>& f, double mean, double sd,
                                   std::vector<double> breaks = {}) {
  // 2-sd panels so no single Kronrod rule has to resolve the whole bump; past
  // 30 sd the density underflows and the relative stopping rule never fires.
  std::vector<double> pts;
  for (int k = -15; k <= 15; ++k) pts.push_back(mean + 2 * k * sd);
  const double lo = pts.front(), hi = pts.back();
  for (double b : breaks) {
    if (b > lo && b < hi && std::find(pts.begin(), pts.end(), b) == pts.end()) pts.push_back(b);
  }
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  auto g = [&](double x) { return f(x) * normal_pdf((x - mean) / sd) / sd; };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    // Depth is capped: on a 2-sd panel GK61 is already exact for smooth f, and
    // a deeper search only chases roundoff in oscillating integrands.
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, pts[i], pts[i + 1], 12,
                                                                             1e-13);
  }
  return total;
}

struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  long double sum = 0;
  for (double x : xs) sum += x;
  const double m = static_cast<double>(sum / n);
  long double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(static_cast<double>(ss / (n - 1)) / n)};
}

/// min over (a, b) of max_{x in grid} | |x|^gamma - a - b x^2 | by nested
/// golden-section search (the objective is convex in (a, b)).
inline double brute_force_delta_k1(double gamma, int grid = 4001) {
  std::vector<double> xs(grid);
  for (int i = 0; i < grid; ++i) xs[i] = static_cast<double>(i) / (grid - 1);
  auto err = [&](double a, double b) {
    double m = 0;
    for (double x : xs) m = std::max(m, std::abs(std::pow(x, gamma) - a - b * x * x));
    return m;
  };
  auto golden = [](auto&& f, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1) / 2;
    double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 60; ++it) {
      if (fc < fd) {
        hi = d; d = c; fd = fc; c = hi - r * (hi - lo); fc = f(c);
      } else {
        lo = c; c = d; fc = fd; d = lo + r * (hi - lo); fd = f(d);
      }
    }
    return f(0.5 * (lo + hi));
  };
  return golden([&](double b) { return golden([&](double a) { return err(a, b); }, -1.0, 1.0); },
                -1.0, 3.0);
}

}  // namespace nsfe_test
