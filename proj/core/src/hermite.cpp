#include "nsfe/hermite.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "nsfe/error.hpp"
#include "nsfe/xreal.hpp"

namespace nsfe {

namespace {

template <class T>
T hermite_recurrence(int k, const T& x) {
  if (k == 0) return T(1);
  T prev = 1, cur = x;
  for (int j = 1; j < k; ++j) {
    T next = x * cur - j * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

double hermite_eval(int k, double x) {
  if (k < 0 || k > kMaxHermiteDegree) {
    throw UnsupportedDegree("Hermite degree " + std::to_string(k) + " outside [0, " +
                            std::to_string(kMaxHermiteDegree) + "]");
  }
  if (k > 40 && std::abs(x) > 5.0) {
    return static_cast<double>(hermite_recurrence<xreal>(k, xreal(x)));
  }
  return hermite_recurrence<double>(k, x);
}

void hermite_sequence(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = x;
  for (std::size_t j = 2; j < out.size(); ++j) {
    out[j] = x * out[j - 1] - static_cast<double>(j - 1) * out[j - 2];
  }
}

GaussHermiteRule::GaussHermiteRule(int n) {
  if (n < 1) throw InvalidParameter("quadrature needs at least one node");
  // Orthonormal physicists' recurrence (weight exp(-z^2)). Nonnegative roots
  // are bracketed by a sign scan finer than the smallest gap, then polished by
  // safeguarded Newton; nodes map back through x = sqrt(2) z.
  using ld = long double;
  const ld pim4 = 1 / std::pow(std::numbers::pi_v<ld>, 0.25L);
  // Returns p_n(z); *deriv receives p_n'(z).
  auto eval = [&](ld z, ld* deriv) {
    ld p1 = pim4, p2 = 0;
    for (int j = 1; j <= n; ++j) {
      const ld p3 = p2;
      p2 = p1;
      p1 = z * std::sqrt(2.0L / j) * p2 - std::sqrt(static_cast<ld>(j - 1) / j) * p3;
    }
    *deriv = std::sqrt(2.0L * n) * p2;
    return p1;
  };

  std::vector<ld> roots;  // nonnegative, ascending
  if (n % 2 == 1) roots.push_back(0);
  const ld zmax = std::sqrt(static_cast<ld>(2 * n + 1)) + 1;
  const ld h = std::numbers::pi_v<ld> / std::sqrt(static_cast<ld>(2 * n + 1)) / 16;
  ld d;
  ld a = h / 2, fa = eval(a, &d);
  while (static_cast<int>(roots.size()) < (n + 1) / 2 && a < zmax) {
    const ld b = a + h, fb = eval(b, &d);
    if ((fa < 0) != (fb < 0)) {
      ld lo = a, hi = b, flo = fa, z = (a + b) / 2;
      for (int it = 0; it < 200; ++it) {
        const ld fz = eval(z, &d);
        if (fz == 0) break;
        if ((fz < 0) == (flo < 0)) {
          lo = z;
          flo = fz;
        } else {
          hi = z;
        }
        ld next = z - fz / d;
        if (!(next > lo && next < hi)) next = (lo + hi) / 2;
        if (std::abs(next - z) <= 4 * std::numeric_limits<ld>::epsilon() * std::max<ld>(1, z)) {
          z = next;
          break;
        }
        z = next;
      }
      roots.push_back(z);
    }
    a = b;
    fa = fb;
  }
  if (static_cast<int>(roots.size()) != (n + 1) / 2) {
    throw Error("Gauss-Hermite root scan found " + std::to_string(roots.size()) + " of " +
                std::to_string((n + 1) / 2) + " roots");
  }

  nodes_.resize(n);
  weights_.resize(n);
  const ld inv_sqrt_pi = 1 / std::sqrt(std::numbers::pi_v<ld>);
  const int half = n / 2;
  for (std::size_t r = 0; r < roots.size(); ++r) {
    eval(roots[r], &d);
    const double x = static_cast<double>(std::numbers::sqrt2_v<ld> * roots[r]);
    const double w = static_cast<double>(2 / (d * d) * inv_sqrt_pi);
    // Ascending: positive roots fill the upper half, mirrors the lower half.
    const int up = half + static_cast<int>(r);
    const int down = n - 1 - up;
    nodes_[down] = -x;
    weights_[down] = w;
    nodes_[up] = x;
    weights_[up] = w;
  }
}

const GaussHermiteRule& GaussHermiteRule::standard() {
  static const GaussHermiteRule rule(200);
  return rule;
}

double GaussHermiteRule::expectation(const std::function<double(double)>& f, double mean,
                                     double sd) const {
  // Sum from the tails inward so the many tiny contributions land first.
  long double acc = 0;
  const std::size_t n = nodes_.size();
  for (std::size_t a = 0, b = n - 1; a <= b && b < n; ++a, --b) {
    acc += static_cast<long double>(weights_[a]) * f(mean + sd * nodes_[a]);
    if (a != b) acc += static_cast<long double>(weights_[b]) * f(mean + sd * nodes_[b]);
  }
  return static_cast<double>(acc);
}

double hermite_shifted_mean(int k, double theta) {
  if (k < 0 || k > 64) throw UnsupportedDegree("hermite_shifted_mean supports k <= 64");
  return GaussHermiteRule::standard().expectation([k](double x) { return hermite_eval(k, x); },
                                                  theta);
}

double hermite_shifted_second_moment(int k, double theta) {
  if (k < 0 || k > 64) throw UnsupportedDegree("hermite_shifted_second_moment supports k <= 64");
  return GaussHermiteRule::standard().expectation(
      [k](double x) {
        const double h = hermite_eval(k, x);
        return h * h;
      },
      theta);
}

}  // namespace nsfe
