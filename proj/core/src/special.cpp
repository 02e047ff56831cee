#include "nsfe/special.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>

#include "nsfe/error.hpp"

namespace nsfe {

namespace detail {

double upper_incomplete_gamma(double a, double z) {
  if (!(a > 0.0)) throw InvalidParameter("incomplete gamma needs a > 0");
  if (z < 0.0) throw InvalidParameter("incomplete gamma needs z >= 0");
  if (z == 0.0) return std::tgamma(a);
  constexpr double kEps = 1e-17;
  const double log_prefactor = a * std::log(z) - z;
  if (z < a + 1.0) {
    // Lower gamma by its power series, then subtract.
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= z / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::tgamma(a) - std::exp(log_prefactor) * sum;
  }
  // Continued fraction, modified Lentz.
  constexpr double kTiny = 1e-300;
  double b = z + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor) * h;
}

}  // namespace detail

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double kronrod;
  double error;
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double sum = f(c - dx) + f(c + dx);
    k += kWgk[j] * sum;
    if (j % 2 == 1) g += kWg[j / 2] * sum;
  }
  return {k * h, std::abs((k - g) * h)};
}

struct Piece {
  double a, b;
  Panel p;
  bool operator<(const Piece& o) const { return p.error < o.p.error; }
};

// Globally adaptive: bisect the panel with the largest error estimate until the
// summed estimate meets the tolerance, or the panel budget runs out.
double adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  constexpr int kMaxPanels = 4000;
  std::priority_queue<Piece> heap;
  double total = 0.0, error = 0.0;
  auto push = [&](double lo, double hi) {
    const Panel p = gauss_kronrod(f, lo, hi);
    total += p.kronrod;
    error += p.error;
    heap.push({lo, hi, p});
  };
  push(a, b);
  while (static_cast<int>(heap.size()) < kMaxPanels) {
    const double roundoff = 50 * std::numeric_limits<double>::epsilon() * std::abs(total);
    if (error <= std::max(rel_tol * std::abs(total), roundoff)) break;
    const Piece worst = heap.top();
    heap.pop();
    total -= worst.p.kronrod;
    error -= worst.p.error;
    const double m = 0.5 * (worst.a + worst.b);
    push(worst.a, m);
    push(m, worst.b);
  }
  // Re-sum to shed the cancellation from the running updates.
  total = 0.0;
  while (!heap.empty()) {
    total += heap.top().p.kronrod;
    heap.pop();
  }
  return total;
}

}  // namespace

double gaussian_two_sided_tail(double x) {
  if (x < 0.0) throw InvalidParameter("tail threshold must be nonnegative");
  return std::erfc(x / std::numbers::sqrt2);
}

double truncated_abs_moment(double gamma, double x) {
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be positive");
  if (x < 0.0) throw InvalidParameter("threshold must be nonnegative");
  const double a = 0.5 * (gamma + 1.0);
  return std::pow(2.0, 0.5 * gamma) / std::sqrt(std::numbers::pi) *
         detail::upper_incomplete_gamma(a, 0.5 * x * x);
}

double truncated_abs_moment_quadrature(double gamma, double x) {
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be positive");
  if (x < 0.0) throw InvalidParameter("threshold must be nonnegative");
  // t = w^2 removes the t^gamma singularity at 0:
  // 2 int t^g phi(t) dt = 2 int 2 w^(2g+1) phi(w^2) dw.
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const std::function<double(double)> integrand = [gamma, inv_sqrt_2pi](double w) {
    const double t = w * w;
    return 4.0 * std::pow(w, 2.0 * gamma + 1.0) * std::exp(-0.5 * t * t) * inv_sqrt_2pi;
  };
  const double lo = std::sqrt(x);
  const double hi = std::sqrt(x + 40.0);
  return adaptive(integrand, lo, hi, 1e-14);
}

double sparse_threshold(std::int64_t d, std::int64_t s) {
  if (d < 1 || s < 1 || s > d) throw InvalidParameter("need 1 <= s <= d");
  const double ratio = static_cast<double>(d) / (static_cast<double>(s) * static_cast<double>(s));
  return std::sqrt(2.0 * std::log1p(ratio));
}

double alpha_gamma(double gamma, std::int64_t d, std::int64_t s) {
  const double x = sparse_threshold(d, s);
  return truncated_abs_moment(gamma, x) / gaussian_two_sided_tail(x);
}

}  // namespace nsfe
