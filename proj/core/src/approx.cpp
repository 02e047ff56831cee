#include "nsfe/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include "nsfe/core.hpp"
#include "nsfe/error.hpp"
#include "nsfe/linalg.hpp"

namespace nsfe {

namespace {

using ld = long double;

// p(u) = sum_k c[k] T_k(2u - 1). The Remez iteration only ever sees this
// form; the long double copy drives root and extremum searches.
struct ChebSeries {
  std::vector<xreal> coeffs;
  std::vector<ld> fast;

  explicit ChebSeries(std::vector<xreal> c) : coeffs(std::move(c)) {
    fast.reserve(coeffs.size());
    for (const xreal& v : coeffs) fast.push_back(static_cast<ld>(v));
  }

  ld operator()(ld u) const {
    const ld t = 2 * u - 1;
    ld b1 = 0, b2 = 0;
    for (std::size_t k = fast.size(); k-- > 1;) {
      const ld b0 = 2 * t * b1 - b2 + fast[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + fast[0];
  }
};

struct Target {
  double gamma;

  ld operator()(ld x) const { return x == 0 ? 0 : std::pow(x, static_cast<ld>(gamma)); }
};

// Residual as a function of x in [0, 1] (u = x^2).
struct Residual {
  Target f;
  const ChebSeries* p;

  ld operator()(ld x) const { return f(x) - (*p)(x * x); }
};

std::vector<xreal> shifted_chebyshev_row(const xreal& u, int K) {
  std::vector<xreal> row(static_cast<std::size_t>(K) + 1);
  const xreal t = 2 * u - 1;
  row[0] = 1;
  if (K >= 1) row[1] = t;
  for (int k = 2; k <= K; ++k) row[k] = 2 * t * row[k - 1] - row[k - 2];
  return row;
}

// Levelled solve: p(u_j) + (-1)^j E = g(u_j), j = 0..K+1.
bool level(const std::vector<ld>& xs, double gamma, int K, std::vector<xreal>& cheb, xreal& E) {
  const std::size_t n = static_cast<std::size_t>(K) + 2;
  detail::XMatrix m(n);
  std::vector<xreal> rhs(n);
  const xreal g = gamma;
  for (std::size_t j = 0; j < n; ++j) {
    const xreal x = static_cast<xreal>(xs[j]);
    const xreal u = x * x;
    const auto row = shifted_chebyshev_row(u, K);
    for (int k = 0; k <= K; ++k) m(j, static_cast<std::size_t>(k)) = row[k];
    m(j, n - 1) = (j % 2 == 0) ? 1 : -1;
    rhs[j] = x == 0 ? xreal(0) : xreal(pow(x, g));
  }
  if (!detail::solve_in_place(std::move(m), rhs)) return false;
  E = rhs[n - 1];
  rhs.pop_back();
  cheb = std::move(rhs);
  return true;
}

// Maximizes sign * r over [a, b]: coarse scan then Brent (golden-section with
// parabolic steps) around the best scan point. Endpoints are candidates.
std::pair<ld, ld> segment_extremum(const Residual& r, ld a, ld b, int sign) {
  constexpr int kScan = 24;
  auto value = [&](ld x) { return sign * r(x); };
  ld best_x = a, best_v = value(a);
  std::vector<ld> grid(kScan + 1);
  for (int i = 0; i <= kScan; ++i) {
    grid[i] = a + (b - a) * i / kScan;
    const ld v = value(grid[i]);
    if (v > best_v) {
      best_v = v;
      best_x = grid[i];
    }
  }
  const auto it = std::find(grid.begin(), grid.end(), best_x);
  const int idx = static_cast<int>(it - grid.begin());
  const ld lo = grid[std::max(idx - 1, 0)];
  const ld hi = grid[std::min(idx + 1, kScan)];
  if (hi > lo) {
    auto neg = [&](ld x) { return -value(x); };
    const auto [x, v] = boost::math::tools::brent_find_minima(
        neg, lo, hi, std::numeric_limits<ld>::digits / 2 + 2);
    if (-v > best_v) {
      best_v = -v;
      best_x = x;
    }
  }
  return {best_x, best_v};
}

ld find_root(const Residual& r, ld a, ld b) {
  ld fa = r(a), fb = r(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0)) return (a + b) / 2;
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      r, a, b, fa, fb, boost::math::tools::eps_tolerance<ld>(std::numeric_limits<ld>::digits - 3),
      iters);
  return (lo + hi) / 2;
}

std::vector<ConvergenceError::Sample> profile_of(const Residual& r, const std::vector<ld>& xs) {
  std::vector<ConvergenceError::Sample> out;
  for (ld x : xs) out.push_back({static_cast<double>(x * x), static_cast<double>(r(x))});
  return out;
}

// Replace one reference point by the global extremum of |r| while keeping
// the sign pattern alternating.
std::vector<ld> single_exchange(const Residual& r, std::vector<ld> xs) {
  constexpr int kGrid = 4000;
  ld xstar = 0, vstar = -1;
  for (int i = 0; i <= kGrid; ++i) {
    const ld x = static_cast<ld>(i) / kGrid;
    const ld v = std::abs(r(x));
    if (v > vstar) {
      vstar = v;
      xstar = x;
    }
  }
  auto sgn = [&](ld x) { return r(x) >= 0 ? 1 : -1; };
  const int s = sgn(xstar);
  const std::size_t n = xs.size();
  const auto pos = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), xstar) - xs.begin());
  if (pos == 0) {
    if (sgn(xs[0]) == s) {
      xs[0] = xstar;
    } else {
      xs.insert(xs.begin(), xstar);
      xs.pop_back();
    }
  } else if (pos == n) {
    if (sgn(xs[n - 1]) == s) {
      xs[n - 1] = xstar;
    } else {
      xs.push_back(xstar);
      xs.erase(xs.begin());
    }
  } else {
    xs[sgn(xs[pos - 1]) == s ? pos - 1 : pos] = xstar;
  }
  return xs;
}

std::vector<xreal> chebyshev_to_monomial(const std::vector<xreal>& cheb) {
  const std::size_t n = cheb.size();
  std::vector<xreal> out(n, xreal(0));
  // Monomial coefficients (in u) of T_k(2u - 1), built by the three-term recurrence.
  std::vector<xreal> prev(n, xreal(0)), cur(n, xreal(0));
  prev[0] = 1;
  if (n > 1) {
    cur[0] = -1;
    cur[1] = 2;
  }
  out[0] += cheb[0];
  if (n > 1) {
    out[0] += cheb[1] * cur[0];
    out[1] += cheb[1] * cur[1];
  }
  for (std::size_t k = 2; k < n; ++k) {
    std::vector<xreal> next(n, xreal(0));
    for (std::size_t i = 0; i < k; ++i) {
      next[i + 1] += 4 * cur[i];
      next[i] -= 2 * cur[i];
    }
    for (std::size_t i = 0; i < n; ++i) next[i] -= prev[i];
    for (std::size_t i = 0; i <= k; ++i) out[i] += cheb[k] * next[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

PolyApprox exact_even_power(double gamma, int K) {
  PolyApprox p;
  p.gamma = gamma;
  p.K = K;
  p.coeffs.assign(static_cast<std::size_t>(K) + 1, xreal(0));
  p.coeffs[static_cast<std::size_t>(gamma / 2)] = 1;
  p.delta = 0.0;
  return p;
}

}  // namespace

PolyApprox best_poly_approx(double gamma, int K, double tol) {
  RemezOptions options;
  options.tol = tol;
  return best_poly_approx(gamma, K, options);
}

PolyApprox best_poly_approx(double gamma, int K, const RemezOptions& options) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidParameter("gamma must be positive");
  if (K < 1) throw InvalidParameter("K must be >= 1");
  if (!(options.tol > 0.0) || options.tol > 1e-6) {
    throw InvalidParameter("tol must lie in (0, 1e-6]");
  }
  if (is_even_integer(gamma) && gamma <= 2.0 * K) return exact_even_power(gamma, K);

  const std::size_t n = static_cast<std::size_t>(K) + 2;
  std::vector<ld> xs(n);
  for (std::size_t j = 0; j < n; ++j) {
    // Chebyshev extrema of degree K+1 mapped to [0, 1] in u.
    const ld u = (1 - std::cos(std::numbers::pi_v<ld> * j / (K + 1))) / 2;
    xs[j] = std::sqrt(u);
  }

  const Target target{gamma};
  std::vector<xreal> cheb;
  xreal E;
  ld last_level = 0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    if (!level(xs, gamma, K, cheb, E)) {
      throw ConvergenceError("singular Remez system at iteration " + std::to_string(iter), {});
    }
    const ChebSeries series(cheb);
    const Residual r{target, &series};
    const ld level_abs = std::abs(static_cast<ld>(E));
    const int sign0 = E >= 0 ? 1 : -1;

    std::vector<ld> roots(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) roots[j] = find_root(r, xs[j], xs[j + 1]);

    std::vector<ld> next(n);
    ld max_dev = 0, min_dev = std::numeric_limits<ld>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const ld a = j == 0 ? 0 : roots[j - 1];
      const ld b = j + 1 == n ? 1 : roots[j];
      const int sign = (j % 2 == 0) ? sign0 : -sign0;
      const auto [x, v] = segment_extremum(r, a, b, sign);
      next[j] = x;
      max_dev = std::max(max_dev, v);
      min_dev = std::min(min_dev, v);
    }

    const bool ordered = std::is_sorted(next.begin(), next.end()) &&
                         std::adjacent_find(next.begin(), next.end()) == next.end();
    const bool valid = ordered && min_dev > 0 && level_abs >= last_level * (1 - 1e-12L);
    if (!valid) {
      xs = single_exchange(r, xs);
      continue;
    }
    last_level = level_abs;

    if (level_abs > 0 && (max_dev - level_abs) / level_abs < options.tol) {
      PolyApprox p;
      p.gamma = gamma;
      p.K = K;
      p.coeffs = chebyshev_to_monomial(cheb);
      ld certified = max_dev;
      for (ld x : next) certified = std::max(certified, std::abs(r(x)));
      for (int i = 0; i <= options.certify_points; ++i) {
        const ld u = static_cast<ld>(i) / options.certify_points;
        certified = std::max(certified, std::abs(target(std::sqrt(u)) - series(u)));
      }
      p.delta = static_cast<double>(certified);
      p.alternation.reserve(n);
      for (ld x : next) p.alternation.push_back(static_cast<double>(x * x));
      return p;
    }
    xs = std::move(next);
  }

  std::vector<xreal> final_cheb;
  xreal final_E;
  std::vector<ConvergenceError::Sample> profile;
  if (level(xs, gamma, K, final_cheb, final_E)) {
    const ChebSeries series(final_cheb);
    profile = profile_of(Residual{target, &series}, xs);
  }
  std::ostringstream msg;
  msg << "Remez did not converge for gamma=" << gamma << ", K=" << K << " within "
      << options.max_iterations << " iterations";
  throw ConvergenceError(msg.str(), std::move(profile));
}

xreal eval_poly(const PolyApprox& p, const xreal& x) {
  const xreal u = x * x;
  xreal acc = 0;
  for (std::size_t k = p.coeffs.size(); k-- > 0;) acc = acc * u + p.coeffs[k];
  return acc;
}

double eval_poly(const PolyApprox& p, double x) {
  return static_cast<double>(eval_poly(p, xreal(x)));
}

double residual(const PolyApprox& p, double x) {
  const xreal ax = abs(xreal(x));
  const xreal f = ax == 0 ? xreal(0) : xreal(pow(ax, xreal(p.gamma)));
  return static_cast<double>(f - eval_poly(p, ax));
}

std::vector<double> alternation_set(const PolyApprox& p) {
  if (p.delta == 0.0 || p.alternation.empty()) {
    throw DegenerateApproximation("exact approximation has no alternation set (delta = 0)");
  }
  return p.alternation;
}

std::string to_json(const PolyApprox& p) {
  nlohmann::ordered_json j;
  j["gamma"] = p.gamma;
  j["K"] = p.K;
  j["delta"] = p.delta;
  auto coeffs = nlohmann::json::array();
  for (const xreal& c : p.coeffs) coeffs.push_back(to_decimal_string(c));
  j["coeffs"] = std::move(coeffs);
  j["alternation"] = p.alternation;
  return j.dump();
}

PolyApprox poly_approx_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PolyApprox p;
    p.gamma = j.at("gamma").get<double>();
    p.K = j.at("K").get<int>();
    p.delta = j.at("delta").get<double>();
    for (const auto& c : j.at("coeffs")) p.coeffs.push_back(xreal_from_string(c.get<std::string>()));
    p.alternation = j.at("alternation").get<std::vector<double>>();
    if (p.coeffs.size() != static_cast<std::size_t>(p.K) + 1) {
      throw ParseError(0, "coeffs must have K+1 entries");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("PolyApprox JSON: ") + e.what());
  }
}

}  // namespace nsfe
