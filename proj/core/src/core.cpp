#include "nsfe/core.hpp"

#include <cmath>
#include <sstream>

#include "nsfe/error.hpp"
#include "nsfe/random.hpp"

namespace nsfe {

ProblemConfig::ProblemConfig(std::int64_t d, std::int64_t s, double eps, double gamma, double c)
    : d_(d), s_(s), eps_(eps), gamma_(gamma), c_(c) {
  if (d < 1) throw InvalidParameter("d must be >= 1, got " + std::to_string(d));
  if (s < 1 || s > d) {
    throw InvalidParameter("s must satisfy 1 <= s <= d, got s=" + std::to_string(s) +
                           ", d=" + std::to_string(d));
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidParameter("eps must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidParameter("gamma must be positive");
  if (!(c > 0.0)) throw InvalidParameter("c must be positive");
  if (!tuning_constant_admissible(c)) {
    std::ostringstream msg;
    msg << "c=" << c << " violates 2c ln6 <= 1/8, c ln6 + c < 1/4 or c ln(1+4/c) < 1/8";
    throw InvalidParameter(msg.str());
  }
}

bool ProblemConfig::tuning_constant_admissible(double c) noexcept {
  const double ln6 = std::log(6.0);
  return c > 0.0 && 2.0 * c * ln6 <= 0.125 && c * ln6 + c < 0.25 &&
         c * std::log1p(4.0 / c) < 0.125;
}

std::size_t ThetaVector::nonzero_count() const noexcept {
  std::size_t n = 0;
  for (double v : values_) n += (v != 0.0);
  return n;
}

void ThetaVector::check_dimension(const ProblemConfig& cfg) const {
  if (static_cast<std::int64_t>(values_.size()) != cfg.d()) {
    throw InvalidParameter("theta has length " + std::to_string(values_.size()) +
                           " but d=" + std::to_string(cfg.d()));
  }
}

const char* to_string(Regime r) noexcept { return r == Regime::Dense ? "dense" : "sparse"; }

Regime regime(const ProblemConfig& cfg) noexcept {
  const double s = static_cast<double>(cfg.s());
  return s * s >= 4.0 * static_cast<double>(cfg.d()) ? Regime::Dense : Regime::Sparse;
}

double big_n_gamma(std::span<const double> theta, double gamma) {
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be positive");
  std::vector<double> terms(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) terms[i] = std::pow(std::abs(theta[i]), gamma);
  return pairwise_sum(terms);
}

double n_gamma(std::span<const double> theta, double gamma) {
  const double total = big_n_gamma(theta, gamma);
  return gamma > 1.0 ? std::pow(total, 1.0 / gamma) : total;
}

bool is_positive_integer(double gamma) noexcept {
  return gamma >= 1.0 && std::floor(gamma) == gamma;
}

bool is_even_integer(double gamma) noexcept {
  return is_positive_integer(gamma) && std::fmod(gamma, 2.0) == 0.0;
}

MinimaxRate minimax_rate(const ProblemConfig& cfg) {
  const double d = static_cast<double>(cfg.d());
  const double s = static_cast<double>(cfg.s());
  const double g = cfg.gamma();
  const double e = cfg.eps();
  const bool sparse_side = s * s <= d;

  auto single = [](double v, std::string label) {
    return MinimaxRate{v, v, v, false, std::move(label)};
  };

  if (g <= 1.0) {
    if (sparse_side) {
      return single(std::pow(e, 2 * g) * s * s * std::pow(std::log1p(d / (s * s)), g),
                    "eps^(2g) s^2 log^g(1+d/s^2)");
    }
    return single(std::pow(e, 2 * g) * s * s * std::pow(std::log1p(s * s / d), -g),
                  "eps^(2g) s^2 log^(-g)(1+s^2/d)");
  }
  if (sparse_side) {
    return single(e * e * std::pow(s, 2 / g) * std::log1p(d / (s * s)),
                  "eps^2 s^(2/g) log(1+d/s^2)");
  }
  if (is_even_integer(g)) return single(e * e * std::pow(d, 1 / g), "eps^2 d^(1/g)");

  const double log_ratio = std::log1p(s * s / d);
  const double base = e * e * std::pow(s, 2 / g);
  const double lower = base * std::pow(log_ratio, 1 - 2 * g);
  const double upper = base / log_ratio;
  return MinimaxRate{upper, lower, upper, true,
                     "lower eps^2 s^(2/g) log^(1-2g)(1+s^2/d); upper eps^2 s^(2/g) log^(-1)(1+s^2/d)"};
}

std::vector<double> simulate_observations(std::span<const double> theta, double eps,
                                          std::uint64_t seed) {
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  const NormalStream noise(derive_seed(seed, {}));
  std::vector<double> y(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) y[i] = theta[i] + eps * noise.normal(i);
  return y;
}

double pairwise_sum(std::span<const double> terms) noexcept {
  constexpr std::size_t kLeaf = 32;
  if (terms.size() <= kLeaf) {
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace nsfe
