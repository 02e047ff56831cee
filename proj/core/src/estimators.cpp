#include "nsfe/estimators.hpp"

#include <cmath>
#include <mutex>
#include <shared_mutex>

#include "nsfe/error.hpp"
#include "nsfe/hermite.hpp"
#include "nsfe/random.hpp"
#include "nsfe/special.hpp"

namespace nsfe {

namespace {

// Sub-stream ids so the randomizations of different estimators on the same
// (y, seed) are independent.
constexpr std::uint64_t kDuplicateStream = 1;
constexpr std::uint64_t kCloneStream = 2;

// Above this half-degree the block polynomial is summed in xreal.
constexpr int kLongDoubleMaxK = 8;

}  // namespace

const char* to_string(EstimatorId id) noexcept {
  switch (id) {
    case EstimatorId::DenseBlock:
      return "DenseBlock";
    case EstimatorId::EvenClone:
      return "EvenClone";
    case EstimatorId::SparseThreshold:
      return "SparseThreshold";
  }
  return "?";
}

const char* to_string(EstimatorChoice choice) noexcept {
  switch (choice) {
    case EstimatorChoice::Auto:
      return "auto";
    case EstimatorChoice::Dense:
      return "dense";
    case EstimatorChoice::Even:
      return "even";
    case EstimatorChoice::Sparse:
      return "sparse";
  }
  return "?";
}

EstimatorChoice parse_estimator_choice(const std::string& name) {
  if (name == "auto") return EstimatorChoice::Auto;
  if (name == "dense") return EstimatorChoice::Dense;
  if (name == "even") return EstimatorChoice::Even;
  if (name == "sparse") return EstimatorChoice::Sparse;
  throw InvalidParameter("unknown estimator '" + name + "' (auto|dense|even|sparse)");
}

int BlockSchedule::block_of(double v) const noexcept {
  const double a = std::abs(v);
  for (int l = 0; l <= L; ++l) {
    if (a <= sigma * t[static_cast<std::size_t>(l)]) return l;
  }
  return L + 1;
}

BlockSchedule block_schedule(const ProblemConfig& cfg) {
  if (regime(cfg) != Regime::Dense) {
    throw WrongRegime("block schedule needs s^2 >= 4d (dense zone)");
  }
  const double d = static_cast<double>(cfg.d());
  const double s = static_cast<double>(cfg.s());
  const double log_ratio = std::log(s * s / d);

  BlockSchedule b;
  b.sigma = std::sqrt(2.0) * cfg.eps();
  b.c = cfg.c();
  const double needed = 3.0 * std::sqrt(std::log(d) / log_ratio);
  b.L = 0;
  while (std::ldexp(1.0, b.L) < needed) ++b.L;

  const double root = std::sqrt(2.0 * log_ratio);
  for (int l = 0; l <= b.L; ++l) {
    const double k = std::ceil(std::ldexp(1.0, 2 * l) * b.c * log_ratio);
    b.K.push_back(std::max(1, static_cast<int>(k)));
    b.M.push_back(std::ldexp(1.0, l + 1) * b.sigma * root);
    b.t.push_back(std::ldexp(1.0, l) * root);
  }
  return b;
}

std::shared_ptr<const PolyApprox> cached_poly_approx(double gamma, int K) {
  static std::shared_mutex mutex;
  static std::map<std::pair<double, int>, std::shared_ptr<const PolyApprox>> cache;
  const auto key = std::make_pair(gamma, K);
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // Built outside the lock; a concurrent duplicate build is harmless.
  auto built = std::make_shared<const PolyApprox>(best_poly_approx(gamma, K));
  std::unique_lock lock(mutex);
  return cache.try_emplace(key, std::move(built)).first->second;
}

BlockPolynomial::BlockPolynomial(const PolyApprox& approx, double M, double sigma)
    : K_(approx.K), gamma_(approx.gamma), M_(M), sigma_(sigma), a_(approx.coeffs) {
  if (!(M > 0.0) || !(sigma > 0.0)) throw InvalidParameter("M and sigma must be positive");
  scaled_.assign(a_.size(), xreal(0));
  scaled_fast_.assign(a_.size(), 0.0L);
  const xreal m = M, sig = sigma;
  const xreal m_gamma = pow(m, xreal(gamma_));
  const xreal ratio2 = (sig / m) * (sig / m);
  xreal factor = m_gamma;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    factor *= ratio2;
    scaled_[k] = a_[k] * factor;
    scaled_fast_[k] = static_cast<long double>(scaled_[k]);
  }
}

double BlockPolynomial::operator()(double u) const {
  const std::size_t top = 2 * static_cast<std::size_t>(K_);
  if (K_ <= kLongDoubleMaxK) {
    const long double x = static_cast<long double>(u) / sigma_;
    long double h_prev = 1, h = x, acc = 0;
    for (std::size_t j = 1; j < top; ++j) {
      const long double next = x * h - static_cast<long double>(j) * h_prev;
      h_prev = h;
      h = next;
      if ((j + 1) % 2 == 0) acc += scaled_fast_[(j + 1) / 2] * h;
    }
    return static_cast<double>(acc);
  }
  const xreal x = xreal(u) / sigma_;
  xreal h_prev = 1, h = x, acc = 0;
  for (std::size_t j = 1; j < top; ++j) {
    xreal next = x * h - static_cast<double>(j) * h_prev;
    h_prev = std::move(h);
    h = std::move(next);
    if ((j + 1) % 2 == 0) acc += scaled_[(j + 1) / 2] * h;
  }
  return static_cast<double>(acc);
}

double BlockPolynomial::mean(double theta) const {
  const xreal m = M_;
  const xreal z2 = (xreal(theta) / m) * (xreal(theta) / m);
  xreal acc = 0, power = 1;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    power *= z2;
    acc += a_[k] * power;
  }
  return static_cast<double>(acc * pow(m, xreal(gamma_)));
}

DenseBlockEstimator::DenseBlockEstimator(const ProblemConfig& cfg)
    : gamma_(cfg.gamma()), schedule_(block_schedule(cfg)) {
  for (int l = 0; l <= schedule_.L; ++l) {
    const auto idx = static_cast<std::size_t>(l);
    blocks_.emplace_back(*cached_poly_approx(gamma_, schedule_.K[idx]), schedule_.M[idx],
                         schedule_.sigma);
  }
}

double DenseBlockEstimator::term(double u, double v) const {
  const int l = schedule_.block_of(v);
  if (l > schedule_.L) return std::pow(std::abs(u), gamma_);
  return blocks_[static_cast<std::size_t>(l)](u);
}

std::pair<std::vector<double>, std::vector<double>> duplicate_sample(std::span<const double> y,
                                                                     double eps,
                                                                     std::uint64_t seed) {
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  const NormalStream z(derive_seed(seed, {}));
  std::vector<double> first(y.size()), second(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double zi = eps * z.normal(i);
    first[i] = y[i] + zi;
    second[i] = y[i] - zi;
  }
  return {std::move(first), std::move(second)};
}

CloneMatrix clone_sample(std::span<const double> y, double eps, int gamma, std::uint64_t seed) {
  if (gamma < 1) throw InvalidParameter("clone count gamma must be a positive integer");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  const NormalStream g(derive_seed(seed, {}));
  const auto cols = static_cast<std::size_t>(gamma);
  CloneMatrix out{y.size(), cols, std::vector<double>(y.size() * cols)};
  const double scale = std::sqrt(static_cast<double>(gamma));
  std::vector<double> draws(cols);
  for (std::size_t i = 0; i < y.size(); ++i) {
    double mean = 0.0;
    for (std::size_t m = 0; m < cols; ++m) {
      draws[m] = eps * g.normal(i * cols + m);
      mean += draws[m];
    }
    mean /= static_cast<double>(cols);
    for (std::size_t m = 0; m < cols; ++m) {
      out.data[i * cols + m] = gamma == 1 ? y[i] : y[i] + scale * (draws[m] - mean);
    }
  }
  return out;
}

EstimateResult estimate_dense(std::span<const double> y, const ProblemConfig& cfg,
                              std::uint64_t seed) {
  if (static_cast<std::int64_t>(y.size()) != cfg.d()) {
    throw InvalidParameter("observation length differs from d");
  }
  const DenseBlockEstimator est(cfg);
  const auto [u, v] = duplicate_sample(y, cfg.eps(), derive_seed(seed, {kDuplicateStream}));
  const BlockSchedule& sched = est.schedule();

  std::vector<double> terms(y.size());
  std::vector<double> counts(static_cast<std::size_t>(sched.L) + 2, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    terms[i] = est.term(u[i], v[i]);
    counts[static_cast<std::size_t>(sched.block_of(v[i]))] += 1.0;
  }

  EstimateResult r{EstimatorId::DenseBlock, pairwise_sum(terms), std::nullopt, seed, {}};
  for (int l = 0; l <= sched.L; ++l) {
    r.aux["block_" + std::to_string(l)] = counts[static_cast<std::size_t>(l)];
    r.aux["K_" + std::to_string(l)] = sched.K[static_cast<std::size_t>(l)];
  }
  r.aux["tail"] = counts.back();
  r.aux["L"] = sched.L;
  return r;
}

EstimateResult estimate_even(std::span<const double> y, const ProblemConfig& cfg,
                             std::uint64_t seed) {
  if (!is_positive_integer(cfg.gamma())) {
    throw InvalidParameter("the cloning estimator needs an integer gamma");
  }
  if (static_cast<std::int64_t>(y.size()) != cfg.d()) {
    throw InvalidParameter("observation length differs from d");
  }
  const int gamma = static_cast<int>(cfg.gamma());
  const CloneMatrix clones = clone_sample(y, cfg.eps(), gamma, derive_seed(seed, {kCloneStream}));
  std::vector<double> terms(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double prod = 1.0;
    for (std::size_t m = 0; m < clones.cols; ++m) prod *= clones(i, m);
    terms[i] = prod;
  }
  return {EstimatorId::EvenClone, pairwise_sum(terms), std::nullopt, seed, {}};
}

EstimateResult estimate_sparse(std::span<const double> y, const ProblemConfig& cfg) {
  if (regime(cfg) != Regime::Sparse) {
    throw WrongRegime("the thresholding estimator needs s^2 < 4d (sparse zone)");
  }
  if (static_cast<std::int64_t>(y.size()) != cfg.d()) {
    throw InvalidParameter("observation length differs from d");
  }
  const double x = sparse_threshold(cfg.d(), cfg.s());
  const double tau2 = cfg.eps() * cfg.eps() * x * x;
  const double centre = std::pow(cfg.eps(), cfg.gamma()) * alpha_gamma(cfg.gamma(), cfg.d(), cfg.s());
  std::vector<double> terms(y.size(), 0.0);
  double kept = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] * y[i] > tau2) {
      terms[i] = std::pow(std::abs(y[i]), cfg.gamma()) - centre;
      kept += 1.0;
    }
  }
  EstimateResult r{EstimatorId::SparseThreshold, pairwise_sum(terms), std::nullopt, 0, {}};
  r.aux["kept"] = kept;
  r.aux["threshold"] = std::sqrt(tau2);
  return r;
}

EstimateResult estimate_auto(std::span<const double> y, const ProblemConfig& cfg,
                             std::uint64_t seed) {
  return estimate(y, cfg, seed, EstimatorChoice::Auto, false);
}

EstimateResult estimate_norm(std::span<const double> y, const ProblemConfig& cfg,
                             std::uint64_t seed) {
  return estimate(y, cfg, seed, EstimatorChoice::Auto, true);
}

EstimateResult estimate(std::span<const double> y, const ProblemConfig& cfg, std::uint64_t seed,
                        EstimatorChoice choice, bool norm) {
  if (choice == EstimatorChoice::Auto) {
    if (regime(cfg) == Regime::Sparse) {
      choice = EstimatorChoice::Sparse;
    } else if (is_even_integer(cfg.gamma())) {
      choice = EstimatorChoice::Even;
    } else {
      choice = EstimatorChoice::Dense;
    }
  }
  EstimateResult r = [&] {
    switch (choice) {
      case EstimatorChoice::Dense:
        return estimate_dense(y, cfg, seed);
      case EstimatorChoice::Even:
        return estimate_even(y, cfg, seed);
      case EstimatorChoice::Sparse: {
        EstimateResult s = estimate_sparse(y, cfg);
        s.seed = seed;
        return s;
      }
      case EstimatorChoice::Auto:
        break;
    }
    throw InvalidParameter("unreachable estimator choice");
  }();
  if (norm && cfg.gamma() >= 1.0) r.norm_value = std::pow(std::abs(r.value), 1.0 / cfg.gamma());
  return r;
}

}  // namespace nsfe
