#include "activeva/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace activeva {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double boosted = log_gamma_variate(shape + 1.0);
    return boosted + std::log(uniform()) / shape;
  }
  // Marsaglia & Tsang (2000)
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

double Rng::gamma(double shape) { return std::exp(log_gamma_variate(shape)); }

double Rng::beta(double a, double b) {
  const double log_x = log_gamma_variate(a);
  const double log_y = log_gamma_variate(b);
  // x / (x + y) evaluated as a logistic of the log-ratio
  double value = 1.0 / (1.0 + std::exp(log_y - log_x));
  // rounding guard only: extreme ratios can round to exactly 0 or 1
  if (value <= 0.0) value = std::numeric_limits<double>::min();
  if (value >= 1.0) value = std::nextafter(1.0, 0.0);
  return value;
}

Eigen::VectorXd Rng::dirichlet(const Eigen::VectorXd& alpha) {
  Eigen::VectorXd logs(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) logs[i] = log_gamma_variate(alpha[i]);
  const double shift = logs.maxCoeff();
  Eigen::VectorXd out = (logs.array() - shift).exp().matrix();
  out /= out.sum();
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] <= 0.0) out[i] = std::numeric_limits<double>::min();
  }
  out /= out.sum();
  return out;
}

Eigen::Index Rng::categorical(const Eigen::VectorXd& weights) {
  const double total = weights.sum();
  double target = uniform() * total;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    target -= weights[i];
    if (target < 0.0) return i;
  }
  // floating-point slack lands on the last positive weight
  for (Eigen::Index i = weights.size() - 1; i >= 0; --i) {
    if (weights[i] > 0.0) return i;
  }
  throw std::invalid_argument("categorical weights must have positive mass");
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace activeva
