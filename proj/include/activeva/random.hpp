#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <utility>

namespace activeva {

/// Seedable random source used by every stochastic operation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions are implemented here on top of its raw 64-bit
/// output because the std:: distribution objects are implementation-defined.
/// Given the same seed, draws are identical across standard libraries up to
/// the last-ulp behaviour of std::log / std::exp / std::sqrt in libm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();

  /// Gamma(shape, 1).
  double gamma(double shape);

  /// log of a Gamma(shape, 1) variate; stays finite for tiny shapes.
  double log_gamma_variate(double shape);

  /// Beta(a, b), guaranteed strictly inside (0, 1).
  double beta(double a, double b);

  Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha);

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn with probability proportional to weights (need not sum to 1).
  Eigen::Index categorical(const Eigen::VectorXd& weights);

  /// Uniform on {0, ..., n-1}, unbiased.
  std::uint64_t uniform_index(std::uint64_t n);

  template <typename RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      const auto k = static_cast<decltype(i)>(uniform_index(static_cast<std::uint64_t>(i + 1)));
      using std::swap;
      swap(first[i], first[k]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Mixes a base seed with a stream tag (splitmix64 finalizer). Used to give
/// each replication, fold, death and purpose its own independent stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace activeva
