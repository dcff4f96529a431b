#include "activeva/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using activeva::Rng;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Fn>
Moments moments(int n, Fn&& draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  const double m = s / n;
  return {m, s2 / n - m * m};
}

}  // namespace

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("uniform stays in the open unit interval") {
  Rng rng(1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  const auto m = moments(200000, [&] { return rng.uniform(); });
  CHECK(m.mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(m.var == doctest::Approx(1.0 / 12).epsilon(0.02));
}

TEST_CASE("normal moments") {
  Rng rng(2);
  const auto m = moments(200000, [&] { return rng.normal(); });
  CHECK(std::abs(m.mean) < 0.01);
  CHECK(m.var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma moments across shapes") {
  Rng rng(3);
  for (const double shape : {0.2, 0.5, 1.0, 2.5, 9.0}) {
    CAPTURE(shape);
    const auto m = moments(200000, [&] { return rng.gamma(shape); });
    CHECK(m.mean == doctest::Approx(shape).epsilon(0.02));
    CHECK(m.var == doctest::Approx(shape).epsilon(0.05));
  }
}

TEST_CASE("log gamma variate is finite for tiny shapes") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double lg = rng.log_gamma_variate(1e-3);
    CHECK(std::isfinite(lg));
  }
}

TEST_CASE("beta moments and range") {
  Rng rng(5);
  for (const auto& [a, b] : {std::pair{0.5, 0.5}, {3.0, 3.0}, {1.0, 3.0}, {40.0, 2.0}}) {
    CAPTURE(a);
    CAPTURE(b);
    const double mean = a / (a + b);
    const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
    double lo = 1.0, hi = 0.0;
    const auto m = moments(100000, [&] {
      const double x = rng.beta(a, b);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      return x;
    });
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(m.mean == doctest::Approx(mean).epsilon(0.02));
    CHECK(m.var == doctest::Approx(var).epsilon(0.05));
  }
}

TEST_CASE("dirichlet lies on the simplex with the right mean") {
  Rng rng(6);
  Eigen::VectorXd alpha(4);
  alpha << 0.3, 1.0, 2.0, 5.0;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd p = rng.dirichlet(alpha);
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK((p.array() > 0.0).all());
    sum += p;
  }
  const Eigen::VectorXd expected = alpha / alpha.sum();
  for (int k = 0; k < 4; ++k) CHECK(sum(k) / n == doctest::Approx(expected(k)).epsilon(0.02));
}

TEST_CASE("categorical frequencies") {
  Rng rng(7);
  Eigen::VectorXd w(3);
  w << 1.0, 2.0, 7.0;
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.categorical(w))];
  for (int k = 0; k < 3; ++k) {
    const double p = w(k) / 10.0;
    CHECK(std::abs(counts[static_cast<std::size_t>(k)] - n * p) < 4.0 * std::sqrt(n * p * (1 - p)));
  }
}

TEST_CASE("uniform_index is unbiased and in range") {
  Rng rng(8);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (const int c : counts) CHECK(std::abs(c - 10000) < 4.0 * std::sqrt(10000 * 6.0 / 7.0));
}

TEST_CASE("shuffle permutes") {
  Rng rng(9);
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng.shuffle(w.begin(), w.end());
  CHECK(w != v);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
}

TEST_CASE("derive_seed separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (std::uint64_t k = 0; k < 20; ++k) seen.insert(activeva::derive_seed(s, k));
  }
  CHECK(seen.size() == 400);
  CHECK(activeva::derive_seed(5, 1) == activeva::derive_seed(5, 1));
}
