#include "activeva/datagen.hpp"
#include "activeva/error.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <doctest.h>

#include <cmath>

using namespace activeva;
using Eigen::Index;

namespace {

bool same_data(const TrainingDataset& a, const TrainingDataset& b) {
  return a.causes == b.causes && a.responses == b.responses && a.cause_labels == b.cause_labels;
}

double binomial_sd(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("reference generator settings") {
  const auto spec = CorrectSpec::reference(1);
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.num_causes == 10);
  CHECK(spec.num_questions == 50);
  REQUIRE(spec.beta_groups.size() == 3);
  CHECK(spec.beta_groups[0].first == 0);
  CHECK(spec.beta_groups[0].last == 2);
  CHECK(spec.beta_groups[0].a == 0.5);
  CHECK(spec.beta_groups[1].a == 3.0);
  CHECK(spec.beta_groups[2].b == 3.0);
  CHECK(spec.beta_groups[2].last == 9);
}

TEST_CASE("generator validation") {
  auto spec = CorrectSpec::reference(1);
  spec.beta_groups[1].first = 4;  // leaves cause 3 uncovered
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = CorrectSpec::reference(1);
  spec.beta_groups[0].a = 0.0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = CorrectSpec::reference(1);
  spec.alpha = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  CHECK_THROWS_AS(gen_correct(CorrectSpec::reference(1), 0), InvalidArgument);
  auto mis = MisspecSpec::reference(1);
  mis.num_subclasses = 0;
  CHECK_THROWS_AS(mis.validate(), InvalidArgument);
}

TEST_CASE("gen_correct shapes and determinism") {
  const auto spec = CorrectSpec::reference(5);
  const auto g = gen_correct(spec, 200);
  CHECK(g.data.num_rows() == 200);
  CHECK(g.data.num_questions() == 50);
  CHECK(g.data.num_causes() == 10);
  CHECK(((g.data.responses.array() == 0) || (g.data.responses.array() == 1)).all());
  CHECK(std::abs(g.true_params.pi().sum() - 1.0) < 1e-12);
  CHECK(g.true_params.theta().rows() == 10);

  const auto h = gen_correct(spec, 200);
  CHECK(same_data(g.data, h.data));
  CHECK(g.true_params.theta() == h.true_params.theta());
  const auto other = gen_correct(CorrectSpec::reference(6), 200);
  CHECK_FALSE(same_data(g.data, other.data));
}

TEST_CASE("gen_misspecified shapes and determinism") {
  const auto spec = MisspecSpec::reference(3);
  CHECK(spec.num_subclasses == 3);
  const auto g = gen_misspecified(spec, 300);
  CHECK(g.data.num_rows() == 300);
  CHECK(g.data.num_questions() == 50);  // no column for the sub-category
  CHECK(g.true_params.lambda.rows() == 10);
  CHECK(g.true_params.lambda.cols() == 3);
  for (Index y = 0; y < 10; ++y) {
    CHECK(std::abs(g.true_params.lambda.row(y).sum() - 1.0) < 1e-12);
    CHECK((g.true_params.lambda.row(y).array() > 0.0).all());
  }
  CHECK(g.true_params.theta.size() == 10);
  CHECK(g.true_params.theta[0].rows() == 3);
  CHECK(same_data(g.data, gen_misspecified(spec, 300).data));
}

TEST_CASE("latent classes with equal rows match the naive-Bayes process") {
  const Index c = 3, j = 5, n = 10000;
  Rng rng(9);
  Eigen::MatrixXd theta(c, j);
  for (Index y = 0; y < c; ++y) {
    for (Index q = 0; q < j; ++q) theta(y, q) = 0.1 + 0.8 * rng.uniform();
  }
  LatentClassParams latent;
  latent.lambda = Eigen::MatrixXd::Constant(c, 3, 1.0 / 3.0);
  for (Index y = 0; y < c; ++y) latent.theta.push_back(theta.row(y).replicate(3, 1));
  const ParameterPoint flat(Eigen::VectorXd::Constant(c, 1.0 / c), theta);

  const auto a = simulate_rows(latent, n, 10);
  const auto b = simulate_rows(flat, n, 11);
  // joint frequencies of (cause, answer = 1) and the cause marginal
  for (Index y = 0; y < c; ++y) {
    double fa = 0, fb = 0;
    for (Index i = 0; i < n; ++i) {
      fa += a.causes[static_cast<std::size_t>(i)] == y;
      fb += b.causes[static_cast<std::size_t>(i)] == y;
    }
    const double p = 1.0 / c;
    CHECK(std::abs(fa - fb) / n < 3.0 * std::sqrt(2.0) * binomial_sd(p, n));
    for (Index q = 0; q < j; ++q) {
      double xa = 0, xb = 0;
      for (Index i = 0; i < n; ++i) {
        xa += a.causes[static_cast<std::size_t>(i)] == y && a.responses(i, q) == 1;
        xb += b.causes[static_cast<std::size_t>(i)] == y && b.responses(i, q) == 1;
      }
      const double pj = p * theta(y, q);
      CHECK(std::abs(xa - xb) / n < 3.0 * std::sqrt(2.0) * binomial_sd(pj, n));
    }
  }
}

TEST_CASE("flip probability examples") {
  const NoiseSpec two{2.0, DistanceMetric::index(50)};
  CHECK(flip_probability(Index{10}, 20, two) == doctest::Approx(0.1).epsilon(1e-12));
  const NoiseSpec ten{10.0, DistanceMetric::index(50)};
  CHECK(flip_probability(Index{10}, 11, ten) == doctest::Approx(0.002).epsilon(1e-12));
  CHECK(flip_probability(std::nullopt, 30, two) == 0.0);
  const NoiseSpec tight{0.01, DistanceMetric::index(50)};
  CHECK(flip_probability(Index{0}, 49, tight) == 1.0);

  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(apply_order_noise(1, std::nullopt, 7, two, rng) == 1);
    CHECK(apply_order_noise(0, std::nullopt, 7, two, rng) == 0);
    CHECK(apply_order_noise(1, Index{0}, 49, tight, rng) == 0);
  }
}

TEST_CASE("empirical flip rate matches the flip probability") {
  Rng rng(2);
  const NoiseSpec spec{2.0, DistanceMetric::index(50)};
  const int n = 100000;
  for (const auto& [prev, q] : {std::pair<Index, Index>{10, 20}, {0, 49}, {3, 4}}) {
    const double p = flip_probability(prev, q, spec);
    int flips = 0;
    for (int i = 0; i < n; ++i) flips += apply_order_noise(1, prev, q, spec, rng) == 0;
    CHECK(std::abs(flips / static_cast<double>(n) - p) <= 3.0 * binomial_sd(p, n));
  }
}

TEST_CASE("refitting generated data covers the true probabilities") {
  const auto spec = CorrectSpec::reference(21);
  const auto g = gen_correct(spec, 10000);
  Hyperparameters hyper;
  hyper.alpha = spec.alpha;
  hyper.a.resize(spec.num_causes);
  hyper.b.resize(spec.num_causes);
  for (const auto& grp : spec.beta_groups) {
    for (Index y = grp.first; y <= grp.last; ++y) {
      hyper.a(y) = grp.a;
      hyper.b(y) = grp.b;
    }
  }
  const auto model = fit(g.data, hyper);
  int covered = 0, total = 0;
  for (Index y = 0; y < model.num_causes(); ++y) {
    for (Index q = 0; q < model.num_questions(); ++q) {
      const double a = model.beta_a(y, q), b = model.beta_b(y, q);
      const double lo = boost::math::ibeta_inv(a, b, 0.005);
      const double hi = boost::math::ibeta_inv(a, b, 0.995);
      const double truth = g.true_params.theta()(y, q);
      covered += truth >= lo && truth <= hi;
      ++total;
    }
  }
  CHECK(covered >= 0.95 * total);
}

TEST_CASE("empty synthetic dataset") {
  const auto d = empty_synthetic_dataset(4, 7);
  CHECK(d.cause_labels == std::vector<std::string>{"1", "2", "3", "4"});
  CHECK(d.bank.size() == 7);
  CHECK(d.num_rows() == 0);
}
