#include "activeva/error.hpp"
#include "activeva/random.hpp"
#include "activeva/stopping.hpp"

#include <doctest.h>

#include <cmath>

using namespace activeva;
using Eigen::Index;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) out(i++) = x;
  return out;
}

CandidateSet some_candidates() { return CandidateSet{{0, 1}}; }

// Sharpening posterior trajectory: Dirichlet draws with a growing weight on
// one cause, so the rules fire at varying steps.
std::vector<Eigen::MatrixXd> random_trajectory(Rng& rng, Index steps, Index b, Index c) {
  std::vector<Eigen::MatrixXd> out;
  const auto target = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(c)));
  for (Index t = 1; t <= steps; ++t) {
    Eigen::MatrixXd m(b, c);
    for (Index i = 0; i < b; ++i) {
      Eigen::VectorXd alpha = Eigen::VectorXd::Constant(c, 1.0);
      alpha(target) += 3.0 * static_cast<double>(t) * rng.uniform();
      m.row(i) = rng.dirichlet(alpha).transpose();
    }
    out.push_back(std::move(m));
  }
  return out;
}

int first_point_stop(const std::vector<Eigen::MatrixXd>& traj, double p1st, double p2nd) {
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const Eigen::VectorXd row = traj[t].row(0).transpose();
    if (point_rule_met(row, p1st, p2nd)) return static_cast<int>(t) + 1;
  }
  return static_cast<int>(traj.size());
}

int first_pred_stop(const std::vector<Eigen::MatrixXd>& traj, double p1st, double p2nd, double r) {
  for (std::size_t t = 0; t < traj.size(); ++t) {
    if (predictive_rule_met(traj[t], p1st, p2nd, r).met) return static_cast<int>(t) + 1;
  }
  return static_cast<int>(traj.size());
}

}  // namespace

TEST_CASE("threshold_pair") {
  CHECK(threshold_pair(0.8, 0.0, 10) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(threshold_pair(0.8, 0.5, 10) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(threshold_pair(0.9, 0.5, 34) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK_THROWS_AS(threshold_pair(0.8, 1.5, 10), InvalidArgument);
  CHECK_THROWS_AS(threshold_pair(0.8, 0.5, 1), InvalidArgument);
}

TEST_CASE("point_rule_met") {
  CHECK(point_rule_met(vec({0.85, 0.05, 0.10}), 0.8, 0.11));
  CHECK_FALSE(point_rule_met(vec({0.85, 0.12, 0.03}), 0.8, 0.10));
  CHECK_FALSE(point_rule_met(Eigen::VectorXd::Constant(10, 0.1), 0.8, 0.1));
  // strict inequalities on both sides
  CHECK_FALSE(point_rule_met(vec({0.8, 0.1, 0.1}), 0.8, 0.2));
  CHECK_FALSE(point_rule_met(vec({0.85, 0.1, 0.05}), 0.8, 0.1));
}

TEST_CASE("predictive_rule_met") {
  Eigen::MatrixXd rows(4, 3);
  rows << 0.9, 0.05, 0.05,  //
      0.85, 0.1, 0.05,      //
      0.95, 0.03, 0.02,     //
      0.5, 0.3, 0.2;
  const auto three = predictive_rule_met(rows, 0.8, 0.11, 0.7);
  CHECK(three.met);
  CHECK(three.satisfied_fraction == 0.75);

  rows.row(2) << 0.6, 0.3, 0.1;
  const auto two = predictive_rule_met(rows, 0.8, 0.11, 0.7);
  CHECK_FALSE(two.met);
  CHECK(two.satisfied_fraction == 0.5);

  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd p = rng.dirichlet(Eigen::VectorXd::Constant(3, 0.3));
    const auto single = predictive_rule_met(p.transpose(), 0.8, 0.1, 0.5);
    CHECK(single.met == point_rule_met(p, 0.8, 0.1));
    CHECK((single.satisfied_fraction == 0.0 || single.satisfied_fraction == 1.0));
  }
}

TEST_CASE("should_stop precedence") {
  const Eigen::VectorXd sure = vec({0.99, 0.005, 0.005});
  const Eigen::MatrixXd sure_draws = sure.transpose();
  const StopEvidence ev{&sure, &sure_draws};

  SUBCASE("fixed length reaches its cap") {
    const StoppingRule rule{FixedLength{10}, 50};
    CHECK_FALSE(should_stop(rule, 9, ev, some_candidates()).stop);
    const auto d = should_stop(rule, 10, ev, some_candidates());
    CHECK(d.stop);
    CHECK(d.reason == StopReason::max_length_reached);
    CHECK_FALSE(d.satisfied_fraction.has_value());
  }
  SUBCASE("empty candidates exhaust the bank") {
    const StoppingRule rule{PredictiveThresholds{0.8, 0.1, 0.7}, 50};
    const auto d = should_stop(rule, 3, ev, CandidateSet{});
    CHECK(d.stop);
    CHECK(d.reason == StopReason::bank_exhausted);
    CHECK(d.satisfied_fraction.has_value());
  }
  SUBCASE("the prior alone never stops") {
    const StoppingRule rule{PointThresholds{0.8, 0.1}, 50};
    CHECK_FALSE(should_stop(rule, 0, ev, some_candidates()).stop);
    const auto d = should_stop(rule, 1, ev, some_candidates());
    CHECK(d.stop);
    CHECK(d.reason == StopReason::criterion_met);
  }
  SUBCASE("length cap beats the criterion") {
    const StoppingRule rule{PointThresholds{0.8, 0.1}, 4};
    CHECK(should_stop(rule, 4, ev, some_candidates()).reason == StopReason::max_length_reached);
  }
  SUBCASE("missing evidence is an error") {
    CHECK_THROWS_AS(should_stop({PointThresholds{0.8, 0.1}, 5}, 1, StopEvidence{}, some_candidates()),
                    InvalidArgument);
    CHECK_THROWS_AS(should_stop({PredictiveThresholds{0.8, 0.1, 0.5}, 5}, 1, StopEvidence{&sure, nullptr},
                                some_candidates()),
                    InvalidArgument);
  }
}

TEST_CASE("rule validation") {
  CHECK_THROWS_AS((StoppingRule{PointThresholds{1.5, 0.1}, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((StoppingRule{PointThresholds{0.8, 0.9}, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((StoppingRule{PointThresholds{0.8, 0.0}, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((StoppingRule{PredictiveThresholds{0.8, 0.1, 1.0}, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((StoppingRule{FixedLength{11}, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((StoppingRule{FixedLength{0}, 10}.validate()), InvalidArgument);
  CHECK_NOTHROW((StoppingRule{PredictiveThresholds{0.8, 0.1, 0.5}, 10}.validate()));
}

TEST_CASE("stop reason names round-trip") {
  for (const auto r : {StopReason::criterion_met, StopReason::max_length_reached, StopReason::bank_exhausted,
                       StopReason::not_stopped}) {
    CHECK(stop_reason_from_string(to_string(r)) == r);
  }
  CHECK_THROWS_AS(stop_reason_from_string("nope"), InvalidArgument);
}

TEST_CASE("nested thresholds and tolerances stop in order") {
  Rng rng(7);
  const Index c = 5, b = 8, steps = 30;
  for (int rep = 0; rep < 200; ++rep) {
    const auto traj = random_trajectory(rng, steps, b, c);
    for (const double p1 : {0.6, 0.8, 0.9}) {
      for (const double d : {0.0, 0.5, 1.0}) {
        const double p2 = threshold_pair(p1, d, static_cast<int>(c));
        const int strict = first_point_stop(traj, p1, p2);
        // looser: lower p1st, higher p2nd
        const double p1_loose = p1 - 0.1;
        const double p2_loose = std::min(p1_loose, p2 + 0.05);
        CHECK(first_point_stop(traj, p1_loose, p2_loose) <= strict);
        int prev = 0;
        for (const double r : {0.25, 0.5, 0.75}) {
          const int t = first_pred_stop(traj, p1, p2, r);
          CHECK(t >= prev);
          prev = t;
        }
      }
    }
    for (const auto& m : traj) {
      const double f = predictive_rule_met(m, 0.8, 0.1, 0.5).satisfied_fraction;
      CHECK(f * b == std::round(f * b));
    }
  }
}
