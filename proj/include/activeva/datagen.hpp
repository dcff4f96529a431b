#pragma once

#include "activeva/model.hpp"
#include "activeva/random.hpp"
#include "activeva/selector.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace activeva {

/// Beta(a, b) prior shared by the causes first..last (0-based, inclusive).
struct BetaGroup {
  Eigen::Index first;
  Eigen::Index last;
  double a;
  double b;
};

/// Naive-Bayes generator: pi ~ Dir(alpha), theta(y, j) ~ Beta of the
/// cause's group.
struct CorrectSpec {
  Eigen::Index num_causes = 10;
  Eigen::Index num_questions = 50;
  Eigen::VectorXd alpha;
  std::vector<BetaGroup> beta_groups;
  std::uint64_t seed = 1;

  /// C = 10, J = 50, alpha = 1, (0.5, 0.5) / (3, 3) / (1, 3) for causes
  /// 1-3 / 4-6 / 7-10.
  static CorrectSpec reference(std::uint64_t seed);
  void validate() const;
};

/// Latent-class generator: each cause mixes K sub-categories with their own
/// symptom probabilities.
struct MisspecSpec {
  Eigen::Index num_causes = 10;
  Eigen::Index num_questions = 50;
  Eigen::Index num_subclasses = 3;
  Eigen::VectorXd lambda_prior;  // length K; default all ones
  double theta_a = 1.0;
  double theta_b = 1.0;
  std::uint64_t seed = 1;

  static MisspecSpec reference(std::uint64_t seed);
  void validate() const;
};

struct LatentClassParams {
  Eigen::MatrixXd lambda;              // C x K mixing weights
  std::vector<Eigen::MatrixXd> theta;  // per cause, K x J
};

struct NoiseSpec {
  double h;
  DistanceMetric metric;
};

template <typename Params>
struct GeneratedData {
  Params true_params;
  TrainingDataset data;
};

/// Cause labels "1".."C" and an all-root bank.
TrainingDataset empty_synthetic_dataset(Eigen::Index num_causes, Eigen::Index num_questions);

/// Rows from the naive-Bayes process at fixed parameters.
TrainingDataset simulate_rows(const ParameterPoint& params, Eigen::Index n, std::uint64_t seed);

/// Rows from the latent-class process with causes uniform over 1..C; the
/// sub-category is drawn and discarded.
TrainingDataset simulate_rows(const LatentClassParams& params, Eigen::Index n, std::uint64_t seed);

GeneratedData<ParameterPoint> gen_correct(const CorrectSpec& spec, Eigen::Index n);

GeneratedData<LatentClassParams> gen_misspecified(const MisspecSpec& spec, Eigen::Index n);

/// min(1, D(prev, j) / h); zero for the first question.
double flip_probability(std::optional<Eigen::Index> prev_question, Eigen::Index question, const NoiseSpec& spec);

/// Observed answer after order-induced noise.
int apply_order_noise(int true_value, std::optional<Eigen::Index> prev_question, Eigen::Index question,
                      const NoiseSpec& spec, Rng& rng);

}  // namespace activeva
