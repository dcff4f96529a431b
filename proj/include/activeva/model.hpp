#pragma once

#include "activeva/question_bank.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace activeva {

// Conventions: causes and questions are 0-based indices in the C++ API.
// Matrices indexed (cause, question) are C x J.

using ResponseMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Labeled response matrix; responses(i, j) is 0, 1 or -1 (missing).
struct TrainingDataset {
  QuestionBank bank;
  std::vector<std::string> cause_labels;
  std::vector<Eigen::Index> causes;
  ResponseMatrix responses;

  Eigen::Index num_rows() const { return responses.rows(); }
  Eigen::Index num_questions() const { return responses.cols(); }
  Eigen::Index num_causes() const { return static_cast<Eigen::Index>(cause_labels.size()); }
  Response response(Eigen::Index i, Eigen::Index j) const { return static_cast<Response>(responses(i, j)); }

  void validate() const;

  /// Rows selected by index, in the given order; bank and labels are shared.
  TrainingDataset subset(std::span<const Eigen::Index> rows) const;
};

/// Conjugate prior: pi ~ Dir(alpha), theta(y, j) ~ Beta(a[y], b[y]).
struct Hyperparameters {
  Eigen::VectorXd alpha;
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  /// alpha = 1, (a, b) = (1, 1).
  static Hyperparameters uniform(Eigen::Index num_causes);
  void validate(Eigen::Index num_causes) const;
};

/// Posterior parameters: Dir(dirichlet) and per-cell Beta(beta_a, beta_b).
struct PosteriorModel {
  std::vector<std::string> cause_labels;
  QuestionBank bank;
  Hyperparameters hyper;
  Eigen::VectorXd dirichlet;
  Eigen::MatrixXd beta_a;
  Eigen::MatrixXd beta_b;

  Eigen::Index num_causes() const { return dirichlet.size(); }
  Eigen::Index num_questions() const { return beta_a.cols(); }
  void validate() const;
};

/// A single value of (pi, theta) together with the log tables used by
/// the likelihood and KL computations.
class ParameterPoint {
 public:
  ParameterPoint(Eigen::VectorXd pi, Eigen::MatrixXd theta);

  const Eigen::VectorXd& pi() const { return pi_; }
  const Eigen::MatrixXd& theta() const { return theta_; }
  const Eigen::VectorXd& log_pi() const { return log_pi_; }
  const Eigen::MatrixXd& log_theta() const { return log_theta_; }
  const Eigen::MatrixXd& log1m_theta() const { return log1m_theta_; }

  Eigen::Index num_causes() const { return pi_.size(); }
  Eigen::Index num_questions() const { return theta_.cols(); }

 private:
  Eigen::VectorXd pi_;
  Eigen::MatrixXd theta_;
  Eigen::VectorXd log_pi_;
  Eigen::MatrixXd log_theta_;
  Eigen::MatrixXd log1m_theta_;
};

struct ParameterDraws {
  std::vector<ParameterPoint> draws;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(draws.size()); }
  const ParameterPoint& operator[](Eigen::Index b) const { return draws[static_cast<std::size_t>(b)]; }
};

/// One answered question; value must be 0 or 1.
struct Answer {
  Eigen::Index question;
  int value;
};

PosteriorModel fit(const TrainingDataset& data, const Hyperparameters& hyper);

ParameterPoint posterior_mean(const PosteriorModel& model);

/// B independent posterior draws; a pure function of (model, B, seed).
ParameterDraws sample_draws(const PosteriorModel& model, int num_draws, std::uint64_t seed);

/// p(Y = y | answers, params), computed in log space.
Eigen::VectorXd class_posterior(const ParameterPoint& params, std::span<const Answer> answers);

struct DrawPosteriors {
  Eigen::MatrixXd probs;     // B x C, one simplex row per draw
  Eigen::Index modal_cause;  // most frequent row argmax
};

DrawPosteriors class_posterior_draws(const ParameterDraws& draws, std::span<const Answer> answers);

/// Adds the log-likelihood of one answer to per-cause log weights.
void accumulate_answer(Eigen::Ref<Eigen::VectorXd> log_weights, const ParameterPoint& params,
                       Eigen::Index question, int value);

/// Index of the largest coefficient; ties go to the lowest index.
template <typename Derived>
Eigen::Index argmax(const Eigen::DenseBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v.coeff(i) > v.coeff(best)) best = i;
  }
  return best;
}

/// Softmax of log weights via a max shift.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> normalize_log_weights(
    const Eigen::MatrixBase<Derived>& log_weights) {
  using Scalar = typename Derived::Scalar;
  const Scalar shift = log_weights.maxCoeff();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p = (log_weights.array() - shift).exp().matrix();
  p /= p.sum();
  // entries that underflow relative to the mode stay strictly positive
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= Scalar(0)) p[i] = std::numeric_limits<Scalar>::denorm_min();
  }
  return p;
}

/// Most frequent row argmax of a B x C matrix; ties go to the lowest cause.
template <typename Derived>
Eigen::Index modal_argmax(const Eigen::MatrixBase<Derived>& rows) {
  Eigen::VectorXi votes = Eigen::VectorXi::Zero(rows.cols());
  for (Eigen::Index b = 0; b < rows.rows(); ++b) ++votes[argmax(rows.row(b))];
  return argmax(votes);
}

}  // namespace activeva
