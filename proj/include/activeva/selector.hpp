#pragma once

#include "activeva/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace activeva {

/// Unasked, unlocked questions; kept sorted and unique.
struct CandidateSet {
  std::vector<Eigen::Index> questions;

  bool empty() const { return questions.empty(); }
  std::size_t size() const { return questions.size(); }
};

enum class ScoreMethod { point, predictive };

struct ScoredQuestion {
  Eigen::Index question;
  double score;
};

/// Scores keyed by question index, ascending.
struct ScoreVector {
  std::vector<ScoredQuestion> entries;
  ScoreMethod method = ScoreMethod::point;
  bool penalized = false;

  std::optional<double> at(Eigen::Index question) const;
};

/// D(j, k) between questions; non-negative, symmetric, zero on the diagonal.
class DistanceMetric {
 public:
  enum class Kind { index, group, matrix };

  DistanceMetric() = default;

  /// |j - k| / J
  static DistanceMetric index(Eigen::Index num_questions);
  /// 0 when both questions share a (non-empty) group, 1 otherwise.
  static DistanceMetric group(std::vector<std::optional<std::string>> groups);
  static DistanceMetric group(const QuestionBank& bank);
  static DistanceMetric matrix(Eigen::MatrixXd table);

  Kind kind() const { return kind_; }
  const Eigen::MatrixXd& table() const { return table_; }
  const std::vector<std::optional<std::string>>& groups() const { return groups_; }
  Eigen::Index num_questions() const { return num_questions_; }

  double operator()(Eigen::Index j, Eigen::Index k) const;

  /// Copy with every distance multiplied by `factor` (> 0); returns a matrix metric.
  DistanceMetric scaled(double factor) const;

 private:
  Kind kind_ = Kind::index;
  Eigen::Index num_questions_ = 0;
  std::vector<std::optional<std::string>> groups_;
  Eigen::MatrixXd table_;
};

/// Which cause plays the role of the current estimate inside each draw of
/// the predictive score.
enum class PredictiveArgmax { per_draw, modal };

/// KL divergence between the Bernoulli answer distributions of question j
/// under causes `y_hat` and `y` (natural log).
double symptom_kl(const ParameterPoint& params, Eigen::Index question, Eigen::Index y_hat, Eigen::Index y);

/// Posterior-weighted KL score over the candidates, given the class posterior.
ScoreVector pwkl_score(const ParameterPoint& params, const Eigen::Ref<const Eigen::VectorXd>& class_probs,
                       const CandidateSet& candidates);

ScoreVector pwkl_score(const ParameterPoint& params, std::span<const Answer> answers,
                       const CandidateSet& candidates);

/// Mean of the per-draw PWKL scores. `draw_probs` is B x C (row b is the
/// class posterior under draw b).
ScoreVector predictive_pwkl_score(const ParameterDraws& draws, const Eigen::Ref<const Eigen::MatrixXd>& draw_probs,
                                  const CandidateSet& candidates,
                                  PredictiveArgmax argmax_mode = PredictiveArgmax::per_draw);

ScoreVector predictive_pwkl_score(const ParameterDraws& draws, std::span<const Answer> answers,
                                  const CandidateSet& candidates,
                                  PredictiveArgmax argmax_mode = PredictiveArgmax::per_draw);

/// score_j - lambda * D(j, last); identity for the first question or lambda = 0.
ScoreVector penalize(ScoreVector scores, std::optional<Eigen::Index> last_question, double lambda,
                     const DistanceMetric& metric);

/// Highest-scoring question; ties go to the lowest index.
Eigen::Index select_next(const ScoreVector& scores);

}  // namespace activeva
