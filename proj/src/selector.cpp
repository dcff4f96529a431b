#include "activeva/selector.hpp"

#include "activeva/error.hpp"

#include <algorithm>
#include <cmath>

namespace activeva {

namespace {

void require_candidates(const CandidateSet& candidates) {
  if (candidates.empty()) throw InvalidArgument("candidate set is empty");
}

// Sum over y of p_y * KL(q_j(.|y_hat) || q_j(.|y)), accumulating the
// two-term divergence per alternative cause. The y_hat term is exactly zero.
double weighted_kl(const ParameterPoint& params, const Eigen::Ref<const Eigen::VectorXd>& probs,
                   Eigen::Index question, Eigen::Index y_hat) {
  const auto lt = params.log_theta().col(question);
  const auto l1m = params.log1m_theta().col(question);
  const double th = params.theta()(y_hat, question);
  const double lt_hat = lt[y_hat];
  const double l1m_hat = l1m[y_hat];
  double score = 0.0;
  for (Eigen::Index y = 0; y < params.num_causes(); ++y) {
    if (y == y_hat) continue;
    const double kl = th * (lt_hat - lt[y]) + (1.0 - th) * (l1m_hat - l1m[y]);
    score += probs[y] * std::max(0.0, kl);
  }
  return score;
}

}  // namespace

std::optional<double> ScoreVector::at(Eigen::Index question) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), question,
                             [](const ScoredQuestion& s, Eigen::Index q) { return s.question < q; });
  if (it == entries.end() || it->question != question) return std::nullopt;
  return it->score;
}

DistanceMetric DistanceMetric::index(Eigen::Index num_questions) {
  if (num_questions < 1) throw InvalidArgument("index metric needs at least one question");
  DistanceMetric m;
  m.kind_ = Kind::index;
  m.num_questions_ = num_questions;
  return m;
}

DistanceMetric DistanceMetric::group(std::vector<std::optional<std::string>> groups) {
  DistanceMetric m;
  m.kind_ = Kind::group;
  m.num_questions_ = static_cast<Eigen::Index>(groups.size());
  m.groups_ = std::move(groups);
  return m;
}

DistanceMetric DistanceMetric::group(const QuestionBank& bank) {
  std::vector<std::optional<std::string>> groups;
  groups.reserve(bank.questions().size());
  for (const auto& q : bank.questions()) groups.push_back(q.group);
  return group(std::move(groups));
}

DistanceMetric DistanceMetric::matrix(Eigen::MatrixXd table) {
  if (table.rows() != table.cols()) throw InvalidArgument("distance table must be square");
  if (!table.allFinite() || (table.array() < 0.0).any()) {
    throw InvalidArgument("distance table must be finite and non-negative");
  }
  if (!table.diagonal().isZero(0.0)) throw InvalidArgument("distance table must be zero on the diagonal");
  if (table != table.transpose()) {
    throw InvalidArgument("distance table must be symmetric");
  }
  DistanceMetric m;
  m.kind_ = Kind::matrix;
  m.num_questions_ = table.rows();
  m.table_ = std::move(table);
  return m;
}

double DistanceMetric::operator()(Eigen::Index j, Eigen::Index k) const {
  if (j == k) return 0.0;
  switch (kind_) {
    case Kind::index:
      return static_cast<double>(std::abs(j - k)) / static_cast<double>(num_questions_);
    case Kind::group: {
      const auto& gj = groups_[static_cast<std::size_t>(j)];
      const auto& gk = groups_[static_cast<std::size_t>(k)];
      return (gj && gk && *gj == *gk) ? 0.0 : 1.0;
    }
    case Kind::matrix:
      return table_(j, k);
  }
  return 0.0;
}

DistanceMetric DistanceMetric::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("metric scale factor must be positive");
  Eigen::MatrixXd t(num_questions_, num_questions_);
  for (Eigen::Index j = 0; j < num_questions_; ++j) {
    for (Eigen::Index k = 0; k < num_questions_; ++k) t(j, k) = factor * (*this)(j, k);
  }
  return matrix(std::move(t));
}

double symptom_kl(const ParameterPoint& params, Eigen::Index question, Eigen::Index y_hat, Eigen::Index y) {
  if (y_hat == y) return 0.0;
  const double th = params.theta()(y_hat, question);
  const double kl = th * (params.log_theta()(y_hat, question) - params.log_theta()(y, question)) +
                    (1.0 - th) * (params.log1m_theta()(y_hat, question) - params.log1m_theta()(y, question));
  return std::max(0.0, kl);
}

ScoreVector pwkl_score(const ParameterPoint& params, const Eigen::Ref<const Eigen::VectorXd>& class_probs,
                       const CandidateSet& candidates) {
  require_candidates(candidates);
  const Eigen::Index y_hat = argmax(class_probs);
  ScoreVector out;
  out.method = ScoreMethod::point;
  out.entries.reserve(candidates.size());
  for (const auto j : candidates.questions) out.entries.push_back({j, weighted_kl(params, class_probs, j, y_hat)});
  return out;
}

ScoreVector pwkl_score(const ParameterPoint& params, std::span<const Answer> answers,
                       const CandidateSet& candidates) {
  const Eigen::VectorXd probs = class_posterior(params, answers);
  return pwkl_score(params, probs, candidates);
}

ScoreVector predictive_pwkl_score(const ParameterDraws& draws, const Eigen::Ref<const Eigen::MatrixXd>& draw_probs,
                                  const CandidateSet& candidates, PredictiveArgmax argmax_mode) {
  require_candidates(candidates);
  const auto num_draws = draws.size();
  if (num_draws < 1 || draw_probs.rows() != num_draws) {
    throw InvalidArgument("draw probabilities must have one row per posterior draw");
  }
  const Eigen::Index modal = modal_argmax(draw_probs);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(candidates.size()));
  for (Eigen::Index b = 0; b < num_draws; ++b) {
    const Eigen::VectorXd probs = draw_probs.row(b).transpose();
    const Eigen::Index y_hat = argmax_mode == PredictiveArgmax::per_draw ? argmax(probs) : modal;
    Eigen::Index k = 0;
    for (const auto j : candidates.questions) total[k++] += weighted_kl(draws[b], probs, j, y_hat);
  }
  total /= static_cast<double>(num_draws);

  ScoreVector out;
  out.method = ScoreMethod::predictive;
  out.entries.reserve(candidates.size());
  Eigen::Index k = 0;
  for (const auto j : candidates.questions) out.entries.push_back({j, total[k++]});
  return out;
}

ScoreVector predictive_pwkl_score(const ParameterDraws& draws, std::span<const Answer> answers,
                                  const CandidateSet& candidates, PredictiveArgmax argmax_mode) {
  const DrawPosteriors post = class_posterior_draws(draws, answers);
  return predictive_pwkl_score(draws, post.probs, candidates, argmax_mode);
}

ScoreVector penalize(ScoreVector scores, std::optional<Eigen::Index> last_question, double lambda,
                     const DistanceMetric& metric) {
  if (!(lambda >= 0.0)) throw InvalidArgument("penalty weight must be non-negative");
  if (!last_question || lambda == 0.0) return scores;
  for (auto& s : scores.entries) s.score -= lambda * metric(s.question, *last_question);
  scores.penalized = true;
  return scores;
}

Eigen::Index select_next(const ScoreVector& scores) {
  if (scores.entries.empty()) throw InvalidArgument("no scored questions to select from");
  const ScoredQuestion* best = &scores.entries.front();
  for (const auto& s : scores.entries) {
    if (s.score > best->score || (s.score == best->score && s.question < best->question)) best = &s;
  }
  return best->question;
}

}  // namespace activeva
