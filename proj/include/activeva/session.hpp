#pragma once

#include "activeva/model.hpp"
#include "activeva/selector.hpp"
#include "activeva/stopping.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace activeva {

enum class Strategy { static_order, active_point, active_predictive };

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view name);

struct SessionConfig {
  Strategy strategy = Strategy::active_point;
  /// Question order for the static strategy; empty means 0..J-1.
  std::vector<Eigen::Index> static_order;
  StoppingRule rule{FixedLength{1}, 1};
  double lambda = 0.0;
  /// Penalty metric; empty means the index metric over the bank.
  std::optional<DistanceMetric> metric;
  int num_draws = 500;
  std::uint64_t seed = 1;
  PredictiveArgmax argmax_mode = PredictiveArgmax::per_draw;

  /// Predictive strategy, p1st = 0.8, d = 0.5, r = 0.7, cap J.
  static SessionConfig defaults(Eigen::Index num_causes, Eigen::Index num_questions);

  /// Classification and reported posteriors come from the draws.
  bool is_predictive() const { return strategy == Strategy::active_predictive || rule.is_predictive(); }

  void validate(Eigen::Index num_questions) const;
};

/// Everything an interview reads but never mutates. Shared between
/// concurrent sessions.
struct ScoringContext {
  QuestionBank bank;
  std::vector<std::string> cause_labels;
  ParameterPoint point;
  std::optional<ParameterDraws> draws;

  /// Posterior mean plus, when the config needs them, draws sampled from
  /// (model, config.num_draws, config.seed).
  static std::shared_ptr<const ScoringContext> from_model(const PosteriorModel& model, const SessionConfig& config);
};

struct Classification {
  Eigen::Index cause;
  Eigen::VectorXd posterior;
};

struct SessionState {
  std::vector<Eigen::Index> asked;
  std::map<Eigen::Index, Response> responses;
  std::vector<bool> unlocked;
  int t = 0;
  std::optional<StopDecision> stopped;
  std::optional<Classification> classification;
  std::optional<Eigen::Index> pending;
};

struct CauseProbability {
  Eigen::Index cause;
  std::string label;
  double probability;
};

/// One line of the interview transcript.
struct TranscriptRecord {
  int t;
  Eigen::Index question;
  std::string question_id;
  std::string score_method;  // "point", "predictive" or "static"
  std::optional<double> score;
  Response response;
  std::vector<CauseProbability> class_posterior_top3;
  std::optional<double> stop_fraction;
};

struct FinalResult {
  Eigen::Index cause;
  std::string cause_label;
  Eigen::VectorXd posterior;
  int length;
  StopReason reason;
};

/// One interview. Single writer; sessions sharing a ScoringContext are
/// independent.
class Session {
 public:
  Session(std::shared_ptr<const ScoringContext> context, SessionConfig config);

  static Session start(const PosteriorModel& model, const SessionConfig& config);

  /// Pending question, or nullopt once the session has stopped. Calling
  /// again without recording a response returns the same question.
  std::optional<Eigen::Index> next_question();

  void record_response(Eigen::Index question, Response value);

  FinalResult finalize() const;

  /// Classification at the current step, whether stopped or not.
  Classification current_classification() const;

  std::vector<CauseProbability> top_causes(std::size_t k) const;
  CandidateSet candidates() const;

  const SessionState& state() const { return state_; }
  bool stopped() const { return state_.stopped.has_value(); }
  const std::vector<TranscriptRecord>& transcript() const { return transcript_; }
  const SessionConfig& config() const { return config_; }
  const ScoringContext& context() const { return *context_; }

  const Eigen::VectorXd& point_probs() const { return point_probs_; }
  /// B x C; empty when the session has no draws.
  const Eigen::MatrixXd& draw_probs() const { return draw_probs_; }

 private:
  StopDecision evaluate_stop() const;
  void stop(const StopDecision& decision);
  Eigen::VectorXd reported_posterior() const;

  std::shared_ptr<const ScoringContext> context_;
  SessionConfig config_;
  DistanceMetric metric_;
  SessionState state_;
  Eigen::VectorXd point_log_;
  Eigen::VectorXd point_probs_;
  Eigen::MatrixXd draw_log_;
  Eigen::MatrixXd draw_probs_;
  std::optional<double> pending_score_;
  std::vector<TranscriptRecord> transcript_;
};

}  // namespace activeva
