#include "activeva/session.hpp"

#include "activeva/error.hpp"

#include <algorithm>
#include <numeric>

namespace activeva {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::static_order: return "static_order";
    case Strategy::active_point: return "active_point";
    case Strategy::active_predictive: return "active_predictive";
  }
  return "active_point";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "static_order" || name == "static") return Strategy::static_order;
  if (name == "active_point" || name == "point") return Strategy::active_point;
  if (name == "active_predictive" || name == "predictive") return Strategy::active_predictive;
  throw InvalidArgument("unknown strategy '" + std::string(name) + "'");
}

SessionConfig SessionConfig::defaults(Eigen::Index num_causes, Eigen::Index num_questions) {
  SessionConfig cfg;
  cfg.strategy = Strategy::active_predictive;
  const double p1st = 0.8;
  cfg.rule = StoppingRule{PredictiveThresholds{p1st, threshold_pair(p1st, 0.5, static_cast<int>(num_causes)), 0.7},
                          static_cast<int>(num_questions)};
  return cfg;
}

void SessionConfig::validate(Eigen::Index num_questions) const {
  rule.validate();
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  if (num_draws < 1) throw InvalidArgument("B must be at least 1");
  if (!static_order.empty()) {
    std::vector<Eigen::Index> sorted = static_order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Eigen::Index> expected(static_cast<std::size_t>(num_questions));
    std::iota(expected.begin(), expected.end(), Eigen::Index{0});
    if (sorted != expected) throw InvalidArgument("static order must be a permutation of 0..J-1");
  }
  if (metric && metric->kind() != DistanceMetric::Kind::index && metric->num_questions() != num_questions) {
    throw InvalidArgument("distance metric dimension does not match the question bank");
  }
}

std::shared_ptr<const ScoringContext> ScoringContext::from_model(const PosteriorModel& model,
                                                                 const SessionConfig& config) {
  config.validate(model.num_questions());
  std::optional<ParameterDraws> draws;
  if (config.is_predictive()) draws = sample_draws(model, config.num_draws, config.seed);
  return std::make_shared<const ScoringContext>(
      ScoringContext{model.bank, model.cause_labels, posterior_mean(model), std::move(draws)});
}

Session::Session(std::shared_ptr<const ScoringContext> context, SessionConfig config)
    : context_(std::move(context)), config_(std::move(config)) {
  const auto& ctx = *context_;
  const auto num_q = ctx.point.num_questions();
  if (ctx.bank.size() != num_q) throw InvalidArgument("question bank does not match parameter dimensions");
  if (static_cast<Eigen::Index>(ctx.cause_labels.size()) != ctx.point.num_causes()) {
    throw InvalidArgument("cause labels do not match parameter dimensions");
  }
  config_.validate(num_q);
  if (config_.is_predictive() && !ctx.draws) throw InvalidArgument("predictive configuration needs posterior draws");
  if (config_.static_order.empty()) {
    config_.static_order.resize(static_cast<std::size_t>(num_q));
    std::iota(config_.static_order.begin(), config_.static_order.end(), Eigen::Index{0});
  }
  metric_ = config_.metric.value_or(DistanceMetric::index(num_q));

  state_.unlocked.assign(static_cast<std::size_t>(num_q), false);
  for (Eigen::Index j = 0; j < num_q; ++j) state_.unlocked[static_cast<std::size_t>(j)] = ctx.bank.is_root(j);

  point_log_ = ctx.point.log_pi();
  point_probs_ = ctx.point.pi();
  if (ctx.draws) {
    const auto& draws = *ctx.draws;
    draw_log_.resize(draws.size(), ctx.point.num_causes());
    draw_probs_.resize(draws.size(), ctx.point.num_causes());
    for (Eigen::Index b = 0; b < draws.size(); ++b) {
      draw_log_.row(b) = draws[b].log_pi().transpose();
      draw_probs_.row(b) = draws[b].pi().transpose();
    }
  }
}

Session Session::start(const PosteriorModel& model, const SessionConfig& config) {
  return Session(ScoringContext::from_model(model, config), config);
}

CandidateSet Session::candidates() const {
  CandidateSet out;
  const auto num_q = static_cast<Eigen::Index>(state_.unlocked.size());
  for (Eigen::Index j = 0; j < num_q; ++j) {
    if (state_.unlocked[static_cast<std::size_t>(j)] && !state_.responses.contains(j)) out.questions.push_back(j);
  }
  return out;
}

StopDecision Session::evaluate_stop() const {
  StopEvidence evidence{&point_probs_, context_->draws ? &draw_probs_ : nullptr};
  return should_stop(config_.rule, state_.t, evidence, candidates());
}

void Session::stop(const StopDecision& decision) {
  state_.stopped = decision;
  state_.pending.reset();
  state_.classification = current_classification();
}

std::optional<Eigen::Index> Session::next_question() {
  if (stopped()) throw SessionError(SessionError::Kind::already_stopped, "session has already stopped");
  if (state_.pending) return state_.pending;

  const StopDecision decision = evaluate_stop();
  if (decision.stop) {
    stop(decision);
    return std::nullopt;
  }

  const CandidateSet cands = candidates();
  if (config_.strategy == Strategy::static_order) {
    for (const auto j : config_.static_order) {
      if (state_.unlocked[static_cast<std::size_t>(j)] && !state_.responses.contains(j)) {
        state_.pending = j;
        break;
      }
    }
    pending_score_.reset();
    return state_.pending;
  }

  ScoreVector scores = config_.strategy == Strategy::active_predictive
                           ? predictive_pwkl_score(*context_->draws, draw_probs_, cands, config_.argmax_mode)
                           : pwkl_score(context_->point, point_probs_, cands);
  std::optional<Eigen::Index> last;
  if (!state_.asked.empty()) last = state_.asked.back();
  scores = penalize(std::move(scores), last, config_.lambda, metric_);
  const Eigen::Index chosen = select_next(scores);
  state_.pending = chosen;
  pending_score_ = scores.at(chosen);
  return chosen;
}

void Session::record_response(Eigen::Index question, Response value) {
  if (stopped()) throw SessionError(SessionError::Kind::already_stopped, "session has already stopped");
  if (!state_.pending || *state_.pending != question) {
    throw SessionError(SessionError::Kind::out_of_order,
                       "question " + std::to_string(question) + " is not the pending question");
  }
  const auto& ctx = *context_;
  state_.asked.push_back(question);
  state_.responses.emplace(question, value);
  ++state_.t;
  state_.pending.reset();

  if (value != Response::missing) {
    const int v = static_cast<int>(value);
    accumulate_answer(point_log_, ctx.point, question, v);
    point_probs_ = normalize_log_weights(point_log_);
    if (ctx.draws) {
      const auto& draws = *ctx.draws;
      for (Eigen::Index b = 0; b < draws.size(); ++b) {
        const auto& col = v == 1 ? draws[b].log_theta().col(question) : draws[b].log1m_theta().col(question);
        draw_log_.row(b) += col.transpose();
        draw_probs_.row(b) = normalize_log_weights(draw_log_.row(b).transpose()).transpose();
      }
    }
  }
  for (const auto child : ctx.bank.children(question)) {
    if (ctx.bank.unlocks(child, value)) state_.unlocked[static_cast<std::size_t>(child)] = true;
  }

  const StopDecision decision = evaluate_stop();
  std::string method = "static";
  if (config_.strategy == Strategy::active_point) method = "point";
  if (config_.strategy == Strategy::active_predictive) method = "predictive";
  transcript_.push_back(TranscriptRecord{state_.t, question, ctx.bank[question].id, std::move(method), pending_score_,
                                         value, top_causes(3), decision.satisfied_fraction});
  pending_score_.reset();
  if (decision.stop) stop(decision);
}

Eigen::VectorXd Session::reported_posterior() const {
  if (config_.is_predictive()) return draw_probs_.colwise().mean().transpose();
  return point_probs_;
}

Classification Session::current_classification() const {
  if (config_.is_predictive()) return {modal_argmax(draw_probs_), reported_posterior()};
  return {argmax(point_probs_), point_probs_};
}

std::vector<CauseProbability> Session::top_causes(std::size_t k) const {
  const Eigen::VectorXd post = reported_posterior();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(post.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return post[a] > post[b]; });
  order.resize(std::min(k, order.size()));
  std::vector<CauseProbability> out;
  for (const auto y : order) out.push_back({y, context_->cause_labels[static_cast<std::size_t>(y)], post[y]});
  return out;
}

FinalResult Session::finalize() const {
  if (!stopped() || !state_.classification) {
    throw SessionError(SessionError::Kind::not_stopped, "session has not stopped yet");
  }
  const auto& cls = *state_.classification;
  return {cls.cause, context_->cause_labels[static_cast<std::size_t>(cls.cause)], cls.posterior, state_.t,
          state_.stopped->reason};
}

}  // namespace activeva
