#include "activeva/stopping.hpp"

#include "activeva/error.hpp"

#include <string>

namespace activeva {

namespace {

void check_thresholds(double p1st, double p2nd) {
  if (!(p1st > 0.0 && p1st < 1.0)) throw InvalidArgument("p1st must lie in (0, 1), got " + std::to_string(p1st));
  if (!(p2nd > 0.0 && p2nd <= p1st)) {
    throw InvalidArgument("p2nd must lie in (0, p1st], got " + std::to_string(p2nd));
  }
}

}  // namespace

void StoppingRule::validate() const {
  if (max_length < 1) throw InvalidArgument("max_length must be positive");
  std::visit(
      [this](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FixedLength>) {
          if (c.length < 1 || c.length > max_length) {
            throw InvalidArgument("fixed length must lie in 1..max_length");
          }
        } else if constexpr (std::is_same_v<T, PointThresholds>) {
          check_thresholds(c.p1st, c.p2nd);
        } else {
          check_thresholds(c.p1st, c.p2nd);
          if (!(c.r > 0.0 && c.r < 1.0)) throw InvalidArgument("r must lie in (0, 1), got " + std::to_string(c.r));
        }
      },
      criterion);
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::criterion_met: return "criterion_met";
    case StopReason::max_length_reached: return "max_length_reached";
    case StopReason::bank_exhausted: return "bank_exhausted";
    case StopReason::not_stopped: return "not_stopped";
  }
  return "not_stopped";
}

StopReason stop_reason_from_string(std::string_view name) {
  for (auto r : {StopReason::criterion_met, StopReason::max_length_reached, StopReason::bank_exhausted,
                 StopReason::not_stopped}) {
    if (to_string(r) == name) return r;
  }
  throw InvalidArgument("unknown stop reason '" + std::string(name) + "'");
}

double threshold_pair(double p1st, double d, int num_causes) {
  if (num_causes < 2) throw InvalidArgument("threshold_pair needs at least two causes");
  if (!(p1st > 0.0 && p1st < 1.0)) throw InvalidArgument("p1st must lie in (0, 1)");
  if (!(d >= 0.0 && d <= 1.0)) throw InvalidArgument("d must lie in [0, 1]");
  const double c = num_causes;
  const double rest = 1.0 - p1st;
  return rest / c + d * (c - 2.0) * rest / c;
}

bool point_rule_met(const Eigen::Ref<const Eigen::VectorXd>& probs, double p1st, double p2nd) {
  double first = 0.0;
  double second = 0.0;
  for (Eigen::Index y = 0; y < probs.size(); ++y) {
    const double p = probs[y];
    if (p > first) {
      second = first;
      first = p;
    } else if (p > second) {
      second = p;
    }
  }
  return first > p1st && second < p2nd;
}

PredictiveCheck predictive_rule_met(const Eigen::Ref<const Eigen::MatrixXd>& draw_probs, double p1st, double p2nd,
                                    double r) {
  const auto num_draws = draw_probs.rows();
  if (num_draws < 1) throw InvalidArgument("predictive rule needs at least one draw");
  const Eigen::Index mode = modal_argmax(draw_probs);
  Eigen::Index satisfied = 0;
  for (Eigen::Index b = 0; b < num_draws; ++b) {
    const auto row = draw_probs.row(b);
    if (!(row[mode] > p1st)) continue;
    bool others_low = true;
    for (Eigen::Index y = 0; y < row.size(); ++y) {
      if (y != mode && !(row[y] < p2nd)) {
        others_low = false;
        break;
      }
    }
    if (others_low) ++satisfied;
  }
  const double fraction = static_cast<double>(satisfied) / static_cast<double>(num_draws);
  return {fraction >= r, fraction};
}

StopDecision should_stop(const StoppingRule& rule, int asked, const StopEvidence& evidence,
                         const CandidateSet& candidates) {
  if (asked < 0) throw InvalidArgument("asked count must be non-negative");
  StopDecision out;

  if (const auto* pred = std::get_if<PredictiveThresholds>(&rule.criterion)) {
    if (evidence.draw_probs == nullptr) throw InvalidArgument("predictive rule requires per-draw class posteriors");
    out.satisfied_fraction = predictive_rule_met(*evidence.draw_probs, pred->p1st, pred->p2nd, pred->r).satisfied_fraction;
  }
  if (std::holds_alternative<PointThresholds>(rule.criterion) && evidence.point_probs == nullptr) {
    throw InvalidArgument("point rule requires the point-estimate class posterior");
  }

  auto stop_with = [&](StopReason reason) {
    out.stop = true;
    out.reason = reason;
    return out;
  };

  if (candidates.empty()) return stop_with(StopReason::bank_exhausted);
  if (asked >= rule.max_length) return stop_with(StopReason::max_length_reached);
  if (const auto* fixed = std::get_if<FixedLength>(&rule.criterion); fixed && asked >= fixed->length) {
    return stop_with(StopReason::max_length_reached);
  }
  if (asked == 0) return out;

  if (const auto* point = std::get_if<PointThresholds>(&rule.criterion)) {
    if (point_rule_met(*evidence.point_probs, point->p1st, point->p2nd)) return stop_with(StopReason::criterion_met);
  } else if (const auto* pred = std::get_if<PredictiveThresholds>(&rule.criterion)) {
    if (*out.satisfied_fraction >= pred->r) return stop_with(StopReason::criterion_met);
  }
  return out;
}

}  // namespace activeva
