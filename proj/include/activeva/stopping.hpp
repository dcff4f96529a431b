#pragma once

#include "activeva/selector.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <variant>

namespace activeva {

struct FixedLength {
  int length;
};

/// Stop when the top class probability exceeds p1st and every other is
/// below p2nd, using the posterior-mean parameters.
struct PointThresholds {
  double p1st;
  double p2nd;
};

/// Stop when at least a fraction r of posterior draws satisfy the
/// PointThresholds event for the modal cause.
struct PredictiveThresholds {
  double p1st;
  double p2nd;
  double r;
};

struct StoppingRule {
  std::variant<FixedLength, PointThresholds, PredictiveThresholds> criterion;
  /// Hard cap on interview length.
  int max_length;

  bool is_predictive() const { return std::holds_alternative<PredictiveThresholds>(criterion); }
  /// Throws InvalidArgument when thresholds or lengths are out of range.
  void validate() const;
};

enum class StopReason { criterion_met, max_length_reached, bank_exhausted, not_stopped };

std::string_view to_string(StopReason reason);
StopReason stop_reason_from_string(std::string_view name);

struct StopDecision {
  bool stop = false;
  StopReason reason = StopReason::not_stopped;
  /// Present iff the rule is predictive.
  std::optional<double> satisfied_fraction;
};

/// p2nd = (1 - p1st)/C + d (C - 2)(1 - p1st)/C
double threshold_pair(double p1st, double d, int num_causes);

bool point_rule_met(const Eigen::Ref<const Eigen::VectorXd>& probs, double p1st, double p2nd);

struct PredictiveCheck {
  bool met;
  double satisfied_fraction;
};

PredictiveCheck predictive_rule_met(const Eigen::Ref<const Eigen::MatrixXd>& draw_probs, double p1st, double p2nd,
                                    double r);

/// Class posteriors available at the current step. The point rule reads
/// `point_probs`; the predictive rule reads `draw_probs` (B x C).
struct StopEvidence {
  const Eigen::VectorXd* point_probs = nullptr;
  const Eigen::MatrixXd* draw_probs = nullptr;
};

/// Checks, in order: empty candidate set, length cap, then the configured
/// criterion. The criterion is never evaluated before the first answer.
StopDecision should_stop(const StoppingRule& rule, int asked, const StopEvidence& evidence,
                         const CandidateSet& candidates);

}  // namespace activeva
