#pragma once

#include "activeva/datagen.hpp"
#include "activeva/io.hpp"
#include "activeva/model.hpp"
#include "activeva/session.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace activeva {

/// One questionnaire design under comparison.
struct StrategySpec {
  std::string name;
  Strategy strategy = Strategy::active_point;
  /// Select and classify with the generator's true parameters.
  bool oracle = false;
  double lambda = 0.0;
};

/// One (p1st, d) cell of the stopping grid.
struct ThresholdPair {
  double p1st;
  double d;
  double p2nd;
};

struct ExperimentConfig {
  std::optional<io::GeneratorSpec> generator;
  std::optional<std::filesystem::path> dataset;
  io::DatasetSchema schema;

  Eigen::Index n_train = 1000;
  Eigen::Index n_test = 200;
  /// k for cross-validation on `dataset`; 0 uses a random train/test split
  /// of n_test rows.
  int folds = 0;
  int replications = 1;
  std::uint64_t seed = 1;

  std::vector<StrategySpec> strategies;
  /// Interview length cap; 0 means J.
  int max_length = 0;
  int num_draws = 500;
  PredictiveArgmax argmax_mode = PredictiveArgmax::per_draw;
  std::optional<io::json> hyperparameters;

  std::vector<double> p1st_grid{0.8, 0.9};
  std::vector<double> d_grid{0.5, 0.0};
  std::vector<double> r_grid{0.5, 0.7};

  std::optional<io::json> metric;
  /// Order-induced response noise with scale h (index metric unless
  /// `noise_metric` is set).
  std::optional<double> noise_h;
  std::optional<io::json> noise_metric;

  bool write_transcripts = false;
  /// Worker threads; 0 = hardware concurrency.
  int threads = 0;

  void validate() const;
};

ExperimentConfig experiment_from_json(const io::json& j);

/// Accuracy at t = 1..T for each strategy, averaged over runs.
struct CurveResult {
  std::vector<std::string> strategies;
  std::vector<std::vector<double>> accuracy;  // [strategy][t - 1]
};

struct StoppingRow {
  std::string strategy;
  double p1st;
  double d;
  double p2nd;
  std::string rule;  // "point" or "predictive"
  std::optional<double> r;
  double accuracy;
  double median;
  double lower;  // 5th percentile
  double upper;  // 95th percentile
  std::size_t deaths;
};

struct StoppingResult {
  std::vector<StoppingRow> rows;                    // averaged over runs
  std::vector<std::vector<StoppingRow>> per_run;    // [run][row]
};

struct PerCauseRow {
  std::string strategy;
  double p1st;
  double d;
  std::string rule;
  std::optional<double> r;
  Eigen::Index cause;
  std::string cause_label;
  std::size_t deaths;
  double accuracy;
  double median_length;
};

struct PerCauseResult {
  std::vector<PerCauseRow> rows;
};

struct ExperimentResult {
  CurveResult curve;
  StoppingResult stopping;
  PerCauseResult per_cause;
  std::vector<std::string> warnings;
  /// JSONL transcript lines, when requested.
  std::string transcripts;
  std::size_t deaths_evaluated = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

CurveResult fixed_length_curve(const ExperimentConfig& cfg);
StoppingResult stopping_experiment(const ExperimentConfig& cfg);
std::tuple<CurveResult, StoppingResult, PerCauseResult> kfold_cv(const TrainingDataset& dataset, int k,
                                                                 const ExperimentConfig& cfg);

/// Cross-validation on an in-memory dataset; `cfg.folds` is ignored.
ExperimentResult run_kfold(const TrainingDataset& dataset, int k, const ExperimentConfig& cfg);

/// Stratified fold labels (0..k-1), one per row. Causes with fewer than k
/// rows are pooled and assigned together; a warning is appended.
std::vector<int> assign_folds(const std::vector<Eigen::Index>& causes, Eigen::Index num_causes, int k,
                              std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

/// Nearest-rank percentile (p in (0, 100]) of unsorted values.
double nearest_rank_percentile(std::vector<int> values, double p);

/// Writes curve.csv, stopping.csv, stopping_runs.csv, per_cause.csv,
/// metadata.json and (if present) transcripts.jsonl into `dir`.
void write_outputs(const ExperimentResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir);

// Lower-level pieces, exposed for tests ----------------------------------

/// Per-step record of one test death under one strategy, long enough to
/// answer every fixed-length and stopping-rule question afterwards.
struct DeathTrajectory {
  Eigen::Index true_cause = 0;
  std::vector<Eigen::Index> classification;  // after each answer
  std::vector<std::vector<bool>> point_met;  // [t - 1][pair]
  std::vector<std::vector<double>> fraction; // [t - 1][pair], predictive only
  std::vector<TranscriptRecord> transcript;
  int length() const { return static_cast<int>(classification.size()); }
};

/// Answer source for a simulated interview: (question, previous question) -> response.
using Responder = std::function<Response(Eigen::Index, std::optional<Eigen::Index>)>;

DeathTrajectory run_trajectory(std::shared_ptr<const ScoringContext> context, const SessionConfig& config,
                               Eigen::Index true_cause, const Responder& responder,
                               const std::vector<ThresholdPair>& pairs, bool keep_transcript = false);

/// Stop step under a rule applied to a recorded trajectory: the first step
/// whose criterion holds, else the trajectory length.
int stop_step_point(const DeathTrajectory& tr, std::size_t pair);
int stop_step_predictive(const DeathTrajectory& tr, std::size_t pair, double r);

}  // namespace activeva
