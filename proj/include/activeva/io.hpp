#pragma once

#include "activeva/datagen.hpp"
#include "activeva/model.hpp"
#include "activeva/session.hpp"
#include "activeva/stopping.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace activeva::io {

using nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

// Question bank ---------------------------------------------------------

/// [{id, group?, parent?, trigger?, text?}, ...]; parent written as an id.
json bank_to_json(const QuestionBank& bank);
/// Accepts parent as an id string or an index.
QuestionBank bank_from_json(const json& questions);

/// Applies a sidecar {"questions": [...]} to the ids of the CSV columns.
/// Entries are matched by id; columns without an entry stay plain roots.
QuestionBank bank_from_sidecar(const json& sidecar, const std::vector<std::string>& column_ids);

// Model artifact --------------------------------------------------------

json hyper_to_json(const Hyperparameters& hyper);
/// Each of alpha, a, b may be a scalar (broadcast) or a length-C array;
/// absent fields default to 1.
Hyperparameters hyper_from_json(const json& j, Eigen::Index num_causes);

json model_to_json(const PosteriorModel& model);
PosteriorModel model_from_json(const json& j);

void save_model(const PosteriorModel& model, const std::filesystem::path& path);
PosteriorModel load_model(const std::filesystem::path& path);

ParameterPoint point_from_json(const json& j);
json point_to_json(const ParameterPoint& params);

// Rules and session configuration ---------------------------------------

/// {"rule": "fixed_length"|"point"|"predictive", "T", "p1st", "p2nd" | "d", "r", "max_length"}.
StoppingRule rule_from_json(const json& j, Eigen::Index num_causes, Eigen::Index num_questions);
json rule_to_json(const StoppingRule& rule);

json metric_to_json(const DistanceMetric& metric);
DistanceMetric metric_from_json(const json& j, const QuestionBank& bank);

json session_config_to_json(const SessionConfig& config);
/// Missing fields fall back to SessionConfig::defaults(C, J).
SessionConfig session_config_from_json(const json& j, Eigen::Index num_causes, const QuestionBank& bank);

// Transcripts -----------------------------------------------------------

json response_to_json(Response r);
json top_causes_to_json(const std::vector<CauseProbability>& top);
json transcript_record_to_json(const TranscriptRecord& record);
json final_result_to_json(const FinalResult& result);

/// One JSON object per line.
std::string transcript_jsonl(const std::vector<TranscriptRecord>& records);

// Datasets --------------------------------------------------------------

struct DatasetSchema {
  std::string cause_column = "cause";
  std::optional<std::filesystem::path> bank_path;
  /// One label per line; fixes the cause order. Otherwise labels are
  /// numbered by first appearance.
  std::optional<std::filesystem::path> labels_path;
};

/// CSV with a header row; question cells are 0, 1, or empty / NA (missing).
TrainingDataset load_binary_dataset(const std::filesystem::path& path, const DatasetSchema& schema = {});
TrainingDataset parse_binary_dataset(const std::string& csv_text, const DatasetSchema& schema = {});

std::string dataset_to_csv(const TrainingDataset& data);

// Generators ------------------------------------------------------------

using GeneratorSpec = std::variant<CorrectSpec, MisspecSpec>;

/// {"kind": "correct"|"misspecified", ...}; omitted fields take the
/// reference values.
GeneratorSpec generator_from_json(const json& j, std::uint64_t seed);
json generator_to_json(const GeneratorSpec& spec);
json latent_params_to_json(const LatentClassParams& params);

// Files -----------------------------------------------------------------

std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
/// Two-space indented JSON followed by a newline.
std::string dump(const json& j);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace activeva::io
