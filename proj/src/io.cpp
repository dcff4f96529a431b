#include "activeva/io.hpp"

#include "activeva/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace activeva::io {

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const json& j, const char* name) {
  if (!j.is_array()) throw ParseError(std::string(name) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ParseError(std::string(name) + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(std::string(name) + " rows must all have " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Eigen::VectorXd broadcast(const json& j, const char* key, Eigen::Index n, double fallback) {
  if (!j.contains(key)) return Eigen::VectorXd::Constant(n, fallback);
  const auto& v = j.at(key);
  if (v.is_number()) return Eigen::VectorXd::Constant(n, v.get<double>());
  Eigen::VectorXd out = vector_from_json(v, key);
  if (out.size() != n) throw ParseError(std::string(key) + " must have " + std::to_string(n) + " entries");
  return out;
}

json question_to_json(const QuestionBank& bank, const Question& q) {
  json out = {{"id", q.id}};
  if (q.group) out["group"] = *q.group;
  if (q.parent) out["parent"] = bank[*q.parent].id;
  if (q.trigger) out["trigger"] = *q.trigger;
  if (q.text) out["text"] = *q.text;
  return out;
}

// Fills metadata of `q` from a JSON entry; parent ids are resolved later.
void read_question_fields(const json& e, Question& q, std::optional<json>& parent_ref) {
  if (e.contains("group") && !e["group"].is_null()) q.group = e["group"].get<std::string>();
  if (e.contains("trigger") && !e["trigger"].is_null()) q.trigger = e["trigger"].get<int>();
  if (e.contains("text") && !e["text"].is_null()) q.text = e["text"].get<std::string>();
  if (e.contains("parent") && !e["parent"].is_null()) parent_ref = e["parent"];
}

Eigen::Index resolve_parent(const json& ref, const std::unordered_map<std::string, Eigen::Index>& ids,
                            Eigen::Index n) {
  if (ref.is_number_integer()) {
    const auto idx = ref.get<Eigen::Index>();
    if (idx < 0 || idx >= n) throw ParseError("parent index " + std::to_string(idx) + " out of range");
    return idx;
  }
  const auto id = ref.get<std::string>();
  auto it = ids.find(id);
  if (it == ids.end()) throw ParseError("unknown parent question id '" + id + "'");
  return it->second;
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_no) + ": unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

// Question bank ---------------------------------------------------------

json bank_to_json(const QuestionBank& bank) {
  json out = json::array();
  for (const auto& q : bank.questions()) out.push_back(question_to_json(bank, q));
  return out;
}

QuestionBank bank_from_json(const json& questions) {
  if (!questions.is_array()) throw ParseError("question bank must be an array");
  const auto n = static_cast<Eigen::Index>(questions.size());
  std::vector<Question> qs(questions.size());
  std::vector<std::optional<json>> parents(questions.size());
  std::unordered_map<std::string, Eigen::Index> ids;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    qs[i].id = questions[i].at("id").get<std::string>();
    read_question_fields(questions[i], qs[i], parents[i]);
    ids.emplace(qs[i].id, static_cast<Eigen::Index>(i));
  }
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (parents[i]) qs[i].parent = resolve_parent(*parents[i], ids, n);
  }
  try {
    return QuestionBank(std::move(qs));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

QuestionBank bank_from_sidecar(const json& sidecar, const std::vector<std::string>& column_ids) {
  const json& entries = sidecar.is_object() ? sidecar.at("questions") : sidecar;
  if (!entries.is_array()) throw ParseError("bank sidecar must hold a \"questions\" array");
  std::unordered_map<std::string, Eigen::Index> ids;
  std::vector<Question> qs(column_ids.size());
  for (std::size_t j = 0; j < column_ids.size(); ++j) {
    qs[j].id = column_ids[j];
    if (!ids.emplace(column_ids[j], static_cast<Eigen::Index>(j)).second) {
      throw ParseError("duplicate question id '" + column_ids[j] + "'");
    }
  }
  std::vector<std::optional<json>> parents(column_ids.size());
  for (const auto& e : entries) {
    const auto id = e.at("id").get<std::string>();
    auto it = ids.find(id);
    if (it == ids.end()) throw ParseError("bank sidecar names question '" + id + "' that is not a data column");
    const auto j = static_cast<std::size_t>(it->second);
    read_question_fields(e, qs[j], parents[j]);
  }
  for (std::size_t j = 0; j < qs.size(); ++j) {
    if (parents[j]) qs[j].parent = resolve_parent(*parents[j], ids, static_cast<Eigen::Index>(qs.size()));
  }
  try {
    return QuestionBank(std::move(qs));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

// Model artifact --------------------------------------------------------

json hyper_to_json(const Hyperparameters& hyper) {
  return {{"alpha", vector_to_json(hyper.alpha)}, {"a", vector_to_json(hyper.a)}, {"b", vector_to_json(hyper.b)}};
}

Hyperparameters hyper_from_json(const json& j, Eigen::Index num_causes) {
  if (!j.is_object()) throw ParseError("hyperparameters must be a JSON object");
  Hyperparameters h{broadcast(j, "alpha", num_causes, 1.0), broadcast(j, "a", num_causes, 1.0),
                    broadcast(j, "b", num_causes, 1.0)};
  try {
    h.validate(num_causes);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return h;
}

json model_to_json(const PosteriorModel& model) {
  return {{"version", kModelFormatVersion},
          {"cause_labels", model.cause_labels},
          {"question_bank", bank_to_json(model.bank)},
          {"hyperparameters", hyper_to_json(model.hyper)},
          {"dirichlet", vector_to_json(model.dirichlet)},
          {"beta_a", matrix_to_json(model.beta_a)},
          {"beta_b", matrix_to_json(model.beta_b)}};
}

PosteriorModel model_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ParseError("unsupported model format version " + j.at("version").dump());
    }
    PosteriorModel m;
    m.cause_labels = j.at("cause_labels").get<std::vector<std::string>>();
    m.bank = bank_from_json(j.at("question_bank"));
    const auto c = static_cast<Eigen::Index>(m.cause_labels.size());
    m.hyper = hyper_from_json(j.at("hyperparameters"), c);
    m.dirichlet = vector_from_json(j.at("dirichlet"), "dirichlet");
    m.beta_a = matrix_from_json(j.at("beta_a"), "beta_a");
    m.beta_b = matrix_from_json(j.at("beta_b"), "beta_b");
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model artifact: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("model artifact: ") + e.what());
  }
}

void save_model(const PosteriorModel& model, const std::filesystem::path& path) {
  write_text(path, dump(model_to_json(model)));
}

PosteriorModel load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

json point_to_json(const ParameterPoint& params) {
  return {{"pi", vector_to_json(params.pi())}, {"theta", matrix_to_json(params.theta())}};
}

ParameterPoint point_from_json(const json& j) {
  return {vector_from_json(j.at("pi"), "pi"), matrix_from_json(j.at("theta"), "theta")};
}

// Rules and session configuration ---------------------------------------

StoppingRule rule_from_json(const json& j, Eigen::Index num_causes, Eigen::Index num_questions) {
  try {
    const auto kind = j.value("rule", std::string("predictive"));
    const int max_length = j.value("max_length", static_cast<int>(num_questions));
    auto second = [&](double p1st) {
      if (j.contains("p2nd")) return j.at("p2nd").get<double>();
      if (!(p1st > 0.0 && p1st < 1.0)) throw InvalidArgument("p1st must lie in (0, 1)");
      return threshold_pair(p1st, j.value("d", 0.5), static_cast<int>(num_causes));
    };
    StoppingRule rule{FixedLength{1}, max_length};
    if (kind == "fixed_length") {
      rule.criterion = FixedLength{j.value("T", max_length)};
    } else if (kind == "point") {
      const double p1st = j.value("p1st", 0.8);
      rule.criterion = PointThresholds{p1st, second(p1st)};
    } else if (kind == "predictive") {
      const double p1st = j.value("p1st", 0.8);
      rule.criterion = PredictiveThresholds{p1st, second(p1st), j.value("r", 0.7)};
    } else {
      throw InvalidArgument("unknown stopping rule '" + kind + "'");
    }
    rule.validate();
    return rule;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("stopping rule: ") + e.what());
  }
}

json rule_to_json(const StoppingRule& rule) {
  json out;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FixedLength>) {
          out = {{"rule", "fixed_length"}, {"T", c.length}};
        } else if constexpr (std::is_same_v<T, PointThresholds>) {
          out = {{"rule", "point"}, {"p1st", c.p1st}, {"p2nd", c.p2nd}};
        } else {
          out = {{"rule", "predictive"}, {"p1st", c.p1st}, {"p2nd", c.p2nd}, {"r", c.r}};
        }
      },
      rule.criterion);
  out["max_length"] = rule.max_length;
  return out;
}

json metric_to_json(const DistanceMetric& metric) {
  switch (metric.kind()) {
    case DistanceMetric::Kind::index: return {{"kind", "index"}};
    case DistanceMetric::Kind::group: return {{"kind", "group"}};
    case DistanceMetric::Kind::matrix: return {{"kind", "matrix"}, {"matrix", matrix_to_json(metric.table())}};
  }
  return {{"kind", "index"}};
}

DistanceMetric metric_from_json(const json& j, const QuestionBank& bank) {
  const auto kind = j.is_string() ? j.get<std::string>() : j.value("kind", std::string("index"));
  if (kind == "index") return DistanceMetric::index(bank.size());
  if (kind == "group") return DistanceMetric::group(bank);
  if (kind == "matrix") return DistanceMetric::matrix(matrix_from_json(j.at("matrix"), "matrix"));
  throw InvalidArgument("unknown distance metric '" + kind + "'");
}

json session_config_to_json(const SessionConfig& config) {
  json out = {{"strategy", std::string(to_string(config.strategy))},
              {"rule", rule_to_json(config.rule)},
              {"lambda", config.lambda},
              {"B", config.num_draws},
              {"seed", config.seed},
              {"argmax", config.argmax_mode == PredictiveArgmax::per_draw ? "per_draw" : "modal"}};
  if (config.metric) out["metric"] = metric_to_json(*config.metric);
  if (!config.static_order.empty()) out["static_order"] = config.static_order;
  return out;
}

SessionConfig session_config_from_json(const json& j, Eigen::Index num_causes, const QuestionBank& bank) {
  if (!j.is_object()) throw InvalidArgument("session configuration must be a JSON object");
  try {
    SessionConfig cfg = SessionConfig::defaults(num_causes, bank.size());
    if (j.contains("strategy")) cfg.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    if (j.contains("rule")) cfg.rule = rule_from_json(j.at("rule"), num_causes, bank.size());
    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
    if (j.contains("metric")) cfg.metric = metric_from_json(j.at("metric"), bank);
    if (j.contains("B")) cfg.num_draws = j.at("B").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("static_order")) cfg.static_order = j.at("static_order").get<std::vector<Eigen::Index>>();
    if (j.contains("argmax")) {
      const auto mode = j.at("argmax").get<std::string>();
      if (mode == "per_draw") cfg.argmax_mode = PredictiveArgmax::per_draw;
      else if (mode == "modal") cfg.argmax_mode = PredictiveArgmax::modal;
      else throw InvalidArgument("argmax must be \"per_draw\" or \"modal\"");
    }
    cfg.validate(bank.size());
    return cfg;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("session configuration: ") + e.what());
  }
}

// Transcripts -----------------------------------------------------------

json response_to_json(Response r) {
  if (r == Response::missing) return nullptr;
  return static_cast<int>(r);
}

json top_causes_to_json(const std::vector<CauseProbability>& top) {
  json out = json::array();
  for (const auto& c : top) out.push_back({{"cause", c.label}, {"index", c.cause + 1}, {"p", c.probability}});
  return out;
}

json transcript_record_to_json(const TranscriptRecord& record) {
  json out = {{"t", record.t},
              {"question_id", record.question_id},
              {"score_method", record.score_method},
              {"score", record.score ? json(*record.score) : json(nullptr)},
              {"response", response_to_json(record.response)},
              {"class_posterior_top3", top_causes_to_json(record.class_posterior_top3)}};
  if (record.stop_fraction) out["stop_fraction"] = *record.stop_fraction;
  return out;
}

json final_result_to_json(const FinalResult& result) {
  return {{"cause_label", result.cause_label},
          {"cause_index", result.cause + 1},
          {"posterior", vector_to_json(result.posterior)},
          {"length", result.length},
          {"reason", std::string(to_string(result.reason))}};
}

std::string transcript_jsonl(const std::vector<TranscriptRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += transcript_record_to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

// Datasets --------------------------------------------------------------

TrainingDataset parse_binary_dataset(const std::string& csv_text, const DatasetSchema& schema) {
  std::istringstream in(csv_text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split_csv_line(line, line_no);
  }
  if (header.empty()) throw ParseError("dataset has no header row");
  for (auto& h : header) h = trim(h);

  std::size_t cause_col = header.size();
  std::vector<std::string> question_ids;
  std::vector<std::size_t> question_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.cause_column) cause_col = c;
    else {
      question_ids.push_back(header[c]);
      question_cols.push_back(c);
    }
  }
  if (cause_col == header.size()) throw ParseError("dataset has no '" + schema.cause_column + "' column");

  std::vector<std::string> labels;
  std::unordered_map<std::string, Eigen::Index> label_index;
  const bool fixed_labels = schema.labels_path.has_value();
  if (fixed_labels) {
    std::istringstream lin(read_text(*schema.labels_path));
    std::string l;
    while (std::getline(lin, l)) {
      l = trim(l);
      if (l.empty()) continue;
      if (!label_index.emplace(l, static_cast<Eigen::Index>(labels.size())).second) {
        throw ParseError("duplicate cause label '" + l + "' in label file");
      }
      labels.push_back(l);
    }
  }

  QuestionBank bank = schema.bank_path ? bank_from_sidecar(read_json(*schema.bank_path), question_ids)
                                       : bank_from_sidecar(json::array(), question_ids);

  std::vector<Eigen::Index> causes;
  std::vector<std::int8_t> cells;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError("row at line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(header.size()));
    }
    const std::string label = trim(fields[cause_col]);
    if (label.empty()) throw ParseError("row at line " + std::to_string(line_no) + " has an empty cause");
    auto it = label_index.find(label);
    if (it == label_index.end()) {
      if (fixed_labels) throw ParseError("row at line " + std::to_string(line_no) + ": unknown cause '" + label + "'");
      it = label_index.emplace(label, static_cast<Eigen::Index>(labels.size())).first;
      labels.push_back(label);
    }
    causes.push_back(it->second);
    for (std::size_t q = 0; q < question_cols.size(); ++q) {
      const std::string v = trim(fields[question_cols[q]]);
      if (v == "1") cells.push_back(1);
      else if (v == "0") cells.push_back(0);
      else if (v.empty() || v == "NA" || v == "na" || v == "NaN") cells.push_back(-1);
      else {
        throw ParseError("row at line " + std::to_string(line_no) + ", column '" + question_ids[q] +
                         "': invalid value '" + v + "'");
      }
    }
  }

  TrainingDataset d;
  d.bank = std::move(bank);
  d.cause_labels = std::move(labels);
  d.causes = std::move(causes);
  const auto rows = static_cast<Eigen::Index>(d.causes.size());
  const auto cols = static_cast<Eigen::Index>(question_ids.size());
  d.responses = Eigen::Map<const ResponseMatrix>(cells.data(), rows, cols);
  return d;
}

TrainingDataset load_binary_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
  return parse_binary_dataset(read_text(path), schema);
}

std::string dataset_to_csv(const TrainingDataset& data) {
  std::string out = "cause";
  for (const auto& q : data.bank.questions()) out += "," + csv_escape(q.id);
  out.push_back('\n');
  for (Eigen::Index i = 0; i < data.num_rows(); ++i) {
    out += csv_escape(data.cause_labels[static_cast<std::size_t>(data.causes[static_cast<std::size_t>(i)])]);
    for (Eigen::Index j = 0; j < data.num_questions(); ++j) {
      const auto v = data.responses(i, j);
      out.push_back(',');
      if (v == 1) out.push_back('1');
      else if (v == 0) out.push_back('0');
    }
    out.push_back('\n');
  }
  return out;
}

// Generators ------------------------------------------------------------

GeneratorSpec generator_from_json(const json& j, std::uint64_t seed) {
  try {
    const auto kind = j.value("kind", std::string("correct"));
    if (kind == "correct") {
      CorrectSpec s = CorrectSpec::reference(seed);
      s.num_causes = j.value("C", s.num_causes);
      s.num_questions = j.value("J", s.num_questions);
      s.alpha = broadcast(j, "alpha", s.num_causes, 1.0);
      if (j.contains("beta_groups")) {
        s.beta_groups.clear();
        for (const auto& g : j.at("beta_groups")) {
          const auto range = g.at("causes").get<std::vector<Eigen::Index>>();
          if (range.size() != 2) throw ParseError("beta group causes must be [first, last]");
          s.beta_groups.push_back({range[0] - 1, range[1] - 1, g.at("a").get<double>(), g.at("b").get<double>()});
        }
      } else if (s.num_causes != 10) {
        s.beta_groups = {{0, s.num_causes - 1, 1.0, 1.0}};
      }
      s.validate();
      return s;
    }
    if (kind == "misspecified") {
      MisspecSpec s = MisspecSpec::reference(seed);
      s.num_causes = j.value("C", s.num_causes);
      s.num_questions = j.value("J", s.num_questions);
      s.num_subclasses = j.value("K", s.num_subclasses);
      s.lambda_prior = broadcast(j, "lambda_prior", s.num_subclasses, 1.0);
      if (j.contains("theta_prior")) {
        const auto tp = j.at("theta_prior").get<std::vector<double>>();
        if (tp.size() != 2) throw ParseError("theta_prior must be [a, b]");
        s.theta_a = tp[0];
        s.theta_b = tp[1];
      }
      s.validate();
      return s;
    }
    throw ParseError("unknown generator kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("generator spec: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("generator spec: ") + e.what());
  }
}

json generator_to_json(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CorrectSpec>) {
          json groups = json::array();
          for (const auto& g : s.beta_groups) {
            groups.push_back({{"causes", {g.first + 1, g.last + 1}}, {"a", g.a}, {"b", g.b}});
          }
          return {{"kind", "correct"}, {"C", s.num_causes}, {"J", s.num_questions},
                  {"alpha", vector_to_json(s.alpha)}, {"beta_groups", groups}, {"seed", s.seed}};
        } else {
          return {{"kind", "misspecified"}, {"C", s.num_causes}, {"J", s.num_questions}, {"K", s.num_subclasses},
                  {"lambda_prior", vector_to_json(s.lambda_prior)}, {"theta_prior", {s.theta_a, s.theta_b}},
                  {"seed", s.seed}};
        }
      },
      spec);
}

json latent_params_to_json(const LatentClassParams& params) {
  json theta = json::array();
  for (const auto& t : params.theta) theta.push_back(matrix_to_json(t));
  return {{"lambda", matrix_to_json(params.lambda)}, {"theta", theta}};
}

// Files -----------------------------------------------------------------

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace activeva::io
