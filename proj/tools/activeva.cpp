// activeva command-line tool: fit, simulate, evaluate, interview, serve.

#include "activeva/error.hpp"
#include "activeva/harness.hpp"
#include "activeva/io.hpp"
#include "activeva/service.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using namespace activeva;
namespace fs = std::filesystem;

fs::path with_suffix(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return p.string() + suffix;
}

int cmd_fit(const fs::path& data, const std::optional<fs::path>& bank, const std::optional<fs::path>& labels,
            const std::optional<fs::path>& hyper, const std::string& cause_column, const fs::path& out) {
  io::DatasetSchema schema;
  schema.cause_column = cause_column;
  schema.bank_path = bank;
  schema.labels_path = labels;
  const TrainingDataset dataset = io::load_binary_dataset(data, schema);
  const Hyperparameters h = hyper ? io::hyper_from_json(io::read_json(*hyper), dataset.num_causes())
                                  : Hyperparameters::uniform(dataset.num_causes());
  io::save_model(fit(dataset, h), out);
  std::cerr << "fitted " << dataset.num_rows() << " rows, " << dataset.num_causes() << " causes, "
            << dataset.num_questions() << " questions -> " << out.string() << "\n";
  return 0;
}

int cmd_simulate(const std::optional<fs::path>& spec_path, Eigen::Index n, std::uint64_t seed, const fs::path& out) {
  const io::json spec_json = spec_path ? io::read_json(*spec_path) : io::json{{"kind", "correct"}};
  const io::GeneratorSpec spec = io::generator_from_json(spec_json, seed);
  io::json params;
  TrainingDataset data;
  if (const auto* c = std::get_if<CorrectSpec>(&spec)) {
    auto g = gen_correct(*c, n);
    params = io::point_to_json(g.true_params);
    data = std::move(g.data);
  } else {
    auto g = gen_misspecified(std::get<MisspecSpec>(spec), n);
    params = io::latent_params_to_json(g.true_params);
    data = std::move(g.data);
  }
  params["generator"] = io::generator_to_json(spec);
  io::write_text(out, io::dataset_to_csv(data));
  io::write_text(with_suffix(out, ".bank.json"), io::dump({{"questions", io::bank_to_json(data.bank)}}));
  io::write_text(with_suffix(out, ".params.json"), io::dump(params));
  return 0;
}

int cmd_evaluate(const fs::path& config_path, const fs::path& out, std::optional<int> threads) {
  io::json j = io::read_json(config_path);
  // dataset paths are relative to the config file
  const fs::path base = config_path.parent_path();
  auto resolve = [&](io::json& v) {
    if (v.is_string() && fs::path(v.get<std::string>()).is_relative()) v = (base / v.get<std::string>()).string();
  };
  if (j.contains("dataset")) {
    auto& d = j["dataset"];
    if (d.is_string()) {
      resolve(d);
    } else {
      for (const char* key : {"path", "bank", "labels"}) {
        if (d.contains(key)) resolve(d[key]);
      }
    }
  }
  ExperimentConfig cfg = experiment_from_json(j);
  if (threads) cfg.threads = *threads;
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  write_outputs(result, cfg, out);
  return 0;
}

Response read_answer(std::istream& in, std::ostream& prompt) {
  std::string line;
  while (true) {
    if (!std::getline(in, line)) throw InvalidArgument("input ended before the interview stopped");
    const auto c = line.find_first_not_of(" \t\r");
    if (c == std::string::npos) continue;
    switch (line[c]) {
      case 'y': case 'Y': case '1': return Response::yes;
      case 'n': case 'N': case '0': return Response::no;
      case 'd': case 'D': case '?': return Response::missing;
      default: prompt << "  answer y, n or d\n";
    }
  }
}

int cmd_interview(const fs::path& model_path, const std::optional<fs::path>& config_path,
                  const std::optional<std::string>& rule, const std::optional<std::string>& strategy,
                  std::optional<std::uint64_t> seed, const std::optional<fs::path>& transcript_out) {
  const PosteriorModel model = io::load_model(model_path);
  io::json overrides = config_path ? io::read_json(*config_path) : io::json::object();
  if (rule) {
    overrides["rule"] = fs::exists(*rule) ? io::read_json(*rule) : io::json::parse(*rule);
  }
  if (strategy) overrides["strategy"] = *strategy;
  if (seed) overrides["seed"] = *seed;
  const SessionConfig config = io::session_config_from_json(overrides, model.num_causes(), model.bank);
  Session session = Session::start(model, config);

  while (!session.stopped()) {
    const auto q = session.next_question();
    if (!q) break;
    const Question& question = model.bank[*q];
    std::cout << "[" << session.state().t + 1 << "] " << question.text.value_or(question.id) << " (y/n/d) "
              << std::flush;
    const Response answer = read_answer(std::cin, std::cout);
    std::cout << "\n";
    session.record_response(*q, answer);
    const auto& rec = session.transcript().back();
    for (const auto& c : rec.class_posterior_top3) {
      std::cout << "    " << c.label << "  " << io::format_double(c.probability) << "\n";
    }
    if (rec.stop_fraction) std::cout << "    stop fraction " << io::format_double(*rec.stop_fraction) << "\n";
  }
  const FinalResult result = session.finalize();
  std::cout << "cause " << result.cause_label << " after " << result.length << " questions ("
            << to_string(result.reason) << ")\n";
  if (transcript_out) {
    std::string text = io::transcript_jsonl(session.transcript());
    text += io::json{{"final_result", io::final_result_to_json(result)}}.dump() + "\n";
    io::write_text(*transcript_out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive verbal autopsy questionnaires: fit, simulate, evaluate, interview, serve"};
  app.require_subcommand(1);

  fs::path data, out, config, model;
  std::optional<fs::path> bank, labels, hyper, spec, interview_config, transcript, transcript_dir;
  std::optional<std::string> rule, strategy;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, port;
  std::string cause_column = "cause";
  std::string host = "0.0.0.0";
  Eigen::Index n = 1200;
  std::uint64_t sim_seed = 1;

  auto* fit_cmd = app.add_subcommand("fit", "Fit the posterior model to a labeled CSV");
  fit_cmd->add_option("--data", data, "CSV with a cause column and 0/1/NA question columns")->required();
  fit_cmd->add_option("--bank", bank, "Question bank sidecar JSON");
  fit_cmd->add_option("--labels", labels, "Cause label file, one per line");
  fit_cmd->add_option("--hyper", hyper, "Hyperparameter JSON {alpha, a, b}");
  fit_cmd->add_option("--cause-column", cause_column, "Name of the cause column");
  fit_cmd->add_option("--out", out, "Model JSON to write")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic training set");
  sim_cmd->add_option("--spec", spec, "Generator JSON (default: correctly specified reference)");
  sim_cmd->add_option("--n", n, "Number of rows")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_seed, "Seed");
  sim_cmd->add_option("--out", out, "CSV to write; .bank.json and .params.json sidecars go alongside")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "Run a simulation or cross-validation experiment");
  eval_cmd->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", out, "Output directory")->required();
  eval_cmd->add_option("--threads", threads, "Worker threads (default: hardware)");

  auto* int_cmd = app.add_subcommand("interview", "Conduct an interview on the terminal (answers y/n/d on stdin)");
  int_cmd->add_option("--model", model, "Model JSON")->required()->check(CLI::ExistingFile);
  int_cmd->add_option("--config", interview_config, "Session configuration JSON");
  int_cmd->add_option("--rule", rule, "Stopping rule as JSON text or a JSON file");
  int_cmd->add_option("--strategy", strategy, "static, active_point or active_predictive");
  int_cmd->add_option("--seed", seed, "Posterior draw seed");
  int_cmd->add_option("--transcript", transcript, "Write the transcript JSONL here");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the interview HTTP API");
  serve_cmd->add_option("--model", model, "Model JSON (default: $MODEL_PATH)");
  serve_cmd->add_option("--port", port, "Port (default: $PORT or 8080)");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--transcript-dir", transcript_dir, "Directory for completed transcripts ($TRANSCRIPT_DIR)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) return cmd_fit(data, bank, labels, hyper, cause_column, out);
    if (*sim_cmd) return cmd_simulate(spec, n, sim_seed, out);
    if (*eval_cmd) return cmd_evaluate(config, out, threads);
    if (*int_cmd) return cmd_interview(model, interview_config, rule, strategy, seed, transcript);
    if (*serve_cmd) {
      ServerOptions opts = ServerOptions::from_env();
      if (!model.empty()) opts.model_path = model;
      if (port) opts.port = *port;
      if (transcript_dir) opts.transcript_dir = transcript_dir;
      opts.host = host;
      return run_server(opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
