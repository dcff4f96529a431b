#include "activeva/harness.hpp"

#include "activeva/error.hpp"
#include "activeva/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

namespace activeva {

namespace {

// seed streams derived from each run seed
constexpr std::uint64_t kDataStream = 11;
constexpr std::uint64_t kDrawStream = 12;
constexpr std::uint64_t kNoiseStream = 13;
constexpr std::uint64_t kSplitStream = 14;
constexpr std::uint64_t kFoldStream = 15;

struct RunInput {
  TrainingDataset train;
  TrainingDataset test;
  std::optional<ParameterPoint> truth;
  std::uint64_t seed;
  int index;
};

using RunTrajectories = std::vector<std::vector<DeathTrajectory>>;  // [strategy][death]

bool is_predictive(const StrategySpec& s) { return s.strategy == Strategy::active_predictive; }

int worker_count(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<ThresholdPair> make_pairs(const ExperimentConfig& cfg, Eigen::Index num_causes) {
  std::vector<ThresholdPair> pairs;
  for (const double p1st : cfg.p1st_grid) {
    for (const double d : cfg.d_grid) pairs.push_back({p1st, d, threshold_pair(p1st, d, static_cast<int>(num_causes))});
  }
  return pairs;
}

Hyperparameters analysis_prior(const ExperimentConfig& cfg, Eigen::Index num_causes) {
  if (cfg.hyperparameters) return io::hyper_from_json(*cfg.hyperparameters, num_causes);
  return Hyperparameters::uniform(num_causes);
}

RunTrajectories evaluate_run(const RunInput& run, const ExperimentConfig& cfg, const std::vector<ThresholdPair>& pairs,
                             std::string* transcripts) {
  const PosteriorModel model = fit(run.train, analysis_prior(cfg, run.train.num_causes()));
  const auto num_q = model.num_questions();
  const int length = cfg.max_length > 0 ? std::min<int>(cfg.max_length, static_cast<int>(num_q))
                                        : static_cast<int>(num_q);

  const bool need_draws = std::any_of(cfg.strategies.begin(), cfg.strategies.end(), is_predictive);
  const std::uint64_t draw_seed = derive_seed(run.seed, kDrawStream);
  auto point_ctx = std::make_shared<const ScoringContext>(
      ScoringContext{model.bank, model.cause_labels, posterior_mean(model), std::nullopt});
  std::shared_ptr<const ScoringContext> pred_ctx;
  if (need_draws) {
    pred_ctx = std::make_shared<const ScoringContext>(ScoringContext{
        model.bank, model.cause_labels, posterior_mean(model), sample_draws(model, cfg.num_draws, draw_seed)});
  }
  std::shared_ptr<const ScoringContext> oracle_ctx;
  if (run.truth) {
    oracle_ctx = std::make_shared<const ScoringContext>(
        ScoringContext{model.bank, model.cause_labels, *run.truth, std::nullopt});
  }

  std::optional<DistanceMetric> metric;
  if (cfg.metric) metric = io::metric_from_json(*cfg.metric, model.bank);
  std::optional<NoiseSpec> noise;
  if (cfg.noise_h) {
    noise = NoiseSpec{*cfg.noise_h, cfg.noise_metric ? io::metric_from_json(*cfg.noise_metric, model.bank)
                                                     : DistanceMetric::index(num_q)};
  }
  const std::uint64_t noise_seed = derive_seed(run.seed, kNoiseStream);

  RunTrajectories out(cfg.strategies.size());
  const auto num_deaths = static_cast<std::size_t>(run.test.num_rows());
  for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
    const StrategySpec& spec = cfg.strategies[s];
    std::shared_ptr<const ScoringContext> ctx = point_ctx;
    if (spec.oracle) {
      if (!oracle_ctx) throw InvalidArgument("oracle strategy needs a generator with known parameters");
      ctx = oracle_ctx;
    } else if (is_predictive(spec)) {
      ctx = pred_ctx;
    }
    SessionConfig sc;
    sc.strategy = spec.strategy;
    sc.rule = StoppingRule{FixedLength{length}, length};
    sc.lambda = spec.lambda;
    sc.metric = metric;
    sc.num_draws = cfg.num_draws;
    sc.seed = draw_seed;
    sc.argmax_mode = cfg.argmax_mode;

    out[s].resize(num_deaths);
    parallel_for(num_deaths, worker_count(cfg), [&](std::size_t i) {
      const auto row = static_cast<Eigen::Index>(i);
      Rng noise_rng(derive_seed(noise_seed, i));
      Responder responder = [&](Eigen::Index q, std::optional<Eigen::Index> prev) {
        const int v = run.test.responses(row, q);
        if (v < 0) return Response::missing;
        if (!noise) return static_cast<Response>(v);
        return static_cast<Response>(apply_order_noise(v, prev, q, *noise, noise_rng));
      };
      out[s][i] = run_trajectory(ctx, sc, run.test.causes[i], responder, pairs, transcripts != nullptr);
    });
  }

  if (transcripts) {
    for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
      for (std::size_t i = 0; i < num_deaths; ++i) {
        for (const auto& rec : out[s][i].transcript) {
          io::json line = io::transcript_record_to_json(rec);
          line["run"] = run.index;
          line["death"] = i;
          line["strategy"] = cfg.strategies[s].name;
          *transcripts += line.dump();
          transcripts->push_back('\n');
        }
        out[s][i].transcript.clear();
      }
    }
  }
  return out;
}

// Stopping rows in table order: for each threshold pair, each strategy's
// point row (non-predictive strategies) or predictive rows per r.
struct RowSpec {
  std::size_t strategy;
  std::size_t pair;
  std::optional<double> r;
};

std::vector<RowSpec> row_specs(const ExperimentConfig& cfg, std::size_t num_pairs) {
  std::vector<RowSpec> specs;
  for (std::size_t p = 0; p < num_pairs; ++p) {
    for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
      if (is_predictive(cfg.strategies[s])) {
        for (const double r : cfg.r_grid) specs.push_back({s, p, r});
      } else {
        specs.push_back({s, p, std::nullopt});
      }
    }
  }
  return specs;
}

struct CauseAccum {
  std::vector<int> lengths;
  std::size_t correct = 0;
};

class Aggregator {
 public:
  Aggregator(const ExperimentConfig& cfg, std::vector<ThresholdPair> pairs, std::vector<std::string> labels)
      : cfg_(cfg), pairs_(std::move(pairs)), labels_(std::move(labels)), specs_(row_specs(cfg, pairs_.size())) {
    curve_sum_.resize(cfg.strategies.size());
    cause_.resize(specs_.size(), std::vector<CauseAccum>(labels_.size()));
  }

  void add_run(const RunTrajectories& run) {
    ++runs_;
    for (std::size_t s = 0; s < run.size(); ++s) {
      const auto& deaths = run[s];
      if (deaths.empty()) continue;
      const int max_len = std::max_element(deaths.begin(), deaths.end(), [](const auto& a, const auto& b) {
                            return a.length() < b.length();
                          })->length();
      auto& sum = curve_sum_[s];
      if (static_cast<int>(sum.size()) < max_len) sum.resize(static_cast<std::size_t>(max_len), 0.0);
      for (int t = 1; t <= max_len; ++t) {
        std::size_t correct = 0;
        for (const auto& d : deaths) {
          const int step = std::min(t, d.length());
          if (d.classification[static_cast<std::size_t>(step - 1)] == d.true_cause) ++correct;
        }
        sum[static_cast<std::size_t>(t - 1)] += static_cast<double>(correct) / static_cast<double>(deaths.size());
      }
    }

    std::vector<StoppingRow> rows;
    for (std::size_t k = 0; k < specs_.size(); ++k) {
      const RowSpec& spec = specs_[k];
      const auto& deaths = run[spec.strategy];
      std::vector<int> lengths;
      std::size_t correct = 0;
      for (const auto& d : deaths) {
        const int stop = spec.r ? stop_step_predictive(d, spec.pair, *spec.r) : stop_step_point(d, spec.pair);
        lengths.push_back(stop);
        const bool ok = d.classification[static_cast<std::size_t>(stop - 1)] == d.true_cause;
        if (ok) ++correct;
        auto& acc = cause_[k][static_cast<std::size_t>(d.true_cause)];
        acc.lengths.push_back(stop);
        if (ok) ++acc.correct;
      }
      StoppingRow row = make_row(spec);
      row.deaths = deaths.size();
      row.accuracy = deaths.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(deaths.size());
      row.median = lengths.empty() ? 0.0 : nearest_rank_percentile(lengths, 50.0);
      row.lower = lengths.empty() ? 0.0 : nearest_rank_percentile(lengths, 5.0);
      row.upper = lengths.empty() ? 0.0 : nearest_rank_percentile(lengths, 95.0);
      rows.push_back(row);
    }
    per_run_.push_back(std::move(rows));
  }

  CurveResult curve() const {
    CurveResult c;
    for (std::size_t s = 0; s < cfg_.strategies.size(); ++s) {
      c.strategies.push_back(cfg_.strategies[s].name);
      std::vector<double> acc = curve_sum_[s];
      for (auto& a : acc) a /= static_cast<double>(std::max(1, runs_));
      c.accuracy.push_back(std::move(acc));
    }
    return c;
  }

  StoppingResult stopping() const {
    StoppingResult out;
    out.per_run = per_run_;
    for (std::size_t k = 0; k < specs_.size(); ++k) {
      StoppingRow row = make_row(specs_[k]);
      row.accuracy = row.median = row.lower = row.upper = 0.0;
      row.deaths = 0;
      for (const auto& run : per_run_) {
        row.accuracy += run[k].accuracy;
        row.median += run[k].median;
        row.lower += run[k].lower;
        row.upper += run[k].upper;
        row.deaths += run[k].deaths;
      }
      const double n = static_cast<double>(std::max<std::size_t>(1, per_run_.size()));
      row.accuracy /= n;
      row.median /= n;
      row.lower /= n;
      row.upper /= n;
      out.rows.push_back(row);
    }
    return out;
  }

  PerCauseResult per_cause() const {
    PerCauseResult out;
    for (std::size_t k = 0; k < specs_.size(); ++k) {
      const RowSpec& spec = specs_[k];
      for (std::size_t y = 0; y < labels_.size(); ++y) {
        const auto& acc = cause_[k][y];
        const auto n = acc.lengths.size();
        out.rows.push_back({cfg_.strategies[spec.strategy].name, pairs_[spec.pair].p1st, pairs_[spec.pair].d,
                            spec.r ? "predictive" : "point", spec.r, static_cast<Eigen::Index>(y), labels_[y], n,
                            n ? static_cast<double>(acc.correct) / static_cast<double>(n) : 0.0,
                            n ? nearest_rank_percentile(acc.lengths, 50.0) : 0.0});
      }
    }
    return out;
  }

 private:
  StoppingRow make_row(const RowSpec& spec) const {
    const auto& pair = pairs_[spec.pair];
    return StoppingRow{cfg_.strategies[spec.strategy].name, pair.p1st, pair.d, pair.p2nd,
                       spec.r ? "predictive" : "point", spec.r, 0.0, 0.0, 0.0, 0.0, 0};
  }

  const ExperimentConfig& cfg_;
  std::vector<ThresholdPair> pairs_;
  std::vector<std::string> labels_;
  std::vector<RowSpec> specs_;
  int runs_ = 0;
  std::vector<std::vector<double>> curve_sum_;
  std::vector<std::vector<StoppingRow>> per_run_;
  std::vector<std::vector<CauseAccum>> cause_;
};

ExperimentResult finish(const Aggregator& agg, std::vector<std::string> warnings, std::string transcripts,
                        std::size_t deaths) {
  ExperimentResult r;
  r.curve = agg.curve();
  r.stopping = agg.stopping();
  r.per_cause = agg.per_cause();
  r.warnings = std::move(warnings);
  r.transcripts = std::move(transcripts);
  r.deaths_evaluated = deaths;
  return r;
}

RunInput synthetic_run(const io::GeneratorSpec& gen, const ExperimentConfig& cfg, int rep) {
  const std::uint64_t run_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
  const std::uint64_t data_seed = derive_seed(run_seed, kDataStream);
  const Eigen::Index total = cfg.n_train + cfg.n_test;
  std::vector<Eigen::Index> train_rows(static_cast<std::size_t>(cfg.n_train));
  std::vector<Eigen::Index> test_rows(static_cast<std::size_t>(cfg.n_test));
  std::iota(train_rows.begin(), train_rows.end(), Eigen::Index{0});
  std::iota(test_rows.begin(), test_rows.end(), cfg.n_train);

  return std::visit(
      [&](const auto& spec) {
        auto s = spec;
        s.seed = data_seed;
        RunInput run;
        run.seed = run_seed;
        run.index = rep;
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, CorrectSpec>) {
          auto generated = gen_correct(s, total);
          run.truth = generated.true_params;
          run.train = generated.data.subset(train_rows);
          run.test = generated.data.subset(test_rows);
        } else {
          auto generated = gen_misspecified(s, total);
          run.train = generated.data.subset(train_rows);
          run.test = generated.data.subset(test_rows);
        }
        return run;
      },
      gen);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (generator.has_value() == dataset.has_value()) {
    throw InvalidArgument("experiment needs exactly one of a generator or a dataset");
  }
  if (strategies.empty()) throw InvalidArgument("experiment needs at least one strategy");
  if (p1st_grid.empty() || d_grid.empty()) throw InvalidArgument("threshold grids must be non-empty");
  if (std::any_of(strategies.begin(), strategies.end(), is_predictive) && r_grid.empty()) {
    throw InvalidArgument("r grid must be non-empty for predictive strategies");
  }
  for (const double r : r_grid) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("r values must lie in (0, 1)");
  }
  for (const double p : p1st_grid) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("p1st values must lie in (0, 1)");
  }
  for (const double d : d_grid) {
    if (!(d >= 0.0 && d <= 1.0)) throw InvalidArgument("d values must lie in [0, 1]");
  }
  if (replications < 1) throw InvalidArgument("replications must be at least 1");
  if (num_draws < 1) throw InvalidArgument("B must be at least 1");
  if (folds == 1 || folds < 0) throw InvalidArgument("folds must be 0 or at least 2");
  if (generator && (n_train < 1 || n_test < 1)) throw InvalidArgument("n_train and n_test must be positive");
  for (const auto& s : strategies) {
    if (s.oracle && !(generator && std::holds_alternative<CorrectSpec>(*generator))) {
      throw InvalidArgument("oracle strategy requires the correctly specified generator");
    }
  }
  if (noise_h && !(*noise_h > 0.0)) throw InvalidArgument("noise h must be positive");
}

ExperimentConfig experiment_from_json(const io::json& j) {
  try {
    ExperimentConfig cfg;
    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("generator")) cfg.generator = io::generator_from_json(j.at("generator"), cfg.seed);
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      if (d.is_string()) {
        cfg.dataset = d.get<std::string>();
      } else {
        cfg.dataset = d.at("path").get<std::string>();
        if (d.contains("bank")) cfg.schema.bank_path = d.at("bank").get<std::string>();
        if (d.contains("labels")) cfg.schema.labels_path = d.at("labels").get<std::string>();
        cfg.schema.cause_column = d.value("cause_column", cfg.schema.cause_column);
      }
    }
    cfg.n_train = j.value("n_train", cfg.n_train);
    cfg.n_test = j.value("n_test", cfg.n_test);
    cfg.folds = j.value("folds", cfg.folds);
    cfg.replications = j.value("replications", cfg.replications);
    cfg.max_length = j.value("max_length", cfg.max_length);
    cfg.num_draws = j.value("B", cfg.num_draws);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.write_transcripts = j.value("write_transcripts", cfg.write_transcripts);
    if (j.contains("argmax")) {
      cfg.argmax_mode = j.at("argmax").get<std::string>() == "modal" ? PredictiveArgmax::modal : PredictiveArgmax::per_draw;
    }
    if (j.contains("hyperparameters")) cfg.hyperparameters = j.at("hyperparameters");
    if (j.contains("metric")) cfg.metric = j.at("metric");
    if (j.contains("noise")) {
      cfg.noise_h = j.at("noise").at("h").get<double>();
      if (j.at("noise").contains("metric")) cfg.noise_metric = j.at("noise").at("metric");
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      cfg.p1st_grid = g.value("p1st", cfg.p1st_grid);
      cfg.d_grid = g.value("d", cfg.d_grid);
      cfg.r_grid = g.value("r", cfg.r_grid);
    }
    const io::json strategies =
        j.value("strategies", io::json::array({"static", "active_point", "active_predictive"}));
    for (const auto& s : strategies) {
      StrategySpec spec;
      std::string kind;
      if (s.is_string()) {
        kind = s.get<std::string>();
        spec.name = kind;
      } else {
        kind = s.at("strategy").get<std::string>();
        spec.name = s.value("name", kind);
        spec.lambda = s.value("lambda", 0.0);
      }
      if (kind == "oracle") {
        spec.oracle = true;
        spec.strategy = Strategy::active_point;
      } else {
        spec.strategy = strategy_from_string(kind);
      }
      cfg.strategies.push_back(spec);
    }
    cfg.validate();
    return cfg;
  } catch (const io::json::exception& e) {
    throw InvalidArgument(std::string("experiment config: ") + e.what());
  }
}

double nearest_rank_percentile(std::vector<int> values, double p) {
  if (values.empty()) throw InvalidArgument("percentile of an empty sample");
  if (!(p > 0.0 && p <= 100.0)) throw InvalidArgument("percentile must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

DeathTrajectory run_trajectory(std::shared_ptr<const ScoringContext> context, const SessionConfig& config,
                               Eigen::Index true_cause, const Responder& responder,
                               const std::vector<ThresholdPair>& pairs, bool keep_transcript) {
  Session session(std::move(context), config);
  const bool has_draws = session.context().draws.has_value();
  DeathTrajectory tr;
  tr.true_cause = true_cause;
  std::optional<Eigen::Index> prev;
  while (!session.stopped()) {
    const auto q = session.next_question();
    if (!q) break;
    session.record_response(*q, responder(*q, prev));
    prev = *q;
    tr.classification.push_back(session.current_classification().cause);
    std::vector<bool> met(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      met[p] = point_rule_met(session.point_probs(), pairs[p].p1st, pairs[p].p2nd);
    }
    tr.point_met.push_back(std::move(met));
    if (has_draws) {
      std::vector<double> frac(pairs.size());
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        frac[p] = predictive_rule_met(session.draw_probs(), pairs[p].p1st, pairs[p].p2nd, 1.0).satisfied_fraction;
      }
      tr.fraction.push_back(std::move(frac));
    }
  }
  if (keep_transcript) tr.transcript = session.transcript();
  return tr;
}

int stop_step_point(const DeathTrajectory& tr, std::size_t pair) {
  for (int t = 1; t <= tr.length(); ++t) {
    if (tr.point_met[static_cast<std::size_t>(t - 1)][pair]) return t;
  }
  return tr.length();
}

int stop_step_predictive(const DeathTrajectory& tr, std::size_t pair, double r) {
  if (tr.fraction.size() != tr.classification.size()) {
    throw InvalidArgument("trajectory has no predictive record");
  }
  for (int t = 1; t <= tr.length(); ++t) {
    if (tr.fraction[static_cast<std::size_t>(t - 1)][pair] >= r) return t;
  }
  return tr.length();
}

std::vector<int> assign_folds(const std::vector<Eigen::Index>& causes, Eigen::Index num_causes, int k,
                              std::uint64_t seed, std::vector<std::string>* warnings) {
  if (k < 2) throw InvalidArgument("cross-validation needs k >= 2");
  if (causes.size() < static_cast<std::size_t>(k)) throw InvalidArgument("fewer rows than folds");
  std::vector<std::vector<std::size_t>> strata(static_cast<std::size_t>(num_causes));
  for (std::size_t i = 0; i < causes.size(); ++i) strata[static_cast<std::size_t>(causes[i])].push_back(i);

  Rng rng(seed);
  std::vector<int> fold(causes.size(), 0);
  std::vector<std::size_t> pooled;
  std::size_t offset = 0;
  for (std::size_t y = 0; y < strata.size(); ++y) {
    auto& rows = strata[y];
    if (rows.empty()) continue;
    if (rows.size() < static_cast<std::size_t>(k)) {
      if (warnings) {
        warnings->push_back("cause " + std::to_string(y + 1) + " has " + std::to_string(rows.size()) +
                            " rows (< k = " + std::to_string(k) + "); assigned without stratification");
      }
      pooled.insert(pooled.end(), rows.begin(), rows.end());
      continue;
    }
    rng.shuffle(rows.begin(), rows.end());
    for (const auto i : rows) fold[i] = static_cast<int>(offset++ % static_cast<std::size_t>(k));
  }
  std::sort(pooled.begin(), pooled.end());
  rng.shuffle(pooled.begin(), pooled.end());
  for (const auto i : pooled) fold[i] = static_cast<int>(offset++ % static_cast<std::size_t>(k));
  return fold;
}

ExperimentResult run_kfold(const TrainingDataset& dataset, int k, const ExperimentConfig& cfg) {
  cfg.validate();
  dataset.validate();
  std::vector<std::string> warnings;
  const auto folds = assign_folds(dataset.causes, dataset.num_causes(), k, derive_seed(cfg.seed, kFoldStream), &warnings);
  const auto pairs = make_pairs(cfg, dataset.num_causes());
  Aggregator agg(cfg, pairs, dataset.cause_labels);
  std::string transcripts;

  RunTrajectories pooled(cfg.strategies.size());
  for (int f = 0; f < k; ++f) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      (folds[i] == f ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
    }
    if (test_rows.empty() || train_rows.empty()) continue;
    RunInput run{dataset.subset(train_rows), dataset.subset(test_rows), std::nullopt,
                 derive_seed(cfg.seed, static_cast<std::uint64_t>(f)), f};
    auto fold_result = evaluate_run(run, cfg, pairs, cfg.write_transcripts ? &transcripts : nullptr);
    for (std::size_t s = 0; s < pooled.size(); ++s) {
      for (auto& d : fold_result[s]) pooled[s].push_back(std::move(d));
    }
  }
  agg.add_run(pooled);
  return finish(agg, std::move(warnings), std::move(transcripts), dataset.causes.size());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.dataset) {
    TrainingDataset data = io::load_binary_dataset(*cfg.dataset, cfg.schema);
    if (cfg.folds >= 2) return run_kfold(data, cfg.folds, cfg);

    // repeated random train/test splits
    std::vector<std::string> warnings;
    const auto pairs = make_pairs(cfg, data.num_causes());
    Aggregator agg(cfg, pairs, data.cause_labels);
    std::string transcripts;
    std::size_t deaths = 0;
    if (cfg.n_test >= data.num_rows()) throw InvalidArgument("n_test must be smaller than the dataset");
    for (int rep = 0; rep < cfg.replications; ++rep) {
      const std::uint64_t run_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
      std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.num_rows()));
      std::iota(rows.begin(), rows.end(), Eigen::Index{0});
      Rng rng(derive_seed(run_seed, kSplitStream));
      rng.shuffle(rows.begin(), rows.end());
      const auto cut = static_cast<std::size_t>(cfg.n_test);
      std::vector<Eigen::Index> test_rows(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(cut));
      std::vector<Eigen::Index> train_rows(rows.begin() + static_cast<std::ptrdiff_t>(cut), rows.end());
      RunInput run{data.subset(train_rows), data.subset(test_rows), std::nullopt, run_seed, rep};
      agg.add_run(evaluate_run(run, cfg, pairs, cfg.write_transcripts ? &transcripts : nullptr));
      deaths += test_rows.size();
    }
    return finish(agg, std::move(warnings), std::move(transcripts), deaths);
  }

  const Eigen::Index num_causes = std::visit([](const auto& s) { return s.num_causes; }, *cfg.generator);
  const auto pairs = make_pairs(cfg, num_causes);
  std::vector<std::string> labels;
  for (Eigen::Index y = 0; y < num_causes; ++y) labels.push_back(std::to_string(y + 1));
  Aggregator agg(cfg, pairs, labels);
  std::string transcripts;
  for (int rep = 0; rep < cfg.replications; ++rep) {
    const RunInput run = synthetic_run(*cfg.generator, cfg, rep);
    agg.add_run(evaluate_run(run, cfg, pairs, cfg.write_transcripts ? &transcripts : nullptr));
  }
  return finish(agg, {}, std::move(transcripts),
                static_cast<std::size_t>(cfg.n_test) * static_cast<std::size_t>(cfg.replications));
}

CurveResult fixed_length_curve(const ExperimentConfig& cfg) { return run_experiment(cfg).curve; }

StoppingResult stopping_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg).stopping; }

std::tuple<CurveResult, StoppingResult, PerCauseResult> kfold_cv(const TrainingDataset& dataset, int k,
                                                                 const ExperimentConfig& cfg) {
  auto r = run_kfold(dataset, k, cfg);
  return {std::move(r.curve), std::move(r.stopping), std::move(r.per_cause)};
}

namespace {

std::string optional_cell(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

std::string stopping_csv(const std::vector<StoppingRow>& rows, std::optional<int> run) {
  std::string out;
  for (const auto& r : rows) {
    if (run) out += std::to_string(*run) + ",";
    out += r.strategy + "," + io::format_double(r.p1st) + "," + io::format_double(r.d) + "," +
           io::format_double(r.p2nd) + "," + r.rule + "," + optional_cell(r.r) + "," + io::format_double(r.accuracy) +
           "," + io::format_double(r.median) + "," + io::format_double(r.lower) + "," + io::format_double(r.upper) +
           "," + std::to_string(r.deaths) + "\n";
  }
  return out;
}

}  // namespace

void write_outputs(const ExperimentResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::string curve = "t,strategy,accuracy\n";
  for (std::size_t s = 0; s < result.curve.strategies.size(); ++s) {
    const auto& acc = result.curve.accuracy[s];
    for (std::size_t t = 0; t < acc.size(); ++t) {
      curve += std::to_string(t + 1) + "," + result.curve.strategies[s] + "," + io::format_double(acc[t]) + "\n";
    }
  }
  io::write_text(dir / "curve.csv", curve);

  const std::string header = "strategy,p1st,d,p2nd,rule,r,accuracy,median,lower,upper,deaths\n";
  io::write_text(dir / "stopping.csv", header + stopping_csv(result.stopping.rows, std::nullopt));
  std::string runs = "run," + header;
  for (std::size_t k = 0; k < result.stopping.per_run.size(); ++k) {
    runs += stopping_csv(result.stopping.per_run[k], static_cast<int>(k));
  }
  io::write_text(dir / "stopping_runs.csv", runs);

  std::string per_cause = "strategy,p1st,d,rule,r,cause,cause_label,deaths,accuracy,median_length\n";
  for (const auto& r : result.per_cause.rows) {
    per_cause += r.strategy + "," + io::format_double(r.p1st) + "," + io::format_double(r.d) + "," + r.rule + "," +
                 optional_cell(r.r) + "," + std::to_string(r.cause + 1) + "," + r.cause_label + "," +
                 std::to_string(r.deaths) + "," + io::format_double(r.accuracy) + "," +
                 io::format_double(r.median_length) + "\n";
  }
  io::write_text(dir / "per_cause.csv", per_cause);

  io::json meta = {{"deaths_evaluated", result.deaths_evaluated},
                   {"runs", result.stopping.per_run.size()},
                   {"strategies", result.curve.strategies},
                   {"percentile", "nearest-rank"},
                   {"stratified_folds", cfg.folds >= 2},
                   {"folds", cfg.folds},
                   {"B", cfg.num_draws},
                   {"seed", cfg.seed},
                   {"warnings", result.warnings}};
  if (cfg.generator) meta["generator"] = io::generator_to_json(*cfg.generator);
  io::write_text(dir / "metadata.json", io::dump(meta));
  if (!result.transcripts.empty()) io::write_text(dir / "transcripts.jsonl", result.transcripts);
}

}  // namespace activeva
