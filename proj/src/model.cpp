#include "activeva/model.hpp"

#include "activeva/error.hpp"
#include "activeva/random.hpp"

namespace activeva {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_answer(const ParameterPoint& params, const Answer& ans) {
  if (ans.question < 0 || ans.question >= params.num_questions()) {
    throw InvalidArgument("answer refers to question " + std::to_string(ans.question) +
                          " outside 0.." + std::to_string(params.num_questions() - 1));
  }
  if (ans.value != 0 && ans.value != 1) {
    throw InvalidArgument("response value " + std::to_string(ans.value) + " for question " +
                          std::to_string(ans.question) + " is not 0 or 1");
  }
}

}  // namespace

void TrainingDataset::validate() const {
  const auto c = num_causes();
  if (c < 1) throw InvalidArgument("dataset has no cause labels");
  if (bank.size() != num_questions()) {
    throw InvalidArgument("question bank has " + std::to_string(bank.size()) + " questions but responses have " +
                          std::to_string(num_questions()) + " columns");
  }
  if (static_cast<Eigen::Index>(causes.size()) != num_rows()) {
    throw InvalidArgument("cause vector length does not match response rows");
  }
  for (std::size_t i = 0; i < causes.size(); ++i) {
    if (causes[i] < 0 || causes[i] >= c) {
      throw InvalidArgument("row " + std::to_string(i) + " has cause " + std::to_string(causes[i] + 1) +
                            " outside 1.." + std::to_string(c));
    }
  }
  for (Eigen::Index i = 0; i < responses.rows(); ++i) {
    for (Eigen::Index j = 0; j < responses.cols(); ++j) {
      const auto v = responses(i, j);
      if (v != 0 && v != 1 && v != -1) {
        throw InvalidArgument("row " + std::to_string(i) + " column " + std::to_string(j) +
                              " holds response " + std::to_string(int{v}));
      }
    }
  }
}

TrainingDataset TrainingDataset::subset(std::span<const Eigen::Index> rows) const {
  TrainingDataset out;
  out.bank = bank;
  out.cause_labels = cause_labels;
  out.causes.reserve(rows.size());
  out.responses.resize(static_cast<Eigen::Index>(rows.size()), num_questions());
  Eigen::Index k = 0;
  for (const auto i : rows) {
    out.causes.push_back(causes[static_cast<std::size_t>(i)]);
    out.responses.row(k++) = responses.row(i);
  }
  return out;
}

Hyperparameters Hyperparameters::uniform(Eigen::Index num_causes) {
  return {Eigen::VectorXd::Ones(num_causes), Eigen::VectorXd::Ones(num_causes), Eigen::VectorXd::Ones(num_causes)};
}

void Hyperparameters::validate(Eigen::Index num_causes) const {
  if (alpha.size() != num_causes || a.size() != num_causes || b.size() != num_causes) {
    throw InvalidArgument("hyperparameters must have one entry per cause (" + std::to_string(num_causes) + ")");
  }
  auto positive = [](const Eigen::VectorXd& v) { return (v.array() > 0.0).all() && v.allFinite(); };
  if (!positive(alpha) || !positive(a) || !positive(b)) {
    throw InvalidArgument("hyperparameters must be strictly positive");
  }
}

void PosteriorModel::validate() const {
  const auto c = num_causes();
  const auto j = num_questions();
  if (c < 1 || j < 1) throw InvalidArgument("model has empty dimensions");
  if (beta_a.rows() != c || beta_b.rows() != c || beta_b.cols() != j) {
    throw InvalidArgument("beta matrices must both be " + dims(c, j));
  }
  if (static_cast<Eigen::Index>(cause_labels.size()) != c) throw InvalidArgument("cause label count mismatch");
  if (bank.size() != j) throw InvalidArgument("question bank size mismatch");
  hyper.validate(c);
  if (!(dirichlet.array() > 0.0).all() || !(beta_a.array() > 0.0).all() || !(beta_b.array() > 0.0).all()) {
    throw InvalidArgument("posterior parameters must be strictly positive");
  }
}

ParameterPoint::ParameterPoint(Eigen::VectorXd pi, Eigen::MatrixXd theta)
    : pi_(std::move(pi)), theta_(std::move(theta)) {
  if (theta_.rows() != pi_.size()) {
    throw InvalidArgument("theta has " + std::to_string(theta_.rows()) + " rows but pi has " +
                          std::to_string(pi_.size()) + " entries");
  }
  if (!(pi_.array() > 0.0).all() || std::abs(pi_.sum() - 1.0) > 1e-9) {
    throw InvalidArgument("pi must be a strictly positive simplex vector");
  }
  if (!((theta_.array() > 0.0) && (theta_.array() < 1.0)).all()) {
    throw InvalidArgument("theta entries must lie strictly inside (0, 1)");
  }
  log_pi_ = pi_.array().log().matrix();
  log_theta_ = theta_.array().log().matrix();
  log1m_theta_ = (-theta_.array()).log1p().matrix();
}

PosteriorModel fit(const TrainingDataset& data, const Hyperparameters& hyper) {
  data.validate();
  const auto c = data.num_causes();
  const auto j = data.num_questions();
  if (data.num_rows() == 0) throw InvalidArgument("cannot fit on an empty dataset");
  hyper.validate(c);

  Eigen::VectorXd cause_counts = Eigen::VectorXd::Zero(c);
  Eigen::MatrixXd ones = Eigen::MatrixXd::Zero(c, j);
  Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(c, j);
  for (Eigen::Index i = 0; i < data.num_rows(); ++i) {
    const auto y = data.causes[static_cast<std::size_t>(i)];
    cause_counts[y] += 1.0;
    for (Eigen::Index q = 0; q < j; ++q) {
      const auto v = data.responses(i, q);
      if (v == 1) ones(y, q) += 1.0;
      else if (v == 0) zeros(y, q) += 1.0;
    }
  }

  PosteriorModel m;
  m.cause_labels = data.cause_labels;
  m.bank = data.bank;
  m.hyper = hyper;
  m.dirichlet = hyper.alpha + cause_counts;
  m.beta_a = ones.colwise() + hyper.a;
  m.beta_b = zeros.colwise() + hyper.b;
  return m;
}

ParameterPoint posterior_mean(const PosteriorModel& model) {
  model.validate();
  Eigen::VectorXd pi = model.dirichlet / model.dirichlet.sum();
  Eigen::MatrixXd theta = model.beta_a.cwiseQuotient(model.beta_a + model.beta_b);
  return {std::move(pi), std::move(theta)};
}

ParameterDraws sample_draws(const PosteriorModel& model, int num_draws, std::uint64_t seed) {
  if (num_draws < 1) throw InvalidArgument("number of posterior draws must be at least 1");
  model.validate();
  const auto c = model.num_causes();
  const auto j = model.num_questions();
  Rng rng(seed);
  ParameterDraws out;
  out.seed = seed;
  out.draws.reserve(static_cast<std::size_t>(num_draws));
  for (int b = 0; b < num_draws; ++b) {
    Eigen::VectorXd pi = rng.dirichlet(model.dirichlet);
    Eigen::MatrixXd theta(c, j);
    for (Eigen::Index y = 0; y < c; ++y) {
      for (Eigen::Index q = 0; q < j; ++q) theta(y, q) = rng.beta(model.beta_a(y, q), model.beta_b(y, q));
    }
    out.draws.emplace_back(std::move(pi), std::move(theta));
  }
  return out;
}

void accumulate_answer(Eigen::Ref<Eigen::VectorXd> log_weights, const ParameterPoint& params,
                       Eigen::Index question, int value) {
  check_answer(params, {question, value});
  if (value == 1) log_weights += params.log_theta().col(question);
  else log_weights += params.log1m_theta().col(question);
}

Eigen::VectorXd class_posterior(const ParameterPoint& params, std::span<const Answer> answers) {
  Eigen::VectorXd log_w = params.log_pi();
  for (const auto& ans : answers) accumulate_answer(log_w, params, ans.question, ans.value);
  return normalize_log_weights(log_w);
}

DrawPosteriors class_posterior_draws(const ParameterDraws& draws, std::span<const Answer> answers) {
  if (draws.size() < 1) throw InvalidArgument("no posterior draws");
  const auto c = draws[0].num_causes();
  DrawPosteriors out{Eigen::MatrixXd(draws.size(), c), 0};
  for (Eigen::Index b = 0; b < draws.size(); ++b) {
    out.probs.row(b) = class_posterior(draws[b], answers).transpose();
  }
  out.modal_cause = modal_argmax(out.probs);
  return out;
}

}  // namespace activeva
