#include "activeva/datagen.hpp"

#include "activeva/error.hpp"

#include <algorithm>

namespace activeva {

namespace {

constexpr std::uint64_t kParamStream = 1;
constexpr std::uint64_t kRowStream = 2;

}  // namespace

CorrectSpec CorrectSpec::reference(std::uint64_t seed) {
  CorrectSpec s;
  s.num_causes = 10;
  s.num_questions = 50;
  s.alpha = Eigen::VectorXd::Ones(10);
  s.beta_groups = {{0, 2, 0.5, 0.5}, {3, 5, 3.0, 3.0}, {6, 9, 1.0, 3.0}};
  s.seed = seed;
  return s;
}

void CorrectSpec::validate() const {
  if (num_causes < 1 || num_questions < 1) throw InvalidArgument("generator dimensions must be positive");
  if (alpha.size() != num_causes || !(alpha.array() > 0.0).all()) {
    throw InvalidArgument("alpha must have C strictly positive entries");
  }
  std::vector<int> covered(static_cast<std::size_t>(num_causes), 0);
  for (const auto& g : beta_groups) {
    if (g.first < 0 || g.last >= num_causes || g.first > g.last) throw InvalidArgument("beta group range out of bounds");
    if (!(g.a > 0.0 && g.b > 0.0)) throw InvalidArgument("beta group shapes must be positive");
    for (auto y = g.first; y <= g.last; ++y) ++covered[static_cast<std::size_t>(y)];
  }
  if (std::any_of(covered.begin(), covered.end(), [](int c) { return c != 1; })) {
    throw InvalidArgument("beta groups must partition the causes");
  }
}

MisspecSpec MisspecSpec::reference(std::uint64_t seed) {
  MisspecSpec s;
  s.lambda_prior = Eigen::VectorXd::Ones(3);
  s.seed = seed;
  return s;
}

void MisspecSpec::validate() const {
  if (num_causes < 1 || num_questions < 1) throw InvalidArgument("generator dimensions must be positive");
  if (num_subclasses < 1) throw InvalidArgument("need at least one sub-category");
  if (lambda_prior.size() != num_subclasses || !(lambda_prior.array() > 0.0).all()) {
    throw InvalidArgument("lambda prior must have K strictly positive entries");
  }
  if (!(theta_a > 0.0 && theta_b > 0.0)) throw InvalidArgument("theta prior shapes must be positive");
}

TrainingDataset empty_synthetic_dataset(Eigen::Index num_causes, Eigen::Index num_questions) {
  TrainingDataset d;
  d.bank = QuestionBank::all_roots(num_questions);
  for (Eigen::Index y = 0; y < num_causes; ++y) d.cause_labels.push_back(std::to_string(y + 1));
  d.responses.resize(0, num_questions);
  return d;
}

TrainingDataset simulate_rows(const ParameterPoint& params, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("row count must be at least 1");
  TrainingDataset d = empty_synthetic_dataset(params.num_causes(), params.num_questions());
  d.responses.resize(n, params.num_questions());
  d.causes.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto y = rng.categorical(params.pi());
    d.causes.push_back(y);
    for (Eigen::Index j = 0; j < params.num_questions(); ++j) {
      d.responses(i, j) = rng.bernoulli(params.theta()(y, j)) ? 1 : 0;
    }
  }
  return d;
}

TrainingDataset simulate_rows(const LatentClassParams& params, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("row count must be at least 1");
  const auto num_c = params.lambda.rows();
  if (num_c < 1 || static_cast<Eigen::Index>(params.theta.size()) != num_c) {
    throw InvalidArgument("latent-class parameters need one theta block per cause");
  }
  const auto num_q = params.theta.front().cols();
  TrainingDataset d = empty_synthetic_dataset(num_c, num_q);
  d.responses.resize(n, num_q);
  d.causes.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto y = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(num_c)));
    const Eigen::VectorXd weights = params.lambda.row(y).transpose();
    const auto z = rng.categorical(weights);
    d.causes.push_back(y);
    const auto& theta = params.theta[static_cast<std::size_t>(y)];
    for (Eigen::Index j = 0; j < num_q; ++j) d.responses(i, j) = rng.bernoulli(theta(z, j)) ? 1 : 0;
  }
  return d;
}

GeneratedData<ParameterPoint> gen_correct(const CorrectSpec& spec, Eigen::Index n) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, kParamStream));
  Eigen::VectorXd pi = rng.dirichlet(spec.alpha);
  Eigen::MatrixXd theta(spec.num_causes, spec.num_questions);
  for (const auto& g : spec.beta_groups) {
    for (auto y = g.first; y <= g.last; ++y) {
      for (Eigen::Index j = 0; j < spec.num_questions; ++j) theta(y, j) = rng.beta(g.a, g.b);
    }
  }
  ParameterPoint params(std::move(pi), std::move(theta));
  TrainingDataset data = simulate_rows(params, n, derive_seed(spec.seed, kRowStream));
  return {std::move(params), std::move(data)};
}

GeneratedData<LatentClassParams> gen_misspecified(const MisspecSpec& spec, Eigen::Index n) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, kParamStream));
  LatentClassParams params;
  params.lambda.resize(spec.num_causes, spec.num_subclasses);
  for (Eigen::Index y = 0; y < spec.num_causes; ++y) {
    params.lambda.row(y) = rng.dirichlet(spec.lambda_prior).transpose();
    Eigen::MatrixXd theta(spec.num_subclasses, spec.num_questions);
    for (Eigen::Index k = 0; k < spec.num_subclasses; ++k) {
      for (Eigen::Index j = 0; j < spec.num_questions; ++j) theta(k, j) = rng.beta(spec.theta_a, spec.theta_b);
    }
    params.theta.push_back(std::move(theta));
  }
  TrainingDataset data = simulate_rows(params, n, derive_seed(spec.seed, kRowStream));
  return {std::move(params), std::move(data)};
}

double flip_probability(std::optional<Eigen::Index> prev_question, Eigen::Index question, const NoiseSpec& spec) {
  if (!(spec.h > 0.0)) throw InvalidArgument("noise scale h must be positive");
  if (!prev_question) return 0.0;
  return std::clamp(spec.metric(*prev_question, question) / spec.h, 0.0, 1.0);
}

int apply_order_noise(int true_value, std::optional<Eigen::Index> prev_question, Eigen::Index question,
                      const NoiseSpec& spec, Rng& rng) {
  if (true_value != 0 && true_value != 1) throw InvalidArgument("noise applies to 0/1 responses only");
  const double p = flip_probability(prev_question, question, spec);
  // a draw is consumed even when p = 0 so streams stay aligned across designs
  const bool flip = rng.uniform() < p;
  return flip ? 1 - true_value : true_value;
}

}  // namespace activeva
