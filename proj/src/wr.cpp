#include "wrlda/wr.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "wrlda/errors.hpp"

namespace wrlda {

ObjectiveWeights ObjectiveWeights::from_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in [0, 1]");
  return {lambda, 1.0 - lambda};
}

ObjectiveWeights ObjectiveWeights::raw(double likelihood, double loss) {
  if (!(likelihood >= 0.0) || !(loss >= 0.0) || !std::isfinite(likelihood) ||
      !std::isfinite(loss)) {
    throw ConfigError("objective weights must be finite and nonnegative");
  }
  return {likelihood, loss};
}

void FitConfig::validate() const {
  if (num_topics < 1) throw ConfigError("number of topics must be at least 1");
  ObjectiveWeights::raw(weights.likelihood, weights.loss);
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must be in [0, 1]");
  if (!(eta >= 0.0)) throw ConfigError("eta must be nonnegative");
  if (!(e_tol >= 0.0) || !(em_tol >= 0.0)) throw ConfigError("tolerances must be nonnegative");
  if (max_e_iter < 1 || max_em_iter < 1 || max_smooth_iter < 1) {
    throw ConfigError("iteration caps must be at least 1");
  }
  if (workers < 1) throw ConfigError("workers must be at least 1");
}

double loss_r(const Matrix& beta, const WordGraph& graph) {
  if (static_cast<std::size_t>(beta.cols()) != graph.num_vertices()) {
    throw ValidationError("beta has " + std::to_string(beta.cols()) + " columns but graph has " +
                          std::to_string(graph.num_vertices()) + " vertices");
  }
  double total = 0.0;
  for (const auto& e : graph.edges()) {
    total += e.weight * (beta.col(e.a) - beta.col(e.b)).squaredNorm();
  }
  return total;
}

double objective_o(double l, double r, double lambda) { return lambda * l - (1.0 - lambda) * r; }

Matrix neighbor_mix(const Matrix& beta, const WordGraph& graph, double rho) {
  if (static_cast<std::size_t>(beta.cols()) != graph.num_vertices()) {
    throw ValidationError("beta and graph disagree on vocabulary size");
  }
  Matrix out = beta;
  Vector mean(beta.rows());
  for (WordId w = 0; w < graph.num_vertices(); ++w) {
    const double degree = graph.degree(w);
    if (!(degree > 0.0)) continue;
    mean.setZero();
    for (const auto& n : graph.neighbors(w)) mean += n.weight * beta.col(n.id);
    out.col(w) = rho * beta.col(w) + (1.0 - rho) * (mean / degree);
  }
  return out;
}

Matrix smooth_beta_step(const Matrix& beta, const WordGraph& graph, double rho) {
  Matrix out = neighbor_mix(beta, graph, rho);
  for (Eigen::Index k = 0; k < out.rows(); ++k) out.row(k) /= out.row(k).sum();
  return out;
}

double beta_objective(const Matrix& beta, const Matrix& beta_num, const WordGraph& graph,
                      const ObjectiveWeights& weights, double likelihood_offset) {
  double words = 0.0;
  for (Eigen::Index w = 0; w < beta.cols(); ++w) {
    for (Eigen::Index k = 0; k < beta.rows(); ++k) {
      const double n = beta_num(k, w);
      if (n > 0.0) words += n * std::log(beta(k, w));
    }
  }
  const double r = weights.loss != 0.0 ? loss_r(beta, graph) : 0.0;
  return weights(likelihood_offset + words, r);
}

PenalizedMStep mstep_beta_wr(const SufficientStats& stats, const WordGraph& graph,
                             const FitConfig& config, const Matrix* previous_beta) {
  PenalizedMStep out;
  out.beta = mstep_beta_mle(stats.beta_num, config.eta);
  const double offset = stats.elbo_without_words();
  auto score = [&](const Matrix& beta) {
    return beta_objective(beta, stats.beta_num, graph, config.weights, offset);
  };
  out.objective_initial = out.objective_accepted = score(out.beta);
  out.loss_initial = out.loss_accepted = loss_r(out.beta, graph);
  // With no penalty the closed-form update already maximizes O.
  if (config.weights.loss == 0.0 || graph.empty()) return out;

  for (int step = 0; step < config.max_smooth_iter; ++step) {
    Matrix next = smooth_beta_step(out.beta, graph, config.rho);
    const double value = score(next);
    if (!(value >= out.objective_accepted)) break;
    out.beta = std::move(next);
    out.objective_accepted = value;
    ++out.smoothing_steps;
  }
  if (previous_beta != nullptr) {
    const double previous = score(*previous_beta);
    if (previous > out.objective_accepted) {
      out.beta = *previous_beta;
      out.objective_accepted = previous;
      out.kept_previous = true;
    }
  }
  out.loss_accepted = loss_r(out.beta, graph);
  return out;
}

ModelParams initial_params(std::size_t num_topics, std::size_t vocab_size, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  // Top 53 bits of the engine output; portable across standard libraries.
  auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  ModelParams params;
  const auto k = static_cast<Eigen::Index>(num_topics);
  params.alpha = Vector::Constant(k, 1.0 / static_cast<double>(num_topics));
  params.beta.resize(k, static_cast<Eigen::Index>(vocab_size));
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index w = 0; w < params.beta.cols(); ++w) params.beta(r, w) = uniform() + 1.0;
    params.beta.row(r) /= params.beta.row(r).sum();
  }
  return params;
}

namespace {

FitResult run_em(const Corpus& corpus, const WordGraph* graph, const FitConfig& config) {
  config.validate();
  if (corpus.num_docs() == 0) throw DataError("corpus has no documents");
  corpus.validate();
  if (graph != nullptr && graph->num_vertices() != corpus.vocab_size()) {
    throw ValidationError("graph and corpus vocabulary sizes differ");
  }
  const bool penalized = graph != nullptr;
  const ObjectiveWeights weights = penalized ? config.weights : ObjectiveWeights{1.0, 0.0};

  FitResult result;
  result.params = initial_params(config.num_topics, corpus.vocab_size(), config.seed);
  result.state = VariationalState::zeros(corpus, config.num_topics);
  const EStepOptions e_options{config.e_tol, config.max_e_iter};
  const double num_docs = static_cast<double>(corpus.num_docs());

  double previous_objective = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 1; iter <= config.max_em_iter; ++iter) {
    SufficientStats stats;
    try {
      stats = e_step(corpus, result.params, result.state, e_options, iter > 1, config.workers);
    } catch (const NumericalError& e) {
      throw NumericalError("EM iteration " + std::to_string(iter) + ": " + e.what());
    }

    TraceRow row;
    row.iter = iter;
    row.likelihood = stats.elbo;
    row.loss = penalized ? loss_r(result.params.beta, *graph) : 0.0;
    row.objective = weights(row.likelihood, row.loss);
    if (!std::isfinite(row.objective)) {
      throw NumericalError("EM iteration " + std::to_string(iter) + ": non-finite objective");
    }
    if (iter == 1) {
      row.delta = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double change = row.objective - previous_objective;
      row.delta = change == 0.0 ? 0.0
                                : change / std::max(std::abs(previous_objective),
                                                    std::numeric_limits<double>::min());
    }
    result.trace.push_back(row);
    if (iter > 1 && std::abs(row.delta) < config.em_tol) {
      result.converged = true;
      break;
    }
    if (iter == config.max_em_iter) break;
    previous_objective = row.objective;

    if (penalized) {
      FitConfig step_config = config;
      step_config.weights = weights;
      auto mstep = mstep_beta_wr(stats, *graph, step_config, iter > 1 ? &result.params.beta : nullptr);
      result.params.beta = mstep.beta;
      result.msteps.push_back(std::move(mstep));
    } else {
      PenalizedMStep mstep;
      mstep.beta = mstep_beta_mle(stats.beta_num, config.eta);
      result.params.beta = mstep.beta;
      result.msteps.push_back(std::move(mstep));
    }
    if (weights.likelihood > 0.0) {
      auto update = update_alpha_newton(result.params.alpha, stats.alpha_ss, num_docs, config.alpha);
      result.params.alpha = update.alpha;
      if (update.warning) {
        result.warnings.push_back("EM iteration " + std::to_string(iter) + ": " + *update.warning);
      }
    }
  }
  return result;
}

}  // namespace

FitResult fit(const Corpus& corpus, const WordGraph& graph, const FitConfig& config) {
  return run_em(corpus, &graph, config);
}

FitResult fit_lda(const Corpus& corpus, const FitConfig& config) {
  return run_em(corpus, nullptr, config);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iter,L,R,O,delta\n";
  char buf[160];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.likelihood, r.loss,
                  r.objective, r.delta);
    out << buf;
  }
}

}  // namespace wrlda
