#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wrlda/corpus.hpp"
#include "wrlda/graph.hpp"
#include "wrlda/lda.hpp"

namespace wrlda {

/// O = likelihood * L - loss * R. from_lambda(l) gives (l, 1 - l); the raw
/// pair allows loss weights far larger than the likelihood weight.
struct ObjectiveWeights {
  double likelihood = 0.5;
  double loss = 0.5;

  static ObjectiveWeights from_lambda(double lambda);
  static ObjectiveWeights raw(double likelihood, double loss);

  double operator()(double l, double r) const noexcept { return likelihood * l - loss * r; }
};

struct FitConfig {
  std::size_t num_topics = 10;
  ObjectiveWeights weights;
  double rho = 0.5;
  double eta = 1e-8;
  double e_tol = 1e-5;
  double em_tol = 1e-6;
  int max_e_iter = 100;
  int max_em_iter = 200;
  int max_smooth_iter = 50;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  AlphaOptions alpha;

  /// Throws ConfigError.
  void validate() const;
};

/// R(beta) = sum over unordered edges of kappa * sum_k (beta_ka - beta_kb)^2,
/// i.e. half of the ordered double sum.
double loss_r(const Matrix& beta, const WordGraph& graph);

/// lambda * L - (1 - lambda) * R.
double objective_o(double l, double r, double lambda);

/// One synchronous mix beta_kw <- rho beta_kw + (1 - rho) * (kappa-weighted
/// neighbor mean), without renormalization. Isolated words are unchanged.
Matrix neighbor_mix(const Matrix& beta, const WordGraph& graph, double rho);

/// neighbor_mix followed by renormalizing every row to sum to 1.
Matrix smooth_beta_step(const Matrix& beta, const WordGraph& graph, double rho);

/// The penalized objective as a function of beta with the variational
/// parameters and alpha held fixed:
///   weights(likelihood_offset + sum_kw beta_num_kw log beta_kw, R(beta)).
double beta_objective(const Matrix& beta, const Matrix& beta_num, const WordGraph& graph,
                      const ObjectiveWeights& weights, double likelihood_offset);

struct PenalizedMStep {
  Matrix beta;
  double objective_initial = 0.0;  // at the closed-form update
  double objective_accepted = 0.0;
  double loss_initial = 0.0;
  double loss_accepted = 0.0;
  int smoothing_steps = 0;      // accepted smoothing steps
  bool kept_previous = false;   // previous beta scored higher than the chain
};

/// Generalized M-step for beta: start from mstep_beta_mle, apply
/// smooth_beta_step while the objective does not decrease (at most
/// max_smooth_iter times), and fall back to `previous_beta` if that scores
/// higher still. When the loss weight is zero or the graph is empty the
/// closed-form update is returned unchanged.
PenalizedMStep mstep_beta_wr(const SufficientStats& stats, const WordGraph& graph,
                             const FitConfig& config, const Matrix* previous_beta = nullptr);

struct TraceRow {
  int iter = 0;
  double likelihood = 0.0;  // L at the parameters used by this E-step
  double loss = 0.0;        // R at the same parameters
  double objective = 0.0;
  double delta = 0.0;       // relative change of O; NaN on the first row
};

struct FitResult {
  ModelParams params;
  VariationalState state;
  std::vector<TraceRow> trace;
  /// One record per M-step (one fewer than trace rows).
  std::vector<PenalizedMStep> msteps;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Seeded uniform(0,1) + 1 noise, row-normalized; alpha = 1/K.
ModelParams initial_params(std::size_t num_topics, std::size_t vocab_size, std::uint64_t seed);

/// Variational EM for the penalized model. Every exit happens right after an
/// E-step, so the returned state is the posterior under the returned params.
FitResult fit(const Corpus& corpus, const WordGraph& graph, const FitConfig& config);

/// Standard LDA: the same loop with the closed-form beta update and O = L.
FitResult fit_lda(const Corpus& corpus, const FitConfig& config);

/// "iter,L,R,O,delta" header plus one row per iteration.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace wrlda
