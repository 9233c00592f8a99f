#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrlda/corpus.hpp"

namespace wrlda {

using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Dirichlet hyperparameter alpha (length K) and topic-word matrix beta (K x V).
struct ModelParams {
  Vector alpha;
  Matrix beta;

  std::size_t num_topics() const noexcept { return static_cast<std::size_t>(alpha.size()); }
  std::size_t vocab_size() const noexcept { return static_cast<std::size_t>(beta.cols()); }

  /// Throws ValidationError unless alpha > 0 and every beta row is a
  /// distribution (entries >= 0, sum within `tol` of 1).
  void validate(double tol = 1e-9) const;
};

/// Per-document variational parameters. phi[d] has one row per distinct
/// word of document d (identical tokens share a row).
struct VariationalState {
  Matrix gamma;  // M x K
  std::vector<RowMatrix> phi;

  static VariationalState zeros(const Corpus& corpus, std::size_t num_topics);
};

/// Expected-count statistics gathered by the E-step; merging is plain
/// addition, so any partition of documents gives the same totals up to
/// floating-point reassociation.
struct SufficientStats {
  Matrix beta_num;  // K x V, sum_d sum_n phi_dnk * count * [w_dn = w]
  Vector alpha_ss;  // sum_d (digamma(gamma_dk) - digamma(sum_k gamma_dk))
  std::size_t num_docs = 0;
  double elbo = 0.0;            // L(q; alpha, beta) at the E-step parameters
  double elbo_word_part = 0.0;  // the beta-dependent share of `elbo`

  static SufficientStats zeros(std::size_t num_topics, std::size_t vocab_size);
  void merge(const SufficientStats& other);
  /// elbo minus its beta-dependent terms.
  double elbo_without_words() const noexcept { return elbo - elbo_word_part; }
};

/// The five expectation terms of the per-document bound, grouped by what
/// they depend on.
struct ElboTerms {
  double prior = 0.0;    // E[log p(theta|alpha)]
  double topics = 0.0;   // E[log p(z|theta)]
  double words = 0.0;    // E[log p(w|z,beta)]
  double entropy = 0.0;  // -E[log q(theta)] - E[log q(z)]

  double total() const noexcept { return prior + topics + words + entropy; }
};

struct EStepOptions {
  double tol = 1e-5;  // mean |delta gamma|
  int max_iter = 100;
};

struct DocumentPosterior {
  Vector gamma;
  RowMatrix phi;
  int iterations = 0;
  bool converged = false;
};

/// Elementwise log of beta; zeros map to -inf.
Matrix log_beta(const Matrix& beta);

/// Coordinate ascent for one document. Starts from phi = 1/K and
/// gamma = alpha + N/K, or from `warm_gamma` when given. Each sweep sets
/// every phi row from the current gamma, then gamma = alpha + sum_n c_n phi_n.
/// Throws NumericalError (mentioning `doc_id`) on non-finite values.
DocumentPosterior e_step_doc(const Document& doc, const Vector& alpha, const Matrix& log_beta,
                             const EStepOptions& options, const Vector* warm_gamma = nullptr,
                             std::size_t doc_id = 0);
DocumentPosterior e_step_doc(const Document& doc, const ModelParams& params,
                             const EStepOptions& options, const Vector* warm_gamma = nullptr,
                             std::size_t doc_id = 0);

ElboTerms document_elbo(const Document& doc, const Vector& gamma, const RowMatrix& phi,
                        const Vector& alpha, const Matrix& log_beta);

/// Variational lower bound summed over documents.
double elbo(const Corpus& corpus, const VariationalState& state, const ModelParams& params);

/// Runs e_step_doc over the whole corpus, writing into `state` and returning
/// the accumulated statistics. `warm_start` reuses state.gamma as the
/// starting point. Documents are split into `workers` contiguous blocks;
/// workers == 1 is fully sequential.
SufficientStats e_step(const Corpus& corpus, const ModelParams& params, VariationalState& state,
                       const EStepOptions& options, bool warm_start = false,
                       std::size_t workers = 1);

/// beta_kw = (eta + num_kw) / sum_w' (eta + num_kw'). Throws NumericalError
/// for an all-zero row when eta == 0.
Matrix mstep_beta_mle(const Matrix& beta_num, double eta);

// Dirichlet hyperparameter update. With ss_k = sum_d E[log theta_dk]:
//   f(alpha) = M (lgamma(sum alpha) - sum lgamma(alpha_k)) + sum (alpha_k - 1) ss_k
// whose Hessian is diag(h) + z 11^T with h_k = -M trigamma(alpha_k) and
// z = M trigamma(sum alpha).

double alpha_objective(const Vector& alpha, const Vector& ss, double num_docs);
Vector alpha_gradient(const Vector& alpha, const Vector& ss, double num_docs);

/// H^{-1} g for H = diag(h) + z 11^T, in O(K).
Vector structured_hessian_solve(const Vector& h, double z, const Vector& g);

struct AlphaOptions {
  double tol = 1e-8;  // max |delta alpha|
  int max_iter = 100;
  int max_halvings = 32;
};

struct AlphaUpdate {
  Vector alpha;
  int iterations = 0;
  bool converged = false;
  std::optional<std::string> warning;
};

/// Newton iterations alpha <- alpha - t H^{-1} grad, halving t until alpha
/// stays positive and f does not decrease.
AlphaUpdate update_alpha_newton(const Vector& alpha, const Vector& ss, double num_docs,
                                const AlphaOptions& options = {});

}  // namespace wrlda
