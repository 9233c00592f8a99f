#include "wrlda/lda.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "wrlda/errors.hpp"
#include "wrlda/special.hpp"

namespace wrlda {

void ModelParams::validate(double tol) const {
  if (alpha.size() == 0 || beta.rows() != alpha.size()) {
    throw ValidationError("alpha and beta disagree on the number of topics");
  }
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] > 0.0) || !std::isfinite(alpha[k])) {
      throw ValidationError("alpha must be positive and finite");
    }
  }
  for (Eigen::Index k = 0; k < beta.rows(); ++k) {
    if ((beta.row(k).array() < 0.0).any() || !beta.row(k).allFinite()) {
      throw ValidationError("beta row " + std::to_string(k) + " has invalid entries");
    }
    if (std::abs(beta.row(k).sum() - 1.0) > tol) {
      throw ValidationError("beta row " + std::to_string(k) + " does not sum to 1");
    }
  }
}

VariationalState VariationalState::zeros(const Corpus& corpus, std::size_t num_topics) {
  VariationalState state;
  const auto k = static_cast<Eigen::Index>(num_topics);
  state.gamma = Matrix::Zero(static_cast<Eigen::Index>(corpus.num_docs()), k);
  state.phi.reserve(corpus.num_docs());
  for (const auto& doc : corpus.docs()) {
    state.phi.push_back(RowMatrix::Zero(static_cast<Eigen::Index>(doc.unique_words()), k));
  }
  return state;
}

SufficientStats SufficientStats::zeros(std::size_t num_topics, std::size_t vocab_size) {
  SufficientStats s;
  s.beta_num = Matrix::Zero(static_cast<Eigen::Index>(num_topics),
                            static_cast<Eigen::Index>(vocab_size));
  s.alpha_ss = Vector::Zero(static_cast<Eigen::Index>(num_topics));
  return s;
}

void SufficientStats::merge(const SufficientStats& other) {
  beta_num += other.beta_num;
  alpha_ss += other.alpha_ss;
  num_docs += other.num_docs;
  elbo += other.elbo;
  elbo_word_part += other.elbo_word_part;
}

Matrix log_beta(const Matrix& beta) {
  return beta.unaryExpr([](double b) {
    return b > 0.0 ? std::log(b) : -std::numeric_limits<double>::infinity();
  });
}

DocumentPosterior e_step_doc(const Document& doc, const Vector& alpha, const Matrix& log_beta,
                             const EStepOptions& options, const Vector* warm_gamma,
                             std::size_t doc_id) {
  const Eigen::Index k_topics = alpha.size();
  const auto n_words = static_cast<Eigen::Index>(doc.unique_words());
  const double length = static_cast<double>(doc.length());

  DocumentPosterior post;
  post.phi = RowMatrix::Constant(n_words, k_topics, 1.0 / static_cast<double>(k_topics));
  if (warm_gamma != nullptr) {
    post.gamma = *warm_gamma;
  } else {
    post.gamma = alpha.array() + length / static_cast<double>(k_topics);
  }

  Vector expected_log_theta(k_topics);
  Vector log_phi(k_topics);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    // digamma(sum gamma) is common to every topic and cancels on normalizing.
    for (Eigen::Index k = 0; k < k_topics; ++k) expected_log_theta[k] = digamma(post.gamma[k]);

    Vector next = alpha;
    for (Eigen::Index i = 0; i < n_words; ++i) {
      const auto w = static_cast<Eigen::Index>(doc.ids[static_cast<std::size_t>(i)]);
      log_phi = log_beta.col(w) + expected_log_theta;
      const double top = log_phi.maxCoeff();
      if (!std::isfinite(top)) {
        throw NumericalError("document " + std::to_string(doc_id) + ": word " +
                             std::to_string(w) + " has zero probability under every topic");
      }
      log_phi = (log_phi.array() - top).exp();
      post.phi.row(i) = log_phi.transpose() / log_phi.sum();
      next += static_cast<double>(doc.counts[static_cast<std::size_t>(i)]) *
              post.phi.row(i).transpose();
    }
    if (!next.allFinite()) {
      throw NumericalError("document " + std::to_string(doc_id) + ": non-finite gamma");
    }
    const double change = (next - post.gamma).cwiseAbs().mean();
    post.gamma = std::move(next);
    post.iterations = iter;
    if (change < options.tol) {
      post.converged = true;
      break;
    }
  }
  return post;
}

DocumentPosterior e_step_doc(const Document& doc, const ModelParams& params,
                             const EStepOptions& options, const Vector* warm_gamma,
                             std::size_t doc_id) {
  return e_step_doc(doc, params.alpha, log_beta(params.beta), options, warm_gamma, doc_id);
}

ElboTerms document_elbo(const Document& doc, const Vector& gamma, const RowMatrix& phi,
                        const Vector& alpha, const Matrix& log_beta) {
  const Eigen::Index k_topics = alpha.size();
  const double gamma_sum = gamma.sum();
  const double dig_sum = digamma(gamma_sum);
  Vector e_log_theta(k_topics);
  for (Eigen::Index k = 0; k < k_topics; ++k) e_log_theta[k] = digamma(gamma[k]) - dig_sum;

  ElboTerms t;
  t.prior = log_gamma(alpha.sum());
  t.entropy = -log_gamma(gamma_sum);
  for (Eigen::Index k = 0; k < k_topics; ++k) {
    t.prior += -log_gamma(alpha[k]) + (alpha[k] - 1.0) * e_log_theta[k];
    t.entropy += log_gamma(gamma[k]) - (gamma[k] - 1.0) * e_log_theta[k];
  }
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    const auto w = static_cast<Eigen::Index>(doc.ids[static_cast<std::size_t>(i)]);
    const double count = doc.counts[static_cast<std::size_t>(i)];
    double topics = 0.0, words = 0.0, neg_entropy = 0.0;
    for (Eigen::Index k = 0; k < k_topics; ++k) {
      const double p = phi(i, k);
      if (p <= 0.0) continue;
      topics += p * e_log_theta[k];
      words += p * log_beta(k, w);
      neg_entropy += p * std::log(p);
    }
    t.topics += count * topics;
    t.words += count * words;
    t.entropy -= count * neg_entropy;
  }
  return t;
}

double elbo(const Corpus& corpus, const VariationalState& state, const ModelParams& params) {
  if (static_cast<std::size_t>(state.gamma.rows()) != corpus.num_docs() ||
      state.phi.size() != corpus.num_docs() ||
      state.gamma.cols() != static_cast<Eigen::Index>(params.num_topics()) ||
      params.vocab_size() != corpus.vocab_size()) {
    throw ValidationError("variational state does not match corpus/model shapes");
  }
  const Matrix lb = log_beta(params.beta);
  double total = 0.0;
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    const auto& phi = state.phi[d];
    if (static_cast<std::size_t>(phi.rows()) != corpus.doc(d).unique_words() ||
        phi.cols() != state.gamma.cols()) {
      throw ValidationError("phi shape mismatch for document " + std::to_string(d));
    }
    const Vector gamma = state.gamma.row(static_cast<Eigen::Index>(d)).transpose();
    total += document_elbo(corpus.doc(d), gamma, phi, params.alpha, lb).total();
  }
  return total;
}

SufficientStats e_step(const Corpus& corpus, const ModelParams& params, VariationalState& state,
                       const EStepOptions& options, bool warm_start, std::size_t workers) {
  const std::size_t k_topics = params.num_topics();
  const std::size_t num_docs = corpus.num_docs();
  if (params.vocab_size() != corpus.vocab_size()) {
    throw ValidationError("model and corpus vocabulary sizes differ");
  }
  if (static_cast<std::size_t>(state.gamma.rows()) != num_docs ||
      state.gamma.cols() != static_cast<Eigen::Index>(k_topics)) {
    state = VariationalState::zeros(corpus, k_topics);
    warm_start = false;
  }
  const Matrix lb = log_beta(params.beta);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(num_docs, 1));

  auto run_block = [&](std::size_t first, std::size_t last, SufficientStats& stats) {
    for (std::size_t d = first; d < last; ++d) {
      const auto& doc = corpus.doc(d);
      const auto row = static_cast<Eigen::Index>(d);
      Vector warm;
      if (warm_start) warm = state.gamma.row(row).transpose();
      auto post = e_step_doc(doc, params.alpha, lb, options, warm_start ? &warm : nullptr, d);

      const auto terms = document_elbo(doc, post.gamma, post.phi, params.alpha, lb);
      stats.elbo += terms.total();
      stats.elbo_word_part += terms.words;
      const double dig_sum = digamma(post.gamma.sum());
      for (std::size_t k = 0; k < k_topics; ++k) {
        stats.alpha_ss[static_cast<Eigen::Index>(k)] +=
            digamma(post.gamma[static_cast<Eigen::Index>(k)]) - dig_sum;
      }
      for (std::size_t i = 0; i < doc.unique_words(); ++i) {
        stats.beta_num.col(doc.ids[i]) +=
            static_cast<double>(doc.counts[i]) *
            post.phi.row(static_cast<Eigen::Index>(i)).transpose();
      }
      ++stats.num_docs;
      state.gamma.row(row) = post.gamma.transpose();
      state.phi[d] = std::move(post.phi);
    }
  };

  SufficientStats total = SufficientStats::zeros(k_topics, corpus.vocab_size());
  if (workers == 1) {
    run_block(0, num_docs, total);
    return total;
  }

  std::vector<SufficientStats> partial(workers,
                                       SufficientStats::zeros(k_topics, corpus.vocab_size()));
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      const std::size_t first = num_docs * t / workers;
      const std::size_t last = num_docs * (t + 1) / workers;
      threads.emplace_back([&, t, first, last] {
        try {
          run_block(first, last, partial[t]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& p : partial) total.merge(p);
  return total;
}

Matrix mstep_beta_mle(const Matrix& beta_num, double eta) {
  if (eta < 0.0) throw ConfigError("eta must be nonnegative");
  Matrix beta = beta_num.array() + eta;
  for (Eigen::Index k = 0; k < beta.rows(); ++k) {
    const double sum = beta.row(k).sum();
    if (!(sum > 0.0) || !std::isfinite(sum)) {
      throw NumericalError("topic " + std::to_string(k) +
                           " has no expected counts; use a positive eta");
    }
    beta.row(k) /= sum;
  }
  return beta;
}

double alpha_objective(const Vector& alpha, const Vector& ss, double num_docs) {
  double value = num_docs * log_gamma(alpha.sum());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    value += -num_docs * log_gamma(alpha[k]) + (alpha[k] - 1.0) * ss[k];
  }
  return value;
}

Vector alpha_gradient(const Vector& alpha, const Vector& ss, double num_docs) {
  const double dig_sum = digamma(alpha.sum());
  Vector g(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    g[k] = num_docs * (dig_sum - digamma(alpha[k])) + ss[k];
  }
  return g;
}

Vector structured_hessian_solve(const Vector& h, double z, const Vector& g) {
  const double c = (g.array() / h.array()).sum() / (1.0 / z + h.cwiseInverse().sum());
  return (g.array() - c) / h.array();
}

AlphaUpdate update_alpha_newton(const Vector& alpha, const Vector& ss, double num_docs,
                                const AlphaOptions& options) {
  if ((alpha.array() <= 0.0).any()) throw ConfigError("alpha must be positive");
  AlphaUpdate out;
  out.alpha = alpha;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    out.iterations = iter;
    const Vector& current = out.alpha;
    const double f0 = alpha_objective(current, ss, num_docs);
    const Vector grad = alpha_gradient(current, ss, num_docs);
    Vector h(current.size());
    for (Eigen::Index k = 0; k < current.size(); ++k) h[k] = -num_docs * trigamma(current[k]);
    const double z = num_docs * trigamma(current.sum());
    const Vector step = structured_hessian_solve(h, z, grad);

    const double slack = 1e-12 * std::max(1.0, std::abs(f0));
    double scale = 1.0;
    bool accepted = false;
    Vector candidate;
    for (int halving = 0; halving <= options.max_halvings; ++halving, scale *= 0.5) {
      candidate = current - scale * step;
      if ((candidate.array() > 0.0).all() && candidate.allFinite() &&
          alpha_objective(candidate, ss, num_docs) >= f0 - slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.warning = "alpha update: no acceptable step after " +
                    std::to_string(options.max_halvings) + " halvings; keeping last valid alpha";
      return out;
    }
    const double delta = (candidate - current).cwiseAbs().maxCoeff();
    out.alpha = std::move(candidate);
    if (delta < options.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace wrlda
