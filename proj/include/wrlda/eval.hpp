#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wrlda/corpus.hpp"
#include "wrlda/lda.hpp"

namespace wrlda {

/// One row per document, each a distribution over topics.
using TopicProportions = RowMatrix;

/// gamma rows divided by their sums.
TopicProportions normalize_gamma(const Matrix& gamma);

inline constexpr double kDefaultKlFloor = 1e-12;

/// KL(p || q) after flooring both arguments at `floor` and renormalizing.
/// Throws std::invalid_argument on length mismatch.
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double floor = kDefaultKlFloor);

/// Label-separation score used to tune the loss weight:
///   (1/C1) sum_{same class d != d'} s2(KL(d||d')) + (1/C2) sum_{different class} s1(KL(d||d'))
/// over ordered pairs, with s1 the logistic function and s2 = 1 - s1.
/// Throws DataError when fewer than two classes are present.
double tune_metric_m(const TopicProportions& props, std::span<const int> labels,
                     double floor = kDefaultKlFloor);

struct PairDetail {
  std::size_t doc_a = 0;
  std::size_t doc_b = 0;
  double l2 = 0.0;
  double hellinger = 0.0;
  bool agree_first = false;
  std::size_t agree_top = 0;
};

struct EvalReport {
  std::optional<double> l2d;
  std::optional<double> hd;
  std::optional<double> a1;
  std::optional<double> a5;
  std::optional<double> m_score;
  std::size_t pairs = 0;
  std::vector<PairDetail> details;
};

/// Indices of the `n` largest entries, descending, ties to the lower index.
std::vector<std::size_t> top_indices(std::span<const double> values, std::size_t n);

/// L2-D, H-D (sum of squared root differences), A-1 and A-5 (top-min(5,K)
/// overlap) averaged over `pairs`; row i of props_a is paired with row j of
/// props_b. Throws DataError for an empty pair list or invalid ids.
EvalReport pair_metrics(const TopicProportions& props_a, const TopicProportions& props_b,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Groups documents by pair annotation; each pair id must occur exactly
/// twice. Pairs are ordered by first occurrence.
std::vector<std::pair<std::size_t, std::size_t>> document_pairs(const Corpus& corpus);

/// The `n` most probable tokens of `topic`, ties broken by token id.
std::vector<std::string> top_words(const Matrix& beta, std::size_t topic, std::size_t n,
                                   const Vocabulary& vocab);

/// Flat JSON object with the metrics that are present.
void write_report_json(std::ostream& out, const EvalReport& report);
/// "docA,docB,l2,hellinger,agree1,agree5" plus one row per pair.
void write_pair_details_csv(std::ostream& out, const EvalReport& report);

}  // namespace wrlda
