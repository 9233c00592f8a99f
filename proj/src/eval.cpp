#include "wrlda/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "wrlda/errors.hpp"

namespace wrlda {

namespace {

std::vector<double> floored(std::span<const double> p, double floor) {
  std::vector<double> out(p.begin(), p.end());
  double sum = 0.0;
  for (auto& x : out) {
    x = std::max(x, floor);
    sum += x;
  }
  for (auto& x : out) x /= sum;
  return out;
}

std::span<const double> row_span(const TopicProportions& m, std::size_t r) {
  return {m.data() + r * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

TopicProportions normalize_gamma(const Matrix& gamma) {
  TopicProportions out = gamma;
  for (Eigen::Index d = 0; d < out.rows(); ++d) out.row(d) /= out.row(d).sum();
  return out;
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double floor) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  const auto pf = floored(p, floor);
  const auto qf = floored(q, floor);
  double kl = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i) kl += pf[i] * std::log(pf[i] / qf[i]);
  return std::max(kl, 0.0);
}

double tune_metric_m(const TopicProportions& props, std::span<const int> labels, double floor) {
  const auto m = static_cast<std::size_t>(props.rows());
  if (labels.size() != m) throw DataError("one label per document is required");
  if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
    throw DataError("tune metric needs at least two classes");
  }
  double same = 0.0, cross = 0.0;
  std::size_t n_same = 0, n_cross = 0;
  for (std::size_t d = 0; d < m; ++d) {
    for (std::size_t e = 0; e < m; ++e) {
      if (d == e) continue;
      const double kl = kl_divergence(row_span(props, d), row_span(props, e), floor);
      if (labels[d] == labels[e]) {
        same += 1.0 - logistic(kl);
        ++n_same;
      } else {
        cross += logistic(kl);
        ++n_cross;
      }
    }
  }
  // A class of one document has no same-class pairs; that term is then empty.
  const double same_term = n_same == 0 ? 0.0 : same / static_cast<double>(n_same);
  return same_term + cross / static_cast<double>(n_cross);
}

std::vector<std::size_t> top_indices(std::span<const double> values, std::size_t n) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  n = std::min(n, values.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] > values[b] || (values[a] == values[b] && a < b);
                    });
  order.resize(n);
  return order;
}

EvalReport pair_metrics(const TopicProportions& props_a, const TopicProportions& props_b,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  if (pairs.empty()) throw DataError("no document pairs to evaluate");
  if (props_a.cols() != props_b.cols()) throw DataError("topic counts differ");
  const auto k = static_cast<std::size_t>(props_a.cols());
  const std::size_t top = std::min<std::size_t>(5, k);

  EvalReport report;
  double l2 = 0.0, hd = 0.0, a1 = 0.0, a5 = 0.0;
  for (const auto& [i, j] : pairs) {
    if (i >= static_cast<std::size_t>(props_a.rows()) ||
        j >= static_cast<std::size_t>(props_b.rows())) {
      throw DataError("pair refers to a missing document");
    }
    auto pa = row_span(props_a, i);
    auto pb = row_span(props_b, j);
    PairDetail detail{i, j};
    double sq = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      sq += (pa[t] - pb[t]) * (pa[t] - pb[t]);
      const double root = std::sqrt(pa[t]) - std::sqrt(pb[t]);
      detail.hellinger += root * root;
    }
    detail.l2 = std::sqrt(sq);
    auto top_a = top_indices(pa, top);
    auto top_b = top_indices(pb, top);
    detail.agree_first = top_a.front() == top_b.front();
    std::sort(top_a.begin(), top_a.end());
    std::sort(top_b.begin(), top_b.end());
    std::vector<std::size_t> common;
    std::set_intersection(top_a.begin(), top_a.end(), top_b.begin(), top_b.end(),
                          std::back_inserter(common));
    detail.agree_top = common.size();

    l2 += detail.l2;
    hd += detail.hellinger;
    a1 += detail.agree_first ? 1.0 : 0.0;
    a5 += static_cast<double>(detail.agree_top);
    report.details.push_back(detail);
  }
  const double n = static_cast<double>(pairs.size());
  report.pairs = pairs.size();
  report.l2d = l2 / n;
  report.hd = hd / n;
  report.a1 = a1 / n;
  report.a5 = a5 / n;
  return report;
}

std::vector<std::pair<std::size_t, std::size_t>> document_pairs(const Corpus& corpus) {
  std::map<int, std::vector<std::size_t>> groups;
  std::vector<int> order;
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    const auto& pair = corpus.doc(d).pair;
    if (!pair) continue;
    auto& members = groups[*pair];
    if (members.empty()) order.push_back(*pair);
    members.push_back(d);
  }
  if (groups.empty()) throw DataError("corpus has no #pair annotations");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (int id : order) {
    const auto& members = groups[id];
    if (members.size() != 2) {
      throw DataError("pair id " + std::to_string(id) + " has " + std::to_string(members.size()) +
                      " documents, expected 2");
    }
    pairs.emplace_back(members[0], members[1]);
  }
  return pairs;
}

std::vector<std::string> top_words(const Matrix& beta, std::size_t topic, std::size_t n,
                                   const Vocabulary& vocab) {
  if (topic >= static_cast<std::size_t>(beta.rows())) {
    throw std::out_of_range("topic index " + std::to_string(topic) + " out of range");
  }
  if (n > static_cast<std::size_t>(beta.cols())) {
    throw std::invalid_argument("n exceeds the vocabulary size");
  }
  const Vector row = beta.row(static_cast<Eigen::Index>(topic)).transpose();
  std::vector<std::string> words;
  for (auto w : top_indices({row.data(), static_cast<std::size_t>(row.size())}, n)) {
    words.push_back(vocab.token(static_cast<WordId>(w)));
  }
  return words;
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  nlohmann::ordered_json j;
  if (report.l2d) j["l2d"] = *report.l2d;
  if (report.hd) j["hd"] = *report.hd;
  if (report.a1) j["a1"] = *report.a1;
  if (report.a5) j["a5"] = *report.a5;
  if (report.m_score) j["m_score"] = *report.m_score;
  if (report.pairs > 0) j["pairs"] = report.pairs;
  out << j.dump(2) << '\n';
}

void write_pair_details_csv(std::ostream& out, const EvalReport& report) {
  out << "docA,docB,l2,hellinger,agree1,agree5\n";
  char buf[128];
  for (const auto& d : report.details) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%d,%zu\n", d.doc_a, d.doc_b, d.l2,
                  d.hellinger, d.agree_first ? 1 : 0, d.agree_top);
    out << buf;
  }
}

}  // namespace wrlda
