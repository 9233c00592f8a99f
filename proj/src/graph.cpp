#include "wrlda/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <tuple>
#include <sstream>

#include "wrlda/errors.hpp"

namespace wrlda {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  if (line.find('\t') != std::string::npos) {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    for (auto& f : fields) {
      auto b = f.find_first_not_of(" \r");
      auto e = f.find_last_not_of(" \r");
      f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
  } else {
    std::stringstream ss(line);
    std::string field;
    while (ss >> field) fields.push_back(field);
  }
  return fields;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

}  // namespace

WordGraph::WordGraph(std::size_t num_vertices)
    : offsets_(num_vertices + 1, 0), degree_(num_vertices, 0.0) {}

WordGraph WordGraph::from_edges(std::size_t num_vertices, std::span<const Edge> edges) {
  std::vector<Edge> merged;
  merged.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.a >= num_vertices || e.b >= num_vertices) {
      throw ValidationError("edge endpoint out of range");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw ValidationError("edge weight must be finite and nonnegative, got " +
                            format_weight(e.weight));
    }
    if (e.a == e.b || e.weight == 0.0) continue;
    merged.push_back({std::min(e.a, e.b), std::max(e.a, e.b), e.weight});
  }
  std::sort(merged.begin(), merged.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.a, x.b, y.weight) < std::tie(y.a, y.b, x.weight);
  });
  // Sorted with the heaviest duplicate first.
  merged.erase(std::unique(merged.begin(), merged.end(),
                           [](const Edge& x, const Edge& y) { return x.a == y.a && x.b == y.b; }),
               merged.end());

  WordGraph g(num_vertices);
  g.edges_ = std::move(merged);
  std::vector<std::size_t> count(num_vertices, 0);
  for (const auto& e : g.edges_) {
    ++count[e.a];
    ++count[e.b];
  }
  for (std::size_t w = 0; w < num_vertices; ++w) g.offsets_[w + 1] = g.offsets_[w] + count[w];
  g.adjacency_.resize(g.offsets_.back());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adjacency_[cursor[e.a]++] = {e.b, e.weight};
    g.adjacency_[cursor[e.b]++] = {e.a, e.weight};
  }
  for (std::size_t w = 0; w < num_vertices; ++w) {
    auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[w]);
    auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[w + 1]);
    std::sort(first, last, [](const Neighbor& x, const Neighbor& y) { return x.id < y.id; });
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += it->weight;
    g.degree_[w] = sum;
  }
  return g;
}

std::span<const Neighbor> WordGraph::neighbors(WordId w) const {
  if (w >= num_vertices()) throw std::out_of_range("word id out of range");
  return {adjacency_.data() + offsets_[w], offsets_[w + 1] - offsets_[w]};
}

double WordGraph::weight(WordId a, WordId b) const {
  auto row = neighbors(a);
  auto it = std::lower_bound(row.begin(), row.end(), b,
                             [](const Neighbor& n, WordId id) { return n.id < id; });
  return it != row.end() && it->id == b ? it->weight : 0.0;
}

void WordGraph::validate() const {
  for (const auto& e : edges_) {
    if (e.a >= e.b) throw ValidationError("edge not stored as a < b (or self-loop)");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError("edge weight must be positive and finite");
    }
  }
  std::size_t directed = 0;
  for (WordId w = 0; w < num_vertices(); ++w) {
    double sum = 0.0;
    for (const auto& n : neighbors(w)) {
      if (n.id == w) throw ValidationError("self-loop stored");
      if (n.weight < 0.0) throw ValidationError("negative weight stored");
      if (weight(n.id, w) != n.weight) throw ValidationError("asymmetric weight stored");
      sum += n.weight;
      ++directed;
    }
    if (std::abs(sum - degree_[w]) > 1e-12 * std::max(1.0, sum)) {
      throw ValidationError("cached degree out of date");
    }
  }
  if (directed != 2 * edges_.size()) throw ValidationError("edge list and adjacency disagree");
}

std::vector<EdgeLine> read_edge_lines(std::istream& in) {
  std::vector<EdgeLine> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 3) throw ParseError("expected 'token1<TAB>token2<TAB>weight'", line_no);
    const auto& text = fields[2];
    double weight = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), weight);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError("bad weight '" + text + "'", line_no);
    }
    lines.push_back({line_no, fields[0], fields[1], weight});
  }
  return lines;
}

WordGraph read_graph(std::istream& in, const Vocabulary& vocab) {
  auto lines = read_edge_lines(in);
  std::set<std::string> unknown;
  std::vector<Edge> edges;
  edges.reserve(lines.size());
  for (const auto& l : lines) {
    if (!std::isfinite(l.weight) || l.weight < 0.0) {
      throw ValidationError("line " + std::to_string(l.line) + ": negative weight " +
                            format_weight(l.weight));
    }
    auto a = vocab.find(l.first);
    auto b = vocab.find(l.second);
    if (!a) unknown.insert(l.first);
    if (!b) unknown.insert(l.second);
    if (a && b) edges.push_back({*a, *b, l.weight});
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& t : unknown) list += (list.empty() ? "" : ", ") + t;
    throw ValidationError("unknown tokens in graph: " + list);
  }
  return WordGraph::from_edges(vocab.size(), edges);
}

WordGraph load_graph(const std::filesystem::path& path, const Vocabulary& vocab) {
  auto in = open_input(path);
  return read_graph(in, vocab);
}

void write_graph(std::ostream& out, const WordGraph& graph, const Vocabulary& vocab) {
  for (const auto& e : graph.edges()) {
    out << vocab.token(e.a) << '\t' << vocab.token(e.b) << '\t' << format_weight(e.weight)
        << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> load_dictionary(
    const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 2) throw ParseError("expected 'source<TAB>target'", line_no);
    pairs.emplace_back(fields[0], fields[1]);
  }
  return pairs;
}

DictionaryGraph build_dictionary_graph(
    std::span<const std::pair<std::string, std::string>> pairs, const Vocabulary& vocab) {
  DictionaryGraph out;
  std::vector<Edge> edges;
  for (const auto& [source, target] : pairs) {
    auto a = vocab.find(source);
    auto b = vocab.find(target);
    if (!a || !b) {
      ++out.skipped;
      continue;
    }
    edges.push_back({*a, *b, 1.0});
  }
  out.graph = WordGraph::from_edges(vocab.size(), edges);
  return out;
}

WordGraph restrict_cross_lingual(const WordGraph& graph, const Vocabulary& vocab) {
  if (!vocab.has_languages()) throw DataError("vocabulary has no language tags");
  if (vocab.size() != graph.num_vertices()) throw DataError("graph and vocabulary sizes differ");
  std::vector<Edge> kept;
  for (const auto& e : graph.edges()) {
    const auto& la = vocab.language(e.a);
    const auto& lb = vocab.language(e.b);
    if (la.empty() || lb.empty()) {
      throw DataError("missing language tag for '" + vocab.token(la.empty() ? e.a : e.b) + "'");
    }
    if (la != lb) kept.push_back(e);
  }
  return WordGraph::from_edges(graph.num_vertices(), kept);
}

std::vector<GraphIssue> check_edge_lines(std::span<const EdgeLine> lines,
                                         const Vocabulary* vocab) {
  std::vector<GraphIssue> issues;
  std::map<std::pair<std::string, std::string>, const EdgeLine*> seen;
  for (const auto& l : lines) {
    if (!std::isfinite(l.weight) || l.weight < 0.0) {
      issues.push_back({l.line, "negative or non-finite weight " + format_weight(l.weight)});
    }
    if (vocab != nullptr) {
      for (const auto* t : {&l.first, &l.second}) {
        if (!vocab->find(*t)) issues.push_back({l.line, "unknown token '" + *t + "'"});
      }
    }
    auto reverse = seen.find({l.second, l.first});
    if (reverse != seen.end() && l.first != l.second && reverse->second->weight != l.weight) {
      issues.push_back({l.line, "asymmetric weight: '" + l.first + "'->'" + l.second + "' is " +
                                    format_weight(l.weight) + " but line " +
                                    std::to_string(reverse->second->line) + " has " +
                                    format_weight(reverse->second->weight)});
    }
    seen.emplace(std::make_pair(l.first, l.second), &l);
  }
  return issues;
}

GraphStats graph_stats(const WordGraph& graph, const Vocabulary& vocab) {
  GraphStats stats;
  stats.vertices = graph.num_vertices();
  stats.edges = graph.num_edges();
  for (WordId w = 0; w < graph.num_vertices(); ++w) {
    auto n = graph.neighbors(w).size();
    ++stats.degree_histogram[n];
    if (n > 0) ++stats.connected_vertices;
  }
  std::size_t cross = 0;
  for (const auto& e : graph.edges()) {
    stats.total_weight += e.weight;
    if (vocab.language(e.a) != vocab.language(e.b)) ++cross;
  }
  if (vocab.has_languages()) {
    stats.cross_lingual_fraction =
        stats.edges == 0 ? 0.0 : static_cast<double>(cross) / static_cast<double>(stats.edges);
  }
  return stats;
}

}  // namespace wrlda
