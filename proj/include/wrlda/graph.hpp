#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wrlda/corpus.hpp"

namespace wrlda {

/// Undirected weighted edge; always stored with a < b.
struct Edge {
  WordId a = 0;
  WordId b = 0;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

struct Neighbor {
  WordId id = 0;
  double weight = 0.0;
};

/// Sparse symmetric word-similarity graph with cached weighted degrees.
///
/// Invariants: weights are finite and > 0, no self-loops, neighbor lists are
/// mirror images of each other, degree(w) is the sum of w's incident weights.
class WordGraph {
 public:
  WordGraph() = default;
  /// Graph with no edges.
  explicit WordGraph(std::size_t num_vertices);

  /// Duplicate pairs (in either orientation) keep the maximum weight;
  /// self-loops and zero weights are dropped. Negative, non-finite or
  /// out-of-range entries throw ValidationError.
  static WordGraph from_edges(std::size_t num_vertices, std::span<const Edge> edges);

  std::size_t num_vertices() const noexcept { return degree_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  std::span<const Neighbor> neighbors(WordId w) const;
  double degree(WordId w) const { return degree_.at(w); }
  /// 0 when the pair is not connected.
  double weight(WordId a, WordId b) const;
  /// Unordered edges sorted by (a, b).
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Rechecks every invariant from scratch; throws ValidationError.
  void validate() const;

  bool operator==(const WordGraph& other) const {
    return degree_.size() == other.degree_.size() && edges_ == other.edges_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> degree_;
};

/// One parsed line of an edge-list file.
struct EdgeLine {
  std::size_t line = 0;
  std::string first;
  std::string second;
  double weight = 0.0;
};

/// Reads "token1<TAB>token2<TAB>weight" lines (whitespace-separated is also
/// accepted). Throws ParseError on malformed lines; does not check weights.
std::vector<EdgeLine> read_edge_lines(std::istream& in);

WordGraph read_graph(std::istream& in, const Vocabulary& vocab);
/// Throws ValidationError listing every unknown token, or naming the first
/// negative weight.
WordGraph load_graph(const std::filesystem::path& path, const Vocabulary& vocab);

/// Writes one line per unordered edge in the edge-list format.
void write_graph(std::ostream& out, const WordGraph& graph, const Vocabulary& vocab);

/// "source<TAB>target" per line.
std::vector<std::pair<std::string, std::string>> load_dictionary(const std::filesystem::path& path);

struct DictionaryGraph {
  WordGraph graph;
  std::size_t skipped = 0;  // pairs with a token missing from the vocabulary
};

/// Unit-weight edge for every translation pair whose tokens are both known.
DictionaryGraph build_dictionary_graph(
    std::span<const std::pair<std::string, std::string>> pairs, const Vocabulary& vocab);

/// Keeps only edges whose endpoints carry different language tags. Throws
/// DataError when the vocabulary is untagged or an edge endpoint lacks a tag.
WordGraph restrict_cross_lingual(const WordGraph& graph, const Vocabulary& vocab);

struct GraphIssue {
  std::size_t line = 0;
  std::string message;
};

/// Line-level checks on an edge-list file: negative or non-finite weights,
/// pairs listed in both orientations with different weights, and (when
/// `vocab` is given) unknown tokens.
std::vector<GraphIssue> check_edge_lines(std::span<const EdgeLine> lines,
                                         const Vocabulary* vocab = nullptr);

struct GraphStats {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t connected_vertices = 0;
  double total_weight = 0.0;
  /// neighbor count -> number of vertices with that many neighbors
  std::map<std::size_t, std::size_t> degree_histogram;
  /// Fraction of edges joining different languages; absent without tags.
  std::optional<double> cross_lingual_fraction;
};

GraphStats graph_stats(const WordGraph& graph, const Vocabulary& vocab);

}  // namespace wrlda
