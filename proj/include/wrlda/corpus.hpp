#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace wrlda {

using WordId = std::uint32_t;

/// Dense bijection between tokens and ids 0..V-1, with optional language tags.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Builds "w0", "w1", ... placeholders for id-only corpora.
  static Vocabulary placeholder(std::size_t size);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  /// Returns the id of `token`, inserting it if new.
  WordId add(std::string_view token);
  std::optional<WordId> find(std::string_view token) const;
  const std::string& token(WordId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  /// True when at least one token carries a language tag.
  bool has_languages() const noexcept;
  /// Empty string when the token is untagged.
  const std::string& language(WordId id) const;
  void set_language(WordId id, std::string lang);

  /// Same tokens in the same order with the same tags.
  bool operator==(const Vocabulary& other) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::string> langs_;  // empty, or one entry per token
  std::unordered_map<std::string, WordId> index_;
};

/// Bag of words: parallel arrays of distinct word ids (ascending) and counts.
struct Document {
  std::vector<WordId> ids;
  std::vector<std::uint32_t> counts;
  std::optional<int> label;
  std::optional<int> pair;
  /// Position of the document in the file it was loaded from.
  std::size_t source_index = 0;

  std::size_t unique_words() const noexcept { return ids.size(); }
  std::size_t length() const noexcept;

  bool operator==(const Document&) const = default;
};

/// Builds a Document from (id, count) pairs, merging duplicate ids.
Document make_document(std::vector<std::pair<WordId, std::uint32_t>> entries);

class Corpus {
 public:
  Corpus() = default;
  Corpus(Vocabulary vocab, std::vector<Document> docs);

  const Vocabulary& vocab() const noexcept { return vocab_; }
  Vocabulary& vocab() noexcept { return vocab_; }
  const std::vector<Document>& docs() const noexcept { return docs_; }
  const Document& doc(std::size_t d) const { return docs_.at(d); }
  std::size_t num_docs() const noexcept { return docs_.size(); }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  std::size_t total_tokens() const noexcept;

  /// Throws ValidationError if any id >= V, any count is zero, or any
  /// document is empty.
  void validate() const;

  bool operator==(const Corpus&) const = default;

 private:
  Vocabulary vocab_;
  std::vector<Document> docs_;
};

enum class CorpusFormat { bow, token_lines };

CorpusFormat parse_corpus_format(std::string_view name);

/// bow: header "M V", then M lines of "id:count ..." with optional
/// "#label=<int>" and "#pair=<int>" annotations.
/// token-lines: one document per line, whitespace-separated tokens; the same
/// annotations are accepted; blank lines are skipped.
///
/// When `vocab` is given it is authoritative: bow requires V == vocab size,
/// token-lines rejects unknown tokens.
Corpus read_corpus(std::istream& in, CorpusFormat format, const Vocabulary* vocab = nullptr);
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const Vocabulary* vocab = nullptr);

/// One token per line, optionally followed by a tab and a language tag.
Vocabulary load_vocabulary(const std::filesystem::path& path);

/// "token<TAB>lang" per line.
std::unordered_map<std::string, std::string> load_language_tags(const std::filesystem::path& path);
/// Tags every vocabulary token found in `tags`; returns how many were tagged.
std::size_t apply_language_tags(Vocabulary& vocab,
                                const std::unordered_map<std::string, std::string>& tags);

/// One token per line; blank lines ignored.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// How the upper frequency bound is counted.
enum class FrequencyMode {
  occurrences,  // total corpus count of the token
  documents,    // number of distinct documents containing it
};

struct PreprocessOptions {
  std::unordered_set<std::string> stopwords;
  std::size_t min_count = 0;
  double max_doc_frac = 1.0;
  FrequencyMode upper_mode = FrequencyMode::documents;
};

struct PreprocessResult {
  Corpus corpus;
  /// source_index of every document dropped for becoming empty.
  std::vector<std::size_t> dropped_docs;
};

/// Removes stopwords, tokens with total count < min_count, and tokens whose
/// frequency (per `upper_mode`) exceeds max_doc_frac * M; reindexes the
/// vocabulary in original order and drops emptied documents. Filtering is
/// repeated until stable, since dropping documents lowers M.
PreprocessResult preprocess(const Corpus& corpus, const PreprocessOptions& options);

}  // namespace wrlda
