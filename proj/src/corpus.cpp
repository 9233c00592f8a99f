#include "wrlda/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "wrlda/errors.hpp"

namespace wrlda {

namespace {

const std::string kNoLanguage;

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int>
bool parse_int(std::string_view text, Int& value) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Returns true and fills the document field if `field` is an annotation.
bool parse_annotation(std::string_view field, Document& doc, std::size_t line_no) {
  if (field.empty() || field.front() != '#') return false;
  auto assign = [&](std::string_view prefix, std::optional<int>& target) {
    if (field.substr(0, prefix.size()) != prefix) return false;
    int value = 0;
    if (!parse_int(field.substr(prefix.size()), value)) {
      throw ParseError("bad annotation '" + std::string(field) + "'", line_no);
    }
    target = value;
    return true;
  };
  if (assign("#label=", doc.label) || assign("#pair=", doc.pair)) return true;
  throw ParseError("unknown annotation '" + std::string(field) + "'", line_no);
}

Corpus read_bow(std::istream& in, const Vocabulary* vocab) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t num_docs = 0;
  std::size_t vocab_size = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 2 || !parse_int(fields[0], num_docs) ||
        !parse_int(fields[1], vocab_size)) {
      throw ParseError("expected header 'M V'", line_no);
    }
    have_header = true;
    break;
  }
  if (!have_header || num_docs == 0) throw DataError("no documents");
  if (vocab != nullptr && vocab->size() != vocab_size) {
    throw ValidationError("header V=" + std::to_string(vocab_size) +
                          " does not match vocabulary size " + std::to_string(vocab->size()));
  }

  std::vector<Document> docs;
  docs.reserve(num_docs);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (docs.size() == num_docs) {
      throw ParseError("more document lines than declared M=" + std::to_string(num_docs), line_no);
    }
    Document annotations;
    std::vector<std::pair<WordId, std::uint32_t>> entries;
    for (auto field : split_whitespace(line)) {
      if (parse_annotation(field, annotations, line_no)) continue;
      auto colon = field.find(':');
      WordId id = 0;
      std::uint32_t count = 0;
      if (colon == std::string_view::npos || !parse_int(field.substr(0, colon), id) ||
          !parse_int(field.substr(colon + 1), count)) {
        throw ParseError("expected 'wordId:count', got '" + std::string(field) + "'", line_no);
      }
      if (count == 0) throw ParseError("count must be positive", line_no);
      if (id >= vocab_size) {
        throw ValidationError("line " + std::to_string(line_no) + ": word id " +
                              std::to_string(id) + " out of range [0, " +
                              std::to_string(vocab_size) + ")");
      }
      entries.emplace_back(id, count);
    }
    if (entries.empty()) throw ParseError("empty document", line_no);
    Document doc = make_document(std::move(entries));
    doc.label = annotations.label;
    doc.pair = annotations.pair;
    doc.source_index = docs.size();
    docs.push_back(std::move(doc));
  }
  if (docs.size() != num_docs) {
    throw ParseError("expected " + std::to_string(num_docs) + " documents, found " +
                         std::to_string(docs.size()),
                     line_no);
  }
  return Corpus(vocab != nullptr ? *vocab : Vocabulary::placeholder(vocab_size), std::move(docs));
}

Corpus read_token_lines(std::istream& in, const Vocabulary* fixed) {
  Vocabulary vocab = fixed != nullptr ? *fixed : Vocabulary{};
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    Document annotations;
    std::map<WordId, std::uint32_t> counts;
    for (auto field : fields) {
      if (parse_annotation(field, annotations, line_no)) continue;
      WordId id = 0;
      if (fixed != nullptr) {
        auto found = vocab.find(field);
        if (!found) {
          throw ValidationError("line " + std::to_string(line_no) + ": unknown token '" +
                                std::string(field) + "'");
        }
        id = *found;
      } else {
        id = vocab.add(field);
      }
      ++counts[id];
    }
    if (counts.empty()) throw ParseError("document has annotations but no tokens", line_no);
    Document doc = make_document({counts.begin(), counts.end()});
    doc.label = annotations.label;
    doc.pair = annotations.pair;
    doc.source_index = docs.size();
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw DataError("no documents");
  return Corpus(std::move(vocab), std::move(docs));
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Vocabulary Vocabulary::placeholder(std::size_t size) {
  Vocabulary vocab;
  for (std::size_t i = 0; i < size; ++i) vocab.add("w" + std::to_string(i));
  return vocab;
}

WordId Vocabulary::add(std::string_view token) {
  auto [it, inserted] = index_.try_emplace(std::string(token), static_cast<WordId>(tokens_.size()));
  if (inserted) {
    tokens_.emplace_back(token);
    if (!langs_.empty()) langs_.emplace_back();
  }
  return it->second;
}

std::optional<WordId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::operator==(const Vocabulary& other) const {
  if (tokens_ != other.tokens_) return false;
  for (WordId id = 0; id < tokens_.size(); ++id) {
    if (language(id) != other.language(id)) return false;
  }
  return true;
}

bool Vocabulary::has_languages() const noexcept {
  return std::any_of(langs_.begin(), langs_.end(), [](const auto& l) { return !l.empty(); });
}

const std::string& Vocabulary::language(WordId id) const {
  if (id >= tokens_.size()) throw std::out_of_range("word id out of range");
  return langs_.empty() ? kNoLanguage : langs_[id];
}

void Vocabulary::set_language(WordId id, std::string lang) {
  if (id >= tokens_.size()) throw std::out_of_range("word id out of range");
  if (langs_.empty()) langs_.resize(tokens_.size());
  langs_[id] = std::move(lang);
}

std::size_t Document::length() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Document make_document(std::vector<std::pair<WordId, std::uint32_t>> entries) {
  std::sort(entries.begin(), entries.end());
  Document doc;
  for (const auto& [id, count] : entries) {
    if (!doc.ids.empty() && doc.ids.back() == id) {
      doc.counts.back() += count;
    } else {
      doc.ids.push_back(id);
      doc.counts.push_back(count);
    }
  }
  return doc;
}

Corpus::Corpus(Vocabulary vocab, std::vector<Document> docs)
    : vocab_(std::move(vocab)), docs_(std::move(docs)) {}

std::size_t Corpus::total_tokens() const noexcept {
  std::size_t total = 0;
  for (const auto& d : docs_) total += d.length();
  return total;
}

void Corpus::validate() const {
  const auto v = vocab_.size();
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const auto& doc = docs_[d];
    if (doc.ids.size() != doc.counts.size()) {
      throw ValidationError("document " + std::to_string(d) + ": ids/counts length mismatch");
    }
    if (doc.ids.empty()) throw ValidationError("document " + std::to_string(d) + " is empty");
    for (std::size_t i = 0; i < doc.ids.size(); ++i) {
      if (doc.ids[i] >= v) {
        throw ValidationError("document " + std::to_string(d) + ": word id " +
                              std::to_string(doc.ids[i]) + " >= V=" + std::to_string(v));
      }
      if (doc.counts[i] == 0) {
        throw ValidationError("document " + std::to_string(d) + ": zero count");
      }
      if (i > 0 && doc.ids[i] <= doc.ids[i - 1]) {
        throw ValidationError("document " + std::to_string(d) + ": ids not strictly ascending");
      }
    }
  }
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "bow") return CorpusFormat::bow;
  if (name == "token-lines" || name == "tokens") return CorpusFormat::token_lines;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

Corpus read_corpus(std::istream& in, CorpusFormat format, const Vocabulary* vocab) {
  return format == CorpusFormat::bow ? read_bow(in, vocab) : read_token_lines(in, vocab);
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const Vocabulary* vocab) {
  auto in = open_input(path);
  return read_corpus(in, format, vocab);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  auto in = open_input(path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string_view view = line;
    auto tab = view.find('\t');
    auto token = trim(view.substr(0, tab));
    if (vocab.find(token)) throw ParseError("duplicate token '" + std::string(token) + "'", line_no);
    WordId id = vocab.add(token);
    if (tab != std::string_view::npos) {
      auto lang = trim(view.substr(tab + 1));
      if (!lang.empty()) vocab.set_language(id, std::string(lang));
    }
  }
  return vocab;
}

std::unordered_map<std::string, std::string> load_language_tags(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::unordered_map<std::string, std::string> tags;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string_view view = line;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected 'token<TAB>lang'", line_no);
    tags[std::string(trim(view.substr(0, tab)))] = std::string(trim(view.substr(tab + 1)));
  }
  return tags;
}

std::size_t apply_language_tags(Vocabulary& vocab,
                                const std::unordered_map<std::string, std::string>& tags) {
  std::size_t tagged = 0;
  for (WordId id = 0; id < vocab.size(); ++id) {
    auto it = tags.find(vocab.token(id));
    if (it == tags.end()) continue;
    vocab.set_language(id, it->second);
    ++tagged;
  }
  return tagged;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto token = trim(line);
    if (!token.empty()) words.emplace(token);
  }
  return words;
}

PreprocessResult preprocess(const Corpus& corpus, const PreprocessOptions& options) {
  if (!(options.max_doc_frac > 0.0 && options.max_doc_frac <= 1.0)) {
    throw ConfigError("max_doc_frac must be in (0, 1]");
  }
  const auto& vocab = corpus.vocab();
  const std::size_t v = vocab.size();

  // Stopwords and the lower bound do not depend on M; the upper bound does.
  std::vector<std::size_t> occurrences(v, 0);
  std::vector<std::size_t> doc_freq(v, 0);
  for (const auto& doc : corpus.docs()) {
    for (std::size_t i = 0; i < doc.ids.size(); ++i) {
      occurrences[doc.ids[i]] += doc.counts[i];
      ++doc_freq[doc.ids[i]];
    }
  }
  const auto& upper_stat =
      options.upper_mode == FrequencyMode::occurrences ? occurrences : doc_freq;

  std::vector<bool> keep(v);
  for (WordId w = 0; w < v; ++w) {
    keep[w] = occurrences[w] >= options.min_count && !options.stopwords.contains(vocab.token(w));
  }

  // Dropping emptied documents lowers M and can push more tokens over the
  // upper bound; iterate to a fixed point.
  std::vector<bool> doc_alive(corpus.num_docs(), true);
  for (;;) {
    const auto alive = static_cast<double>(std::count(doc_alive.begin(), doc_alive.end(), true));
    const double upper = options.max_doc_frac * alive;
    for (WordId w = 0; w < v; ++w) {
      if (keep[w] && static_cast<double>(upper_stat[w]) > upper) keep[w] = false;
    }
    bool changed = false;
    for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
      if (!doc_alive[d]) continue;
      const auto& ids = corpus.doc(d).ids;
      if (std::none_of(ids.begin(), ids.end(), [&](WordId w) { return keep[w]; })) {
        doc_alive[d] = false;
        changed = true;
      }
    }
    if (!changed) break;
  }

  Vocabulary reduced;
  std::vector<WordId> remap(v, 0);
  for (WordId w = 0; w < v; ++w) {
    if (!keep[w]) continue;
    remap[w] = reduced.add(vocab.token(w));
    if (!vocab.language(w).empty()) reduced.set_language(remap[w], vocab.language(w));
  }

  PreprocessResult result;
  std::vector<Document> docs;
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    const auto& doc = corpus.doc(d);
    if (!doc_alive[d]) {
      result.dropped_docs.push_back(doc.source_index);
      continue;
    }
    Document out;
    out.label = doc.label;
    out.pair = doc.pair;
    out.source_index = doc.source_index;
    for (std::size_t i = 0; i < doc.ids.size(); ++i) {
      if (!keep[doc.ids[i]]) continue;
      out.ids.push_back(remap[doc.ids[i]]);
      out.counts.push_back(doc.counts[i]);
    }
    docs.push_back(std::move(out));
  }
  if (docs.empty()) throw DataError("all documents are empty after filtering");
  result.corpus = Corpus(std::move(reduced), std::move(docs));
  return result;
}

}  // namespace wrlda
