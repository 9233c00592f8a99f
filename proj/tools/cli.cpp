#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wrlda/corpus.hpp"
#include "wrlda/errors.hpp"
#include "wrlda/eval.hpp"
#include "wrlda/graph.hpp"
#include "wrlda/lda.hpp"
#include "wrlda/model_io.hpp"
#include "wrlda/wr.hpp"

namespace wrlda::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct CorpusArgs {
  std::string path;
  std::string format = "bow";
  std::string vocab;
  std::string langs;
};

struct FitArgs {
  CorpusArgs corpus;
  std::string stopwords;
  std::size_t min_count = 0;
  double max_doc_frac = 1.0;
  std::string upper_count = "documents";
  std::string out_dir;
  std::size_t topics = 10;
  double lambda = 0.5;
  std::vector<double> weights;
  double rho = 0.5;
  double eta = 1e-8;
  std::uint64_t seed = 0;
  int max_iters = 200;
  double tol = 1e-6;
  double e_tol = 1e-5;
  int max_e_iters = 100;
  int max_smooth_iters = 50;
  std::string graph;
  bool cross_lingual_only = false;
  std::size_t workers = 1;
};

struct EvalArgs {
  std::string model;
  CorpusArgs corpus;
  std::string gamma;
  bool pairs = false;
  bool labels = false;
  std::string out;
  std::string details;
  double e_tol = 1e-5;
  int max_e_iters = 100;
};

struct TopicsArgs {
  std::string model;
  std::size_t n = 10;
  bool csv = false;
};

struct GraphArgs {
  std::string dict;
  std::string graph;
  std::string out;
  CorpusArgs vocab_source;
};

void add_corpus_options(CLI::App* app, CorpusArgs& args, bool required) {
  auto* opt = app->add_option("--corpus", args.path, "Corpus file");
  if (required) opt->required()->check(CLI::ExistingFile);
  app->add_option("--format", args.format, "Corpus format: bow or token-lines")
      ->check(CLI::IsMember({"bow", "token-lines", "tokens"}));
  app->add_option("--vocab", args.vocab, "Vocabulary file (token[<TAB>lang] per line)")
      ->check(CLI::ExistingFile);
  app->add_option("--langs", args.langs, "Language tags (token<TAB>lang per line)")
      ->check(CLI::ExistingFile);
}

Corpus load_corpus_args(const CorpusArgs& args) {
  const auto format = parse_corpus_format(args.format);
  Corpus corpus;
  if (!args.vocab.empty()) {
    const Vocabulary vocab = load_vocabulary(args.vocab);
    corpus = load_corpus(args.path, format, &vocab);
  } else {
    corpus = load_corpus(args.path, format);
  }
  if (!args.langs.empty()) apply_language_tags(corpus.vocab(), load_language_tags(args.langs));
  return corpus;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_gamma_csv(const fs::path& path, const Corpus& corpus, const Matrix& gamma) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "doc";
  for (Eigen::Index k = 0; k < gamma.cols(); ++k) out << ",gamma_" << k;
  out << '\n';
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    out << corpus.doc(d).source_index;
    for (Eigen::Index k = 0; k < gamma.cols(); ++k) {
      out << ',' << fmt_double(gamma(static_cast<Eigen::Index>(d), k));
    }
    out << '\n';
  }
}

// doc source index -> gamma row
std::map<std::size_t, std::vector<double>> read_gamma_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::map<std::size_t, std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line_no == 1) {
      if (cells.empty() || cells[0] != "doc") throw ParseError("expected gamma CSV header", 1);
      width = cells.size() - 1;
      continue;
    }
    if (cells.size() != width + 1) throw ParseError("wrong number of columns", line_no);
    try {
      std::vector<double> values;
      for (std::size_t i = 1; i < cells.size(); ++i) values.push_back(std::stod(cells[i]));
      rows[std::stoull(cells[0])] = std::move(values);
    } catch (const std::exception&) {
      throw ParseError("bad number in gamma CSV", line_no);
    }
  }
  if (rows.empty()) throw DataError("gamma CSV has no rows");
  return rows;
}

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json file_entry(const std::string& path) {
  if (path.empty()) return nullptr;
  return json{{"path", path}, {"sha256", sha256_file(path)}};
}

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  FitConfig config;
  config.num_topics = args.topics;
  if (!args.weights.empty()) {
    config.weights = ObjectiveWeights::raw(args.weights.at(0), args.weights.at(1));
  } else {
    config.weights = ObjectiveWeights::from_lambda(args.lambda);
  }
  config.rho = args.rho;
  config.eta = args.eta;
  config.seed = args.seed;
  config.max_em_iter = args.max_iters;
  config.em_tol = args.tol;
  config.e_tol = args.e_tol;
  config.max_e_iter = args.max_e_iters;
  config.max_smooth_iter = args.max_smooth_iters;
  config.workers = args.workers;
  config.validate();
  if (args.cross_lingual_only && args.graph.empty()) {
    throw ConfigError("--cross-lingual-only requires --graph");
  }
  if (args.upper_count != "documents" && args.upper_count != "occurrences") {
    throw ConfigError("--upper-count must be 'documents' or 'occurrences'");
  }

  Corpus corpus = load_corpus_args(args.corpus);
  std::vector<std::size_t> dropped;
  const bool filtering = !args.stopwords.empty() || args.min_count > 0 || args.max_doc_frac < 1.0;
  if (filtering) {
    PreprocessOptions options;
    if (!args.stopwords.empty()) options.stopwords = load_stopwords(args.stopwords);
    options.min_count = args.min_count;
    options.max_doc_frac = args.max_doc_frac;
    options.upper_mode = args.upper_count == "occurrences" ? FrequencyMode::occurrences
                                                           : FrequencyMode::documents;
    auto result = preprocess(corpus, options);
    corpus = std::move(result.corpus);
    dropped = std::move(result.dropped_docs);
    if (!dropped.empty()) {
      err << "warning: dropped " << dropped.size() << " documents emptied by filtering\n";
    }
  }

  WordGraph graph(corpus.vocab_size());
  if (!args.graph.empty()) {
    graph = load_graph(args.graph, corpus.vocab());
    if (args.cross_lingual_only) graph = restrict_cross_lingual(graph, corpus.vocab());
  }
  if (graph.empty() && config.weights.loss > 0.0) {
    err << "warning: empty graph: R≡0, fitting standard LDA\n";
  }
  const double load_ms = clock.lap_ms();

  FitResult result = fit(corpus, graph, config);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  const double fit_ms = clock.lap_ms();

  const fs::path dir = args.out_dir;
  fs::create_directories(dir);
  save_model(dir / "model.bin", result.params, corpus.vocab());
  write_gamma_csv(dir / "gamma.csv", corpus, result.state.gamma);
  {
    std::ofstream trace(dir / "trace.csv");
    if (!trace) throw DataError("cannot write trace");
    write_trace_csv(trace, result.trace);
  }
  const double write_ms = clock.lap_ms();

  json manifest;
  manifest["engine"] = "wrlda";
  manifest["version"] = kEngineVersion;
  manifest["created"] = now_iso8601();
  manifest["config"] = {
      {"topics", config.num_topics},
      {"likelihood_weight", config.weights.likelihood},
      {"loss_weight", config.weights.loss},
      {"rho", config.rho},
      {"eta", config.eta},
      {"em_tol", config.em_tol},
      {"e_tol", config.e_tol},
      {"max_em_iter", config.max_em_iter},
      {"max_e_iter", config.max_e_iter},
      {"max_smooth_iter", config.max_smooth_iter},
      {"workers", config.workers},
      {"format", args.corpus.format},
      {"min_count", args.min_count},
      {"max_doc_frac", args.max_doc_frac},
      {"upper_count", args.upper_count},
      {"cross_lingual_only", args.cross_lingual_only},
  };
  manifest["seed"] = config.seed;
  manifest["inputs"] = {
      {"corpus", file_entry(args.corpus.path)}, {"vocab", file_entry(args.corpus.vocab)},
      {"langs", file_entry(args.corpus.langs)}, {"stopwords", file_entry(args.stopwords)},
      {"graph", file_entry(args.graph)},
  };
  manifest["corpus"] = {{"documents", corpus.num_docs()},
                        {"vocabulary", corpus.vocab_size()},
                        {"tokens", corpus.total_tokens()},
                        {"dropped_documents", dropped},
                        {"graph_edges", graph.num_edges()}};
  manifest["result"] = {{"iterations", result.trace.size()},
                        {"converged", result.converged},
                        {"final_objective", result.trace.back().objective},
                        {"warnings", result.warnings}};
  manifest["timings_ms"] = {{"load", load_ms}, {"fit", fit_ms}, {"write", write_ms}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';

  out << "iterations: " << result.trace.size() << (result.converged ? " (converged)" : "")
      << "\nfinal O: " << fmt_double(result.trace.back().objective) << '\n';
  return kOk;
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  if (!args.pairs && !args.labels) throw ConfigError("choose --pairs and/or --labels");
  const StoredModel model = load_model(args.model);
  const auto format = parse_corpus_format(args.corpus.format);

  Corpus corpus;
  if (format == CorpusFormat::bow) {
    corpus = load_corpus(args.corpus.path, format, &model.vocab);
  } else {
    // Map tokens onto the model vocabulary; unknown tokens are ignored.
    Corpus raw = load_corpus(args.corpus.path, format);
    std::vector<Document> docs;
    std::size_t unknown = 0;
    for (const auto& doc : raw.docs()) {
      std::vector<std::pair<WordId, std::uint32_t>> entries;
      for (std::size_t i = 0; i < doc.ids.size(); ++i) {
        if (auto id = model.vocab.find(raw.vocab().token(doc.ids[i]))) {
          entries.emplace_back(*id, doc.counts[i]);
        } else {
          unknown += doc.counts[i];
        }
      }
      Document mapped = make_document(std::move(entries));
      mapped.label = doc.label;
      mapped.pair = doc.pair;
      mapped.source_index = doc.source_index;
      docs.push_back(std::move(mapped));
    }
    if (unknown > 0) err << "warning: ignored " << unknown << " tokens unknown to the model\n";
    corpus = Corpus(model.vocab, std::move(docs));
  }

  const auto k = static_cast<Eigen::Index>(model.params.num_topics());
  Matrix gamma(static_cast<Eigen::Index>(corpus.num_docs()), k);
  if (!args.gamma.empty()) {
    const auto rows = read_gamma_csv(args.gamma);
    for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
      auto it = rows.find(corpus.doc(d).source_index);
      if (it == rows.end()) {
        throw DataError("gamma CSV has no row for document " +
                        std::to_string(corpus.doc(d).source_index));
      }
      if (static_cast<Eigen::Index>(it->second.size()) != k) {
        throw DataError("gamma CSV width does not match the model");
      }
      for (Eigen::Index t = 0; t < k; ++t) gamma(static_cast<Eigen::Index>(d), t) = it->second[t];
    }
  } else {
    const Matrix lb = log_beta(model.params.beta);
    const EStepOptions options{args.e_tol, args.max_e_iters};
    for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
      auto post = e_step_doc(corpus.doc(d), model.params.alpha, lb, options, nullptr, d);
      gamma.row(static_cast<Eigen::Index>(d)) = post.gamma.transpose();
    }
  }
  const TopicProportions props = normalize_gamma(gamma);

  EvalReport report;
  if (args.pairs) {
    const auto pairs = document_pairs(corpus);
    report = pair_metrics(props, props, pairs);
    for (auto& d : report.details) {
      d.doc_a = corpus.doc(d.doc_a).source_index;
      d.doc_b = corpus.doc(d.doc_b).source_index;
    }
  }
  if (args.labels) {
    std::vector<int> labels;
    for (const auto& doc : corpus.docs()) {
      if (!doc.label) throw DataError("document " + std::to_string(doc.source_index) +
                                      " has no #label annotation");
      labels.push_back(*doc.label);
    }
    report.m_score = tune_metric_m(props, labels);
  }

  if (args.out.empty()) {
    write_report_json(out, report);
  } else {
    std::ofstream file(args.out);
    if (!file) throw DataError("cannot write '" + args.out + "'");
    write_report_json(file, report);
  }
  if (!args.details.empty()) {
    if (!args.pairs) throw ConfigError("--details requires --pairs");
    std::ofstream file(args.details);
    if (!file) throw DataError("cannot write '" + args.details + "'");
    write_pair_details_csv(file, report);
  }
  return kOk;
}

int cmd_topics(const TopicsArgs& args, std::ostream& out, std::ostream& err) {
  const StoredModel model = load_model(args.model);
  const auto& beta = model.params.beta;
  std::size_t n = args.n;
  if (n > model.vocab.size()) {
    err << "warning: --n " << n << " exceeds vocabulary size " << model.vocab.size()
        << "; clamping\n";
    n = model.vocab.size();
  }
  if (args.csv) out << "topic,rank,token,prob\n";
  const std::size_t label_width = std::to_string(model.params.num_topics() - 1).size();
  for (std::size_t k = 0; k < model.params.num_topics(); ++k) {
    const Vector row = beta.row(static_cast<Eigen::Index>(k)).transpose();
    const auto ids = top_indices({row.data(), static_cast<std::size_t>(row.size())}, n);
    if (args.csv) {
      for (std::size_t r = 0; r < ids.size(); ++r) {
        out << k << ',' << r + 1 << ',' << model.vocab.token(static_cast<WordId>(ids[r])) << ','
            << fmt_double(row[static_cast<Eigen::Index>(ids[r])]) << '\n';
      }
    } else {
      out << "topic " << std::setw(static_cast<int>(label_width)) << k << ':';
      for (auto id : ids) out << ' ' << model.vocab.token(static_cast<WordId>(id));
      out << '\n';
    }
  }
  return kOk;
}

Vocabulary vocabulary_for_graph(const CorpusArgs& source) {
  Vocabulary vocab;
  if (!source.path.empty()) {
    vocab = load_corpus_args(source).vocab();
  } else if (!source.vocab.empty()) {
    vocab = load_vocabulary(source.vocab);
    if (!source.langs.empty()) apply_language_tags(vocab, load_language_tags(source.langs));
  }
  return vocab;
}

int cmd_graph_build_dict(const GraphArgs& args, std::ostream& out, std::ostream& err) {
  const Vocabulary vocab = vocabulary_for_graph(args.vocab_source);
  if (vocab.empty()) throw ConfigError("build-dict needs --vocab or --corpus");
  const auto pairs = load_dictionary(args.dict);
  const auto built = build_dictionary_graph(pairs, vocab);
  if (built.skipped > 0) {
    err << "warning: skipped " << built.skipped << " dictionary pairs with unknown tokens\n";
  }
  std::ofstream file(args.out);
  if (!file) throw DataError("cannot write '" + args.out + "'");
  write_graph(file, built.graph, vocab);
  out << "edges: " << built.graph.num_edges() << "\nskipped: " << built.skipped << '\n';
  return kOk;
}

int cmd_graph_validate(const GraphArgs& args, std::ostream& out, std::ostream& err) {
  const Vocabulary vocab = vocabulary_for_graph(args.vocab_source);
  std::ifstream in(args.graph);
  if (!in) throw DataError("cannot open '" + args.graph + "'");
  const auto lines = read_edge_lines(in);
  const auto issues = check_edge_lines(lines, vocab.empty() ? nullptr : &vocab);
  if (!issues.empty()) {
    for (const auto& issue : issues) err << "line " << issue.line << ": " << issue.message << '\n';
    return kDataError;
  }
  Vocabulary graph_vocab = vocab;
  if (graph_vocab.empty()) {
    for (const auto& l : lines) {
      graph_vocab.add(l.first);
      graph_vocab.add(l.second);
    }
  }
  std::stringstream rewound;
  for (const auto& l : lines) rewound << l.first << '\t' << l.second << '\t' << fmt_double(l.weight) << '\n';
  const WordGraph graph = read_graph(rewound, graph_vocab);
  graph.validate();
  out << "ok: " << graph.num_edges() << " edges\n";
  return kOk;
}

int cmd_graph_stats(const GraphArgs& args, std::ostream& out) {
  Vocabulary vocab = vocabulary_for_graph(args.vocab_source);
  std::ifstream in(args.graph);
  if (!in) throw DataError("cannot open '" + args.graph + "'");
  const auto lines = read_edge_lines(in);
  if (vocab.empty()) {
    for (const auto& l : lines) {
      vocab.add(l.first);
      vocab.add(l.second);
    }
    if (!args.vocab_source.langs.empty()) {
      apply_language_tags(vocab, load_language_tags(args.vocab_source.langs));
    }
  }
  std::stringstream rewound;
  for (const auto& l : lines) rewound << l.first << '\t' << l.second << '\t' << fmt_double(l.weight) << '\n';
  const WordGraph graph = read_graph(rewound, vocab);
  const auto stats = graph_stats(graph, vocab);
  out << "vertices: " << stats.vertices << "\nedges: " << stats.edges
      << "\nconnected_vertices: " << stats.connected_vertices
      << "\ntotal_weight: " << fmt_double(stats.total_weight) << "\ncross_lingual_fraction: "
      << (stats.cross_lingual_fraction ? fmt_double(*stats.cross_lingual_fraction) : "n/a")
      << "\ndegree_histogram:";
  if (stats.degree_histogram.empty()) out << " none";
  out << '\n';
  for (const auto& [degree, count] : stats.degree_histogram) {
    out << "  " << degree << ": " << count << '\n';
  }
  return kOk;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"WR-LDA topic modeling engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kEngineVersion);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit LDA / WR-LDA on a corpus");
  add_corpus_options(fit_cmd, fit_args.corpus, true);
  fit_cmd->add_option("--stopwords", fit_args.stopwords, "Stopword file")->check(CLI::ExistingFile);
  fit_cmd->add_option("--min-count", fit_args.min_count, "Drop tokens rarer than this");
  fit_cmd->add_option("--max-doc-frac", fit_args.max_doc_frac,
                      "Drop tokens more frequent than this fraction of M");
  fit_cmd->add_option("--upper-count", fit_args.upper_count,
                      "Upper bound counts 'documents' or 'occurrences'");
  fit_cmd->add_option("--out", fit_args.out_dir, "Output directory")->required();
  fit_cmd->add_option("--topics", fit_args.topics, "Number of topics K");
  fit_cmd->add_option("--lambda", fit_args.lambda, "Likelihood/loss tradeoff in [0,1]");
  fit_cmd->add_option("--weights", fit_args.weights, "Raw weights WL WR for O = WL*L - WR*R")
      ->expected(2);
  fit_cmd->add_option("--rho", fit_args.rho, "Smoothing mix in [0,1]");
  fit_cmd->add_option("--eta", fit_args.eta, "Beta pseudocount");
  fit_cmd->add_option("--seed", fit_args.seed, "Seed for beta initialization");
  fit_cmd->add_option("--max-iters", fit_args.max_iters, "EM iteration cap");
  fit_cmd->add_option("--tol", fit_args.tol, "Relative objective change for convergence");
  fit_cmd->add_option("--e-tol", fit_args.e_tol, "E-step mean |delta gamma| tolerance");
  fit_cmd->add_option("--max-e-iters", fit_args.max_e_iters, "E-step iteration cap");
  fit_cmd->add_option("--max-smooth-iters", fit_args.max_smooth_iters, "Smoothing steps per M-step");
  fit_cmd->add_option("--graph", fit_args.graph, "Word graph edge list")->check(CLI::ExistingFile);
  fit_cmd->add_flag("--cross-lingual-only", fit_args.cross_lingual_only,
                    "Keep only edges between different languages");
  fit_cmd->add_option("--workers", fit_args.workers, "E-step threads (1 = deterministic)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a fitted model");
  eval_cmd->add_option("--model", eval_args.model, "Model file")->required()->check(CLI::ExistingFile);
  add_corpus_options(eval_cmd, eval_args.corpus, true);
  eval_cmd->add_option("--gamma", eval_args.gamma, "Use this gamma CSV instead of re-inferring")
      ->check(CLI::ExistingFile);
  eval_cmd->add_flag("--pairs", eval_args.pairs, "Paired-document metrics (L2-D, H-D, A-1, A-5)");
  eval_cmd->add_flag("--labels", eval_args.labels, "Label separation score M");
  eval_cmd->add_option("--out", eval_args.out, "Report path (default stdout)");
  eval_cmd->add_option("--details", eval_args.details, "Per-pair CSV path");
  eval_cmd->add_option("--e-tol", eval_args.e_tol, "E-step tolerance");
  eval_cmd->add_option("--max-e-iters", eval_args.max_e_iters, "E-step iteration cap");

  TopicsArgs topics_args;
  auto* topics_cmd = app.add_subcommand("topics", "Print top words per topic");
  topics_cmd->add_option("--model", topics_args.model, "Model file")->required()->check(CLI::ExistingFile);
  topics_cmd->add_option("-n,--n", topics_args.n, "Words per topic");
  topics_cmd->add_flag("--csv", topics_args.csv, "CSV output: topic,rank,token,prob");

  GraphArgs graph_args;
  auto* graph_cmd = app.add_subcommand("graph", "Build, validate or summarize word graphs");
  graph_cmd->require_subcommand(1);
  auto* build_cmd = graph_cmd->add_subcommand("build-dict", "Unit edges from a bilingual dictionary");
  build_cmd->add_option("--dict", graph_args.dict, "source<TAB>target per line")
      ->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--out", graph_args.out, "Output edge list")->required();
  add_corpus_options(build_cmd, graph_args.vocab_source, false);
  auto* validate_cmd = graph_cmd->add_subcommand("validate", "Check an edge list");
  validate_cmd->add_option("--graph", graph_args.graph, "Edge list")->required()->check(CLI::ExistingFile);
  add_corpus_options(validate_cmd, graph_args.vocab_source, false);
  auto* stats_cmd = graph_cmd->add_subcommand("stats", "Edge count, degree histogram, cross-lingual fraction");
  stats_cmd->add_option("--graph", graph_args.graph, "Edge list")->required()->check(CLI::ExistingFile);
  add_corpus_options(stats_cmd, graph_args.vocab_source, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_args, out, err);
    if (*eval_cmd) return cmd_eval(eval_args, out, err);
    if (*topics_cmd) return cmd_topics(topics_args, out, err);
    if (*build_cmd) return cmd_graph_build_dict(graph_args, out, err);
    if (*validate_cmd) return cmd_graph_validate(graph_args, out, err);
    if (*stats_cmd) return cmd_graph_stats(graph_args, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kConfigError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("wrlda");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data(), out, err);
}

}  // namespace wrlda::cli
