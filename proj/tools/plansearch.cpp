// Copyright 2026 The plansearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// plansearch command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime error.

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "plansearch/chunking.hpp"
#include "plansearch/config.hpp"
#include "plansearch/core.hpp"
#include "plansearch/curation.hpp"
#include "plansearch/error.hpp"
#include "plansearch/eval.hpp"
#include "plansearch/generator.hpp"
#include "plansearch/indexing.hpp"
#include "plansearch/io.hpp"
#include "plansearch/keywords.hpp"
#include "plansearch/search.hpp"
#include "plansearch/service.hpp"
#include "plansearch/synthetic.hpp"
#include "plansearch/training.hpp"

namespace fs = std::filesystem;
using namespace plansearch;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

SearchService* g_service = nullptr;

void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return;
  }
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << contents;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

/// Options shared by every subcommand, filled before the command runs.
struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  AppConfig config;
};

IndexBuildConfig build_config(const AppConfig& cfg) { return IndexBuildConfig{cfg.chunking, cfg.keywords}; }

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string docs;
  std::string out;
};

void run_ingest(const Globals&, const IngestArgs& a) {
  const auto docs = load_documents(a.docs);
  std::ostringstream s;
  for (const auto& doc : docs) {
    nlohmann::json j{{"id", doc.doc_id}, {"title", doc.title}, {"text", doc.text}, {"metadata", doc.metadata}};
    s << j.dump() << '\n';
  }
  write_text(a.out, s.str());
  std::cerr << "ingested " << docs.size() << " documents\n";
}

// ---- index ----------------------------------------------------------------

struct IndexArgs {
  std::string docs;
  std::string out;
  std::string index;
};

void run_index_build(const Globals& g, const IndexArgs& a) {
  const auto docs = load_documents(a.docs);
  const auto embedder = make_embedder(g.config.embedding);
  const KeywordExtractor extractor(*embedder, stopwords_for(g.config.keywords), g.config.keywords.mmr_lambda);
  const Index index = build_index(docs, build_config(g.config), *embedder, extractor);
  save_index(index, a.out);
  std::cerr << "indexed " << docs.size() << " documents into " << index.size() << " chunks (dims "
            << index.dims() << ")\n";
}

void run_index_info(const Globals&, const IndexArgs& a) {
  load_index(a.index);
  std::cout << read_text((fs::path(a.index) / "manifest.json").string());
}

// ---- search ---------------------------------------------------------------

struct SearchArgs {
  std::string index;
  std::optional<std::size_t> x;
  std::optional<double> alpha;
  std::size_t top = 5;
  bool json = false;
  std::string query;
};

void run_search(const Globals& g, const SearchArgs& a) {
  SearchConfig cfg = g.config.search;
  if (a.x) cfg.x = *a.x;
  if (a.alpha) cfg.alpha = *a.alpha;
  cfg.validate();
  const Index index = load_index(a.index);
  const auto embedder = make_embedder(g.config.embedding);
  const KeywordExtractor extractor(*embedder, stopwords_for(g.config.keywords), g.config.keywords.mmr_lambda);
  std::unique_ptr<CrossScorer> scorer;
  if (cfg.rerank == RerankMode::kExternal) {
    scorer = std::make_unique<HttpCrossScorer>(cfg.scorer_endpoint, cfg.scorer_timeout_ms);
  }
  const auto response = hierarchical_search(a.query, index, cfg, *embedder, extractor, scorer.get());
  if (response.degraded) std::cerr << "warning: reranker unavailable (" << response.degraded_reason << ")\n";
  const std::size_t n = std::min(a.top, response.results.size());
  if (a.json) {
    for (std::size_t i = 0; i < n; ++i) std::cout << scored_chunk_to_json(response.results[i], i + 1).dump() << '\n';
    return;
  }
  std::printf("%-4s  %-40s  %8s  %8s  %8s  %7s  %8s\n", "rank", "chunk_id", "final", "semantic", "keyword",
              "overlap", "cross");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = response.results[i];
    std::printf("%-4zu  %-40s  %8.4f  %8.4f  %8.4f  %7zu  %8.4f\n", i + 1, r.chunk.chunk_id.c_str(), r.final_score,
                r.semantic_score, r.keyword_score, r.overlap_count, r.cross_score);
  }
}

// ---- keywords ---------------------------------------------------------------

struct KeywordArgs {
  std::optional<std::size_t> k;
  std::optional<double> mmr_lambda;
  bool json = false;
  std::string file;
};

void run_keywords(const Globals& g, const KeywordArgs& a) {
  const std::size_t k = a.k.value_or(g.config.keywords.k);
  const double lambda = a.mmr_lambda.value_or(g.config.keywords.mmr_lambda);
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::kConfig, "--mmr-lambda must lie in [0, 1]");
  const auto embedder = make_embedder(g.config.embedding);
  const auto keywords = extract_keywords(read_text(a.file), *embedder, k, lambda, stopwords_for(g.config.keywords));
  if (a.json) {
    std::cout << nlohmann::json{{"keywords", keywords.keywords}}.dump() << '\n';
    return;
  }
  for (const auto& kw : keywords.keywords) std::cout << kw << '\n';
}

// ---- make-pairs -------------------------------------------------------------

struct PairArgs {
  std::string texts;
  std::string strategy = "dropout";
  double probability = 0.1;
  bool stub_generator = false;
  std::string out;
};

void run_make_pairs(const Globals& g, const PairArgs& a) {
  PerturbationConfig strategy;
  const std::map<std::string, PerturbationKind> kinds{{"dropout", PerturbationKind::kDropout},
                                                     {"swap", PerturbationKind::kSwap},
                                                     {"rewrite", PerturbationKind::kRewrite},
                                                     {"explain", PerturbationKind::kExplain}};
  strategy.kind = kinds.at(a.strategy);
  strategy.probability = a.probability;
  std::unique_ptr<TextGenerator> generator;
  if (strategy.kind == PerturbationKind::kRewrite || strategy.kind == PerturbationKind::kExplain) {
    if (a.stub_generator) {
      generator = std::make_unique<StubGenerator>();
    } else if (!g.config.curation.generator_endpoint.empty()) {
      generator = std::make_unique<HttpGenerator>(g.config.curation.generator_endpoint,
                                                  g.config.curation.generator_timeout_ms);
    } else {
      fail(ErrorCode::kConfig, "curation.generator_endpoint or --stub-generator is required for " + a.strategy);
    }
    strategy.generator = generator.get();
  }
  const auto result = generate_positive_pairs(read_lines(a.texts), strategy, g.config.training.seed);
  std::ostringstream s;
  for (const auto& p : result.pairs) {
    s << nlohmann::json{{"query", p.query}, {"positive", p.positive}, {"negatives", p.hard_negatives}}.dump() << '\n';
  }
  write_text(a.out, s.str());
  std::cerr << "pairs " << result.pairs.size() << ", skipped " << result.skipped << "\n";
}

// ---- train-emb --------------------------------------------------------------

struct TrainArgs {
  std::string pairs;
  std::string init_head;
  std::string out;
};

void run_train(const Globals& g, const TrainArgs& a) {
  if (g.config.embedding.provider == "projected") {
    fail(ErrorCode::kConfig, "embedding.provider must name the base encoder when training a head");
  }
  const auto pairs = load_training_pairs(a.pairs);
  if (pairs.empty()) fail(ErrorCode::kInput, a.pairs + " holds no training pairs");
  const auto base = make_embedder(g.config.embedding);
  const ProjectionHead frozen = a.init_head.empty() ? ProjectionHead::identity(base->dims()) : load_head(a.init_head);
  const auto result = train(pairs, *base, frozen, g.config.training, [](std::size_t epoch, double mean_loss) {
    std::cout << nlohmann::json{{"epoch", epoch}, {"mean_loss", mean_loss}}.dump() << std::endl;
  });
  save_head(result.head, a.out);
}

// ---- curate -----------------------------------------------------------------

struct CurateArgs {
  std::string docs;
  std::string out;
  std::string report;
  bool stub_generator = false;
};

void run_curate(const Globals& g, const CurateArgs& a) {
  const auto docs = load_documents(a.docs);
  const auto embedder = make_embedder(g.config.embedding);
  std::unique_ptr<TextGenerator> generator;
  if (a.stub_generator) {
    generator = std::make_unique<StubGenerator>();
  } else if (!g.config.curation.generator_endpoint.empty()) {
    generator = std::make_unique<HttpGenerator>(g.config.curation.generator_endpoint,
                                                g.config.curation.generator_timeout_ms);
  } else {
    fail(ErrorCode::kConfig, "curation.generator_endpoint is not set; pass --stub-generator for offline runs");
  }
  const auto result = run_pipeline(docs, g.config.curation.pipeline, *generator, *embedder);
  write_text(a.out, records_to_jsonl(result.records));
  const std::string report = result.report.to_json().dump(2) + "\n";
  std::cerr << report;
  std::string report_path = a.report;
  if (report_path.empty()) {
    const fs::path out_dir = a.out.empty() || a.out == "-" ? fs::path(".") : fs::path(a.out).parent_path();
    report_path = (out_dir / "report.json").string();
  }
  write_text(report_path, report);
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string index;
  std::string queries;
  std::string judgments;
  std::string head;
  std::string pairs;
  std::string out;
  std::string kind = "keyword";
  bool json = false;
};

void run_eval_ablation(const Globals& g, const EvalArgs& a) {
  if (g.config.embedding.provider == "projected") {
    fail(ErrorCode::kConfig, "embedding.provider must name the base encoder; pass the head with --head");
  }
  const Index index = load_index(a.index);
  AblationInputs inputs;
  inputs.base = make_embedder(g.config.embedding);
  inputs.base_index = &index;
  if (!a.head.empty()) inputs.head = load_head(a.head);
  const KeywordExtractor extractor(*inputs.base, stopwords_for(g.config.keywords), g.config.keywords.mmr_lambda);
  inputs.extractor = &extractor;
  inputs.search = g.config.search;
  const auto report = run_ablation(inputs, load_queries(a.queries), load_judgments(a.judgments), g.config.eval.variants);
  std::cout << report.to_table();
  if (!a.out.empty()) write_text(a.out, report.to_json().dump(2) + "\n");
}

void run_eval_sts(const Globals& g, const EvalArgs& a) {
  if (g.config.embedding.provider == "projected" && !a.head.empty()) {
    fail(ErrorCode::kConfig, "pass either a projected provider or --head, not both");
  }
  std::shared_ptr<const EmbeddingProvider> embedder = make_embedder(g.config.embedding);
  if (!a.head.empty()) embedder = std::make_shared<ProjectedEmbedder>(embedder, load_head(a.head));
  const double rho = sts_spearman(load_sts_pairs(a.pairs), *embedder);
  if (a.json) {
    std::cout << nlohmann::json{{"spearman", rho}}.dump() << '\n';
  } else {
    std::printf("spearman %.6f\n", rho);
  }
}

void run_eval_make_suite(const Globals& g, const EvalArgs& a) {
  fs::create_directories(a.out);
  const fs::path dir(a.out);
  if (a.kind == "sts") {
    StsSuiteConfig cfg;
    if (g.seed) cfg.seed = *g.seed;
    const auto suite = make_sts_suite(cfg);
    write_training_pairs(suite.train, (dir / "train.jsonl").string());
    write_sts_pairs(suite.test, (dir / "test.jsonl").string());
    std::cerr << "wrote " << suite.train.size() << " training pairs and " << suite.test.size() << " test pairs\n";
    return;
  }
  RetrievalSuite suite;
  if (a.kind == "keyword") {
    KeywordSuiteConfig cfg;
    if (g.seed) cfg.seed = *g.seed;
    suite = make_keyword_suite(cfg);
  } else if (a.kind == "semantic") {
    SemanticSuiteConfig cfg;
    if (g.seed) cfg.seed = *g.seed;
    suite = make_semantic_suite(cfg);
  } else {
    fail(ErrorCode::kConfig, "--kind must be keyword, semantic or sts");
  }
  const auto embedder = make_embedder(g.config.embedding);
  const KeywordExtractor extractor(*embedder, stopwords_for(g.config.keywords), g.config.keywords.mmr_lambda);
  const Index index = build_index(suite.docs, build_config(g.config), *embedder, extractor);
  save_index(index, (dir / "index").string());
  write_documents_jsonl(suite.docs, (dir / "docs.jsonl").string());
  write_queries(suite.plain_queries(), (dir / "queries.jsonl").string());
  write_judgments(resolve_judgments(index, suite.queries), (dir / "judgments.jsonl").string());
  std::cerr << "wrote " << suite.docs.size() << " documents, " << suite.queries.size() << " queries, "
            << index.size() << " chunks\n";
}

// ---- serve ------------------------------------------------------------------

struct ServeArgs {
  std::string index;
  std::optional<int> port;
  std::optional<std::string> host;
};

void run_serve(const Globals& g, const ServeArgs& a) {
  const Index index = load_index(a.index);
  SearchService service(index, make_embedder(g.config.embedding), stopwords_for(g.config.keywords),
                        g.config.keywords.mmr_lambda, g.config.search, g.config.serve.default_top);
  const std::string host = a.host.value_or(g.config.serve.host);
  const int port = service.bind(host, a.port.value_or(g.config.serve.port));
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving " << index.size() << " chunks on http://" << host << ":" << port << "\n";
  service.run();
  g_service = nullptr;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kVersionMismatch:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plansearch: chunking, keyword extraction, hierarchical search, head training and data curation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "TOML config file (default: $PLANSEARCH_CONFIG)");
  app.add_option("--seed", g.seed, "Seed for every seeded stage; overrides the config");

  std::function<void()> command;

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Normalize a document directory or JSON-lines file");
  ingest_cmd->add_option("--docs", ingest.docs, "Directory of .txt/.md files or documents .jsonl")->required();
  ingest_cmd->add_option("--out", ingest.out, "Output documents .jsonl (default: stdout)");
  ingest_cmd->callback([&] { command = [&] { run_ingest(g, ingest); }; });

  IndexArgs index_args;
  auto* index_cmd = app.add_subcommand("index", "Build or inspect an index");
  index_cmd->require_subcommand(1);
  auto* build_cmd = index_cmd->add_subcommand("build", "Chunk, embed and extract keywords");
  build_cmd->add_option("--docs", index_args.docs, "Document directory or .jsonl")->required();
  build_cmd->add_option("--out", index_args.out, "Index directory")->required();
  build_cmd->callback([&] { command = [&] { run_index_build(g, index_args); }; });
  auto* info_cmd = index_cmd->add_subcommand("info", "Validate an index and print its manifest");
  info_cmd->add_option("--index", index_args.index, "Index directory")->required();
  info_cmd->callback([&] { command = [&] { run_index_info(g, index_args); }; });

  SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Hierarchical search over an index");
  search_cmd->add_option("--index", search.index, "Index directory")->required();
  search_cmd->add_option("--x", search.x, "Total recall budget");
  search_cmd->add_option("--alpha", search.alpha, "Cross-score weight in [0, 1]");
  search_cmd->add_option("--top", search.top, "Results to print")->check(CLI::PositiveNumber);
  search_cmd->add_flag("--json", search.json, "One JSON object per result");
  search_cmd->add_option("query", search.query, "Query text")->required();
  search_cmd->callback([&] { command = [&] { run_search(g, search); }; });

  KeywordArgs keywords;
  auto* keywords_cmd = app.add_subcommand("keywords", "Keyword extraction");
  keywords_cmd->require_subcommand(1);
  auto* extract_cmd = keywords_cmd->add_subcommand("extract", "Extract keywords from a text file");
  extract_cmd->add_option("--k", keywords.k, "Number of keywords");
  extract_cmd->add_option("--mmr-lambda", keywords.mmr_lambda, "Relevance weight in [0, 1]");
  extract_cmd->add_flag("--json", keywords.json, "Print {\"keywords\": [...]}");
  extract_cmd->add_option("file", keywords.file, "Text file, or - for stdin")->required();
  extract_cmd->callback([&] { command = [&] { run_keywords(g, keywords); }; });

  PairArgs pairs;
  auto* pairs_cmd = app.add_subcommand("make-pairs", "Build positive training pairs by perturbation");
  pairs_cmd->add_option("--texts", pairs.texts, "One text per line")->required();
  pairs_cmd->add_option("--strategy", pairs.strategy, "dropout, swap, rewrite or explain")
      ->check(CLI::IsMember({"dropout", "swap", "rewrite", "explain"}));
  pairs_cmd->add_option("--p", pairs.probability, "Per-unit probability")->check(CLI::Range(0.0, 1.0));
  pairs_cmd->add_flag("--stub-generator", pairs.stub_generator, "Deterministic offline generator");
  pairs_cmd->add_option("--out", pairs.out, "Output pairs .jsonl (default: stdout)");
  pairs_cmd->callback([&] { command = [&] { run_make_pairs(g, pairs); }; });

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train-emb", "Train a projection head; prints {\"epoch\",\"mean_loss\"} lines");
  train_cmd->add_option("--pairs", train_args.pairs, "Training pairs .jsonl")->required();
  train_cmd->add_option("--init-head", train_args.init_head, "Frozen starting head (default: identity)");
  train_cmd->add_option("--out", train_args.out, "Output head .json")->required();
  train_cmd->callback([&] { command = [&] { run_train(g, train_args); }; });

  CurateArgs curate;
  auto* curate_cmd = app.add_subcommand("curate", "Run the instruction-data curation pipeline");
  curate_cmd->add_option("--docs", curate.docs, "Document directory or .jsonl")->required();
  curate_cmd->add_option("--out", curate.out, "Output records .jsonl")->required();
  curate_cmd->add_option("--report", curate.report, "Run report path (default: report.json beside --out)");
  curate_cmd->add_flag("--stub-generator", curate.stub_generator, "Deterministic offline generator");
  curate_cmd->callback([&] { command = [&] { run_curate(g, curate); }; });

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Retrieval and embedding evaluation");
  eval_cmd->require_subcommand(1);
  auto* ablation_cmd = eval_cmd->add_subcommand("ablation", "score@1/score@5 for each search variant");
  ablation_cmd->add_option("--index", eval_args.index, "Index built with the base embedder")->required();
  ablation_cmd->add_option("--queries", eval_args.queries, "Queries .jsonl")->required();
  ablation_cmd->add_option("--judgments", eval_args.judgments, "Judgments .jsonl")->required();
  ablation_cmd->add_option("--head", eval_args.head, "Fine-tuned head .json");
  ablation_cmd->add_option("--out", eval_args.out, "Report .json");
  ablation_cmd->callback([&] { command = [&] { run_eval_ablation(g, eval_args); }; });
  auto* sts_cmd = eval_cmd->add_subcommand("sts", "Spearman of cosine scores against labels");
  sts_cmd->add_option("--pairs", eval_args.pairs, "STS pairs .jsonl")->required();
  sts_cmd->add_option("--head", eval_args.head, "Head .json applied on top of the base embedder");
  sts_cmd->add_flag("--json", eval_args.json, "Print {\"spearman\": r}");
  sts_cmd->callback([&] { command = [&] { run_eval_sts(g, eval_args); }; });
  auto* suite_cmd = eval_cmd->add_subcommand("make-suite", "Write a seeded synthetic benchmark");
  suite_cmd->add_option("--kind", eval_args.kind, "keyword, semantic or sts")
      ->check(CLI::IsMember({"keyword", "semantic", "sts"}));
  suite_cmd->add_option("--out", eval_args.out, "Output directory")->required();
  suite_cmd->callback([&] { command = [&] { run_eval_make_suite(g, eval_args); }; });

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP service with GET /health and POST /search");
  serve_cmd->add_option("--index", serve.index, "Index directory")->required();
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->callback([&] { command = [&] { run_serve(g, serve); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    g.config = resolve_config(g.config_path);
    if (g.seed) g.config.set_seed(*g.seed);
    command();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
