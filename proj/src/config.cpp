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

#include "plansearch/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "plansearch/error.hpp"

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace plansearch {
namespace {

/// Reads typed values out of one TOML table and rejects keys nobody asked for.
class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  std::string path(std::string_view key) const { return name_ + "." + std::string(key); }

  const toml::node* find(std::string_view key) {
    if (table_ == nullptr) return nullptr;
    seen_.emplace(key);
    return table_->get(key);
  }

  void read(std::string_view key, std::string& out) {
    if (const auto* node = find(key)) {
      const auto v = node->value<std::string>();
      if (!v || !node->is_string()) type_error(key, "a string");
      out = *v;
    }
  }

  void read(std::string_view key, double& out) {
    if (const auto* node = find(key)) {
      if (!node->is_number()) type_error(key, "a number");
      out = *node->value<double>();
      if (!std::isfinite(out)) fail(ErrorCode::kConfig, path(key) + " must be finite");
    }
  }

  void read(std::string_view key, std::int64_t& out) {
    if (const auto* node = find(key)) {
      if (!node->is_integer()) type_error(key, "an integer");
      out = *node->value<std::int64_t>();
    }
  }

  void read(std::string_view key, std::size_t& out) {
    std::int64_t v = static_cast<std::int64_t>(out);
    read(key, v);
    if (v < 0) fail(ErrorCode::kConfig, path(key) + " must not be negative");
    out = static_cast<std::size_t>(v);
  }

  void read(std::string_view key, int& out) {
    std::int64_t v = out;
    read(key, v);
    if (v < 0 || v > 1'000'000'000) fail(ErrorCode::kConfig, path(key) + " is out of range");
    out = static_cast<int>(v);
  }

  void read(std::string_view key, std::vector<std::string>& out) {
    if (const auto* node = find(key)) {
      const auto* array = node->as_array();
      if (array == nullptr) type_error(key, "an array of strings");
      out.clear();
      for (const auto& item : *array) {
        const auto v = item.value<std::string>();
        if (!v || !item.is_string()) type_error(key, "an array of strings");
        out.push_back(*v);
      }
    }
  }

  void read(std::string_view key, std::vector<std::size_t>& out) {
    if (const auto* node = find(key)) {
      const auto* array = node->as_array();
      if (array == nullptr) type_error(key, "an array of integers");
      out.clear();
      for (const auto& item : *array) {
        if (!item.is_integer() || *item.value<std::int64_t>() < 0) type_error(key, "an array of non-negative integers");
        out.push_back(static_cast<std::size_t>(*item.value<std::int64_t>()));
      }
    }
  }

  /// Reads a string and maps it through `choices`.
  template <typename T>
  void choose(std::string_view key, T& out, const std::map<std::string, T>& choices) {
    std::string name;
    if (find(key) == nullptr) return;
    read(key, name);
    const auto it = choices.find(name);
    if (it == choices.end()) {
      std::string allowed;
      for (const auto& [k, _] : choices) allowed += (allowed.empty() ? "" : ", ") + k;
      fail(ErrorCode::kConfig, path(key) + ": unknown value \"" + name + "\" (expected one of " + allowed + ")");
    }
    out = it->second;
  }

  void reject_unknown() const {
    if (table_ == nullptr) return;
    for (const auto& [key, _] : *table_) {
      if (!seen_.count(std::string(key.str()))) fail(ErrorCode::kConfig, "unknown key " + path(key.str()));
    }
  }

 private:
  [[noreturn]] void type_error(std::string_view key, const char* expected) const {
    fail(ErrorCode::kConfig, path(key) + " must be " + expected);
  }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> seen_;
};

void read_embedding(Section s, EmbeddingSettings& e) {
  s.read("provider", e.provider);
  s.read("dims", e.dims);
  s.read("endpoint", e.endpoint);
  s.read("head_path", e.head_path);
  s.read("base_provider", e.base_provider);
  s.read("timeout_ms", e.timeout_ms);
  s.read("retries", e.retries);
  s.reject_unknown();
}

void read_chunking(Section s, ChunkingConfig& c) {
  s.read("window_sizes", c.window_sizes);
  s.read("overlap", c.overlap);
  s.reject_unknown();
}

void read_keywords(Section s, KeywordConfig& k) {
  s.read("k", k.k);
  s.read("query_k", k.query_k);
  s.read("mmr_lambda", k.mmr_lambda);
  s.read("stopwords_path", k.stopwords_path);
  s.reject_unknown();
}

void read_search(Section s, SearchConfig& c) {
  s.read("x", c.x);
  s.read("alpha", c.alpha);
  s.choose<RerankMode>("rerank", c.rerank,
                       {{"late-interaction", RerankMode::kLateInteraction},
                        {"none", RerankMode::kNone},
                        {"external", RerankMode::kExternal}});
  s.choose<KeywordSimilarityMode>("keyword_similarity", c.keyword_mode,
                                  {{"jaccard", KeywordSimilarityMode::kJaccard}, {"soft", KeywordSimilarityMode::kSoft}});
  s.read("scorer_endpoint", c.scorer_endpoint);
  s.read("scorer_timeout_ms", c.scorer_timeout_ms);
  s.read("max_concurrency", c.max_concurrency);
  s.reject_unknown();
}

void read_training(Section s, TrainConfig& t) {
  s.read("tau", t.tau);
  s.read("lambda", t.lambda);
  s.read("learning_rate", t.learning_rate);
  s.read("epochs", t.epochs);
  s.read("batch_size", t.batch_size);
  s.read("seed", t.seed);
  s.choose<OptimizerKind>("optimizer", t.optimizer, {{"sgd", OptimizerKind::kSgd}, {"adam", OptimizerKind::kAdam}});
  s.read("adam_beta1", t.adam_beta1);
  s.read("adam_beta2", t.adam_beta2);
  s.read("adam_epsilon", t.adam_epsilon);
  s.reject_unknown();
}

void read_curation(Section s, CurationSettings& c) {
  auto& p = c.pipeline;
  s.read("min_length", p.quality.min_length);
  s.read("max_length", p.quality.max_length);
  s.read("length_falloff", p.quality.falloff);
  s.read("length_weight", p.quality.length_weight);
  s.read("alnum_weight", p.quality.alnum_weight);
  s.read("repetition_weight", p.quality.repetition_weight);
  s.choose<SelectionMode>("selection", p.selection.mode,
                          {{"threshold", SelectionMode::kThreshold}, {"top-fraction", SelectionMode::kTopFraction}});
  s.read("selection_value", p.selection.value);
  s.read("dimensions", p.taxonomy.dimensions);
  s.read("types", p.taxonomy.types);
  s.choose<ResponseMode>("response_mode", p.self_ask.response_mode,
                         {{"direct", ResponseMode::kDirect}, {"generated", ResponseMode::kGenerated}});
  s.read("instruction_template", p.self_ask.instruction_template);
  s.read("response_template", p.self_ask.response_template);
  s.read("reference_length", p.complexity.reference_length);
  s.read("reference_clauses", p.complexity.reference_clauses);
  s.read("dedup_threshold", p.dedup_threshold);
  s.read("min_quality", p.min_quality);
  s.read("min_complexity", p.min_complexity);
  s.read("k_center", p.k_center);
  s.read("sample_fraction", p.sample_fraction);
  s.read("seed", p.seed);
  s.read("generator_endpoint", c.generator_endpoint);
  s.read("generator_timeout_ms", c.generator_timeout_ms);
  s.reject_unknown();
}

void read_eval(Section s, EvalSettings& e) {
  std::vector<std::string> names;
  if (s.find("variants") != nullptr) {
    s.read("variants", names);
    e.variants.clear();
    for (const auto& name : names) {
      try {
        e.variants.push_back(parse_variant(name));
      } catch (const Error& err) {
        fail(ErrorCode::kConfig, s.path("variants") + ": " + err.what());
      }
    }
  }
  s.reject_unknown();
}

void read_serve(Section s, ServeSettings& v) {
  s.read("host", v.host);
  s.read("port", v.port);
  s.read("default_top", v.default_top);
  s.reject_unknown();
}

}  // namespace

void AppConfig::validate() const {
  const std::set<std::string> providers{"hash", "remote", "projected"};
  if (!providers.count(embedding.provider)) {
    fail(ErrorCode::kConfig, "embedding.provider must be one of hash, remote, projected");
  }
  if (embedding.base_provider != "hash" && embedding.base_provider != "remote") {
    fail(ErrorCode::kConfig, "embedding.base_provider must be hash or remote");
  }
  if (embedding.dims == 0) fail(ErrorCode::kConfig, "embedding.dims must be positive");
  const bool needs_endpoint =
      embedding.provider == "remote" || (embedding.provider == "projected" && embedding.base_provider == "remote");
  if (needs_endpoint && embedding.endpoint.empty()) {
    fail(ErrorCode::kConfig, "embedding.endpoint is required for a remote embedder");
  }
  if (embedding.provider == "projected" && embedding.head_path.empty()) {
    fail(ErrorCode::kConfig, "embedding.head_path is required for the projected provider");
  }
  chunking.validate();
  if (keywords.k < 1) fail(ErrorCode::kConfig, "keywords.k must be at least 1");
  if (keywords.query_k < 1) fail(ErrorCode::kConfig, "keywords.query_k must be at least 1");
  if (!(keywords.mmr_lambda >= 0.0 && keywords.mmr_lambda <= 1.0)) {
    fail(ErrorCode::kConfig, "keywords.mmr_lambda must lie in [0, 1]");
  }
  if (search.query_k != keywords.query_k) {
    fail(ErrorCode::kConfig, "search query keyword count disagrees with keywords.query_k");
  }
  search.validate();
  training.validate();
  curation.pipeline.validate();
  if (curation.pipeline.selection.mode == SelectionMode::kTopFraction &&
      !(curation.pipeline.selection.value > 0.0 && curation.pipeline.selection.value <= 1.0)) {
    fail(ErrorCode::kConfig, "curation.selection_value must lie in (0, 1] for top-fraction selection");
  }
  if (eval.variants.empty()) fail(ErrorCode::kConfig, "eval.variants must not be empty");
  if (serve.port < 0 || serve.port > 65535) fail(ErrorCode::kConfig, "serve.port must lie in [0, 65535]");
  if (serve.default_top < 1) fail(ErrorCode::kConfig, "serve.default_top must be at least 1");
}

void AppConfig::set_seed(std::uint64_t seed) {
  training.seed = seed;
  curation.pipeline.seed = seed;
}

AppConfig parse_config(const std::string& toml_text, const std::string& source_name) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& err) {
    std::ostringstream message;
    message << source_name << ":" << err.source().begin.line << ":" << err.source().begin.column << ": "
            << err.description();
    fail(ErrorCode::kConfig, message.str());
  }

  AppConfig cfg;
  using Reader = std::function<void(Section)>;
  const std::map<std::string, Reader> readers{
      {"embedding", [&](Section s) { read_embedding(std::move(s), cfg.embedding); }},
      {"chunking", [&](Section s) { read_chunking(std::move(s), cfg.chunking); }},
      {"keywords", [&](Section s) { read_keywords(std::move(s), cfg.keywords); }},
      {"search", [&](Section s) { read_search(std::move(s), cfg.search); }},
      {"training", [&](Section s) { read_training(std::move(s), cfg.training); }},
      {"curation", [&](Section s) { read_curation(std::move(s), cfg.curation); }},
      {"eval", [&](Section s) { read_eval(std::move(s), cfg.eval); }},
      {"serve", [&](Section s) { read_serve(std::move(s), cfg.serve); }},
  };
  for (const auto& [key, node] : root) {
    const std::string name(key.str());
    const auto it = readers.find(name);
    if (it == readers.end()) fail(ErrorCode::kConfig, "unknown section " + name);
    if (!node.is_table()) fail(ErrorCode::kConfig, name + " must be a table");
  }
  for (const auto& [name, reader] : readers) reader(Section(root[name].as_table(), name));

  cfg.search.query_k = cfg.keywords.query_k;
  cfg.curation.pipeline.chunking = cfg.chunking;
  cfg.validate();
  return cfg;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kConfig, "cannot read config file " + path);
  std::ostringstream contents;
  contents << in.rdbuf();
  return parse_config(contents.str(), path);
}

AppConfig resolve_config(const std::string& path) {
  if (!path.empty()) return load_config(path);
  if (const char* env = std::getenv("PLANSEARCH_CONFIG"); env != nullptr && *env != '\0') return load_config(env);
  AppConfig cfg;
  cfg.validate();
  return cfg;
}

std::shared_ptr<const EmbeddingProvider> make_embedder(const EmbeddingSettings& settings) {
  auto make_base = [&](const std::string& kind) -> std::shared_ptr<const EmbeddingProvider> {
    if (kind == "hash") return std::make_shared<HashEmbedder>(settings.dims);
    RemoteEmbedderOptions options;
    options.endpoint = settings.endpoint;
    options.dims = settings.dims;
    options.timeout_ms = settings.timeout_ms;
    options.max_retries = settings.retries;
    return std::make_shared<RemoteEmbedder>(options);
  };
  if (settings.provider != "projected") return make_base(settings.provider);
  auto head = load_head(settings.head_path);
  if (head.d_in != settings.dims) {
    fail(ErrorCode::kConfig, "head input width " + std::to_string(head.d_in) + " does not match embedding.dims " +
                                 std::to_string(settings.dims));
  }
  return std::make_shared<ProjectedEmbedder>(make_base(settings.base_provider), std::move(head));
}

StopwordList stopwords_for(const KeywordConfig& keywords) {
  if (keywords.stopwords_path.empty()) return default_stopwords();
  return load_stopwords(keywords.stopwords_path);
}

}  // namespace plansearch
