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

#pragma once

/// \file config.hpp
/// \brief Unified TOML configuration for the command-line tool and service.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plansearch/chunking.hpp"
#include "plansearch/curation.hpp"
#include "plansearch/embedding.hpp"
#include "plansearch/eval.hpp"
#include "plansearch/keywords.hpp"
#include "plansearch/search.hpp"
#include "plansearch/training.hpp"

namespace plansearch {

struct EmbeddingSettings {
  std::string provider = "hash";  // hash | remote | projected
  std::size_t dims = 256;
  std::string endpoint;           // remote provider base URL
  std::string head_path;          // projected provider head file
  std::string base_provider = "hash";  // base under a projected provider: hash | remote
  int timeout_ms = 5000;
  int retries = 3;
};

struct CurationSettings {
  CurationConfig pipeline;
  std::string generator_endpoint;  // empty: stub generator
  int generator_timeout_ms = 30000;
};

struct EvalSettings {
  std::vector<AblationVariant> variants{AblationVariant::kSemanticOnly, AblationVariant::kSemanticHead,
                                        AblationVariant::kFull};
};

struct ServeSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t default_top = 5;
};

struct AppConfig {
  EmbeddingSettings embedding;
  ChunkingConfig chunking;
  KeywordConfig keywords;
  SearchConfig search;
  TrainConfig training;
  CurationSettings curation;
  EvalSettings eval;
  ServeSettings serve;

  /// Cross-field checks. Throws kConfig naming the offending key.
  void validate() const;
  /// Applies one seed to every seeded stage.
  void set_seed(std::uint64_t seed);
};

/// Parses TOML text. Unknown sections or keys, wrong types and invalid values
/// raise kConfig with the dotted key path.
AppConfig parse_config(const std::string& toml_text, const std::string& source_name = "<config>");
AppConfig load_config(const std::string& path);

/// Loads `path` when non-empty, else $PLANSEARCH_CONFIG when set, else defaults.
AppConfig resolve_config(const std::string& path);

/// Builds the embedder selected by [embedding].
std::shared_ptr<const EmbeddingProvider> make_embedder(const EmbeddingSettings& settings);

/// Bundled lists, or the file named by `keywords.stopwords_path`.
StopwordList stopwords_for(const KeywordConfig& keywords);

}  // namespace plansearch
