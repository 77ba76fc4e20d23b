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

/// \file service.hpp
/// \brief Minimal HTTP query service over one immutable index.
///
///   GET  /health  -> {"status":"ok","chunks":N,"dims":D}
///   POST /search  {"query", "x"?, "alpha"?, "top"?}
///              -> {"results":[{chunk_id, doc_id, text, scores...}], "degraded"}

#include <memory>
#include <string>

#include <json.hpp>

#include "plansearch/indexing.hpp"
#include "plansearch/keywords.hpp"
#include "plansearch/search.hpp"

namespace plansearch {

/// Scores of one result as a JSON object (no text), with its 1-based rank.
nlohmann::json scored_chunk_to_json(const ScoredChunk& hit, std::size_t rank);

class SearchService {
 public:
  SearchService(const Index& index, std::shared_ptr<const EmbeddingProvider> embedder, StopwordList stopwords,
                double mmr_lambda, SearchConfig defaults, std::size_t default_top);
  ~SearchService();

  /// Handles one /search body. Throws kInput on a malformed request.
  nlohmann::json search(const nlohmann::json& request) const;
  nlohmann::json health() const;

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void run();
  void stop();

 private:
  struct Server;
  const Index& index_;
  std::shared_ptr<const EmbeddingProvider> embedder_;
  KeywordExtractor extractor_;
  SearchConfig defaults_;
  std::size_t default_top_;
  std::unique_ptr<Server> server_;
};

}  // namespace plansearch
