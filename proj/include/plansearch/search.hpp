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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "plansearch/core.hpp"
#include "plansearch/embedding.hpp"
#include "plansearch/indexing.hpp"
#include "plansearch/keywords.hpp"

namespace plansearch {

enum class RerankMode { kLateInteraction, kNone, kExternal };

struct SearchConfig {
  std::size_t x = 10;  // total recall budget: ceil(x/2) by keywords, floor(x/2) by vector
  double alpha = 0.5;  // weight of the cross score against keyword overlap
  RerankMode rerank = RerankMode::kLateInteraction;
  std::size_t query_k = 5;
  KeywordSimilarityMode keyword_mode = KeywordSimilarityMode::kJaccard;
  std::string scorer_endpoint;
  int scorer_timeout_ms = 5000;
  std::size_t max_concurrency = 4;

  void validate() const;
};

/// Reranking model reached over the network.
class CrossScorer {
 public:
  virtual ~CrossScorer() = default;
  virtual double score(std::string_view query, const Chunk& chunk) = 0;
};

/// POST {endpoint}/score {"query","text"} -> {"score"}.
class HttpCrossScorer final : public CrossScorer {
 public:
  explicit HttpCrossScorer(std::string endpoint, int timeout_ms = 5000, int max_retries = 1);
  double score(std::string_view query, const Chunk& chunk) override;

 private:
  std::string endpoint_;
  int timeout_ms_;
  int max_retries_;
};

/// Mean over query tokens of the best cosine similarity between that token's
/// embedding and any token embedding of `text`. 0 when either side has no
/// tokens.
double late_interaction_score(std::string_view query, std::string_view text,
                              const EmbeddingProvider& embedder);

/// Cross score of one chunk. kNone returns the query/chunk cosine similarity;
/// kExternal needs `external` and raises kRerank on failure.
double cross_score(std::string_view query, const Chunk& chunk, const EmbeddingProvider& embedder,
                   RerankMode mode, CrossScorer* external = nullptr);

struct SearchResponse {
  std::vector<ScoredChunk> results;
  /// Set when the external reranker failed and cosine scores stood in.
  bool degraded = false;
  std::string degraded_reason;
};

/// Dual recall (keywords and vectors), keyword-overlap counting and
/// cross-score reranking:
///
///   final = alpha * cross / max(cross) + (1 - alpha) * overlap / max(overlap)
///
/// with negative cross scores floored at 0 and a term dropped when its
/// maximum over the candidates is 0. Results are sorted by final score, then
/// semantic score, then chunk_id, and are not truncated.
SearchResponse hierarchical_search(std::string_view query, const Index& index, const SearchConfig& cfg,
                                   const EmbeddingProvider& embedder, const KeywordExtractor& extractor,
                                   CrossScorer* external = nullptr);

/// Vector-only ranking of the whole index as ScoredChunks (semantic scores;
/// final_score mirrors the semantic score).
std::vector<ScoredChunk> semantic_search(std::string_view query, const Index& index, std::size_t k,
                                         const EmbeddingProvider& embedder);

}  // namespace plansearch
