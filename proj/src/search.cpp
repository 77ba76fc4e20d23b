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

#include "plansearch/search.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "http_client.hpp"
#include "plansearch/error.hpp"
#include "plansearch/text.hpp"

namespace plansearch {
namespace {

class TokenEmbeddings {
 public:
  explicit TokenEmbeddings(const EmbeddingProvider& embedder) : embedder_(embedder) {}

  const Embedding& get(const std::string& token) {
    auto it = cache_.find(token);
    if (it == cache_.end()) it = cache_.emplace(token, embedder_.embed(token)).first;
    return it->second;
  }

 private:
  const EmbeddingProvider& embedder_;
  std::unordered_map<std::string, Embedding> cache_;
};

double late_interaction(const std::vector<std::string>& query_tokens,
                        const std::vector<std::string>& text_tokens, TokenEmbeddings& cache) {
  if (query_tokens.empty() || text_tokens.empty()) return 0.0;
  double total = 0.0;
  for (const auto& q : query_tokens) {
    const Embedding& qe = cache.get(q);
    double best = -1.0;
    for (const auto& t : text_tokens) best = std::max(best, cosine_sim(qe, cache.get(t)));
    total += best;
  }
  return total / static_cast<double>(query_tokens.size());
}

}  // namespace

void SearchConfig::validate() const {
  if (x < 1) fail(ErrorCode::kConfig, "search.x must be at least 1");
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) fail(ErrorCode::kConfig, "search.alpha must lie in [0, 1]");
  if (query_k < 1) fail(ErrorCode::kConfig, "keywords.query_k must be at least 1");
  if (max_concurrency < 1) fail(ErrorCode::kConfig, "search.max_concurrency must be at least 1");
  if (rerank == RerankMode::kExternal && scorer_endpoint.empty()) {
    fail(ErrorCode::kConfig, "search.scorer_endpoint is required for external reranking");
  }
}

HttpCrossScorer::HttpCrossScorer(std::string endpoint, int timeout_ms, int max_retries)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms), max_retries_(max_retries) {}

double HttpCrossScorer::score(std::string_view query, const Chunk& chunk) {
  nlohmann::json reply;
  try {
    reply = detail::post_json(endpoint_, "/score", nlohmann::json{{"query", query}, {"text", chunk.text}},
                              detail::HttpOptions{timeout_ms_, max_retries_, 50});
  } catch (const Error& e) {
    fail(ErrorCode::kRerank, std::string("external scorer failed: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("score") || !reply.at("score").is_number()) {
    fail(ErrorCode::kRerank, "external scorer reply lacks a numeric \"score\"");
  }
  const double value = reply.at("score").get<double>();
  if (!std::isfinite(value)) fail(ErrorCode::kRerank, "external scorer returned a non-finite score");
  return value;
}

double late_interaction_score(std::string_view query, std::string_view text,
                              const EmbeddingProvider& embedder) {
  TokenEmbeddings cache(embedder);
  return late_interaction(token_strings(query), token_strings(text), cache);
}

double cross_score(std::string_view query, const Chunk& chunk, const EmbeddingProvider& embedder,
                   RerankMode mode, CrossScorer* external) {
  switch (mode) {
    case RerankMode::kLateInteraction:
      return late_interaction_score(query, chunk.text, embedder);
    case RerankMode::kNone:
      return cosine_sim(embedder.embed(query), embedder.embed(chunk.text));
    case RerankMode::kExternal:
      if (external == nullptr) fail(ErrorCode::kRerank, "no external scorer configured");
      return external->score(query, chunk);
  }
  fail(ErrorCode::kConfig, "unknown rerank mode");
}

SearchResponse hierarchical_search(std::string_view query, const Index& index, const SearchConfig& cfg,
                                   const EmbeddingProvider& embedder, const KeywordExtractor& extractor,
                                   CrossScorer* external) {
  cfg.validate();
  check_fingerprint(index, embedder);
  if (index.size() == 0) fail(ErrorCode::kInput, "index is empty");
  if (canonical_text(query).empty()) fail(ErrorCode::kInput, "query is empty");

  const Embedding s = embedder.embed(query);
  const KeywordSet keywords = extractor.extract(query, cfg.query_k);

  const std::size_t keyword_budget = (cfg.x + 1) / 2;
  const std::size_t vector_budget = cfg.x / 2;
  std::vector<std::size_t> rows;
  std::vector<bool> seen(index.size(), false);
  auto add = [&](const std::vector<Hit>& hits) {
    for (const auto& hit : hits) {
      if (!seen[hit.row]) {
        seen[hit.row] = true;
        rows.push_back(hit.row);
      }
    }
  };
  add(top_k_keyword(index, keywords, keyword_budget, cfg.keyword_mode, &embedder));
  if (vector_budget > 0) add(top_k_semantic(index, s, vector_budget));

  SearchResponse response;
  response.results.reserve(rows.size());
  for (std::size_t row : rows) {
    ScoredChunk sc;
    sc.chunk = index.chunk(row);
    sc.semantic_score = row_cosine(index, row, s);
    const KeywordSet& chunk_keywords = index.keywords(row);
    sc.keyword_score = cfg.keyword_mode == KeywordSimilarityMode::kSoft
                           ? soft_keyword_similarity(keywords, chunk_keywords, embedder)
                           : keyword_set_similarity(keywords, chunk_keywords);
    for (const auto& kw : keywords.keywords) sc.overlap_count += chunk_keywords.contains(kw) ? 1 : 0;
    response.results.push_back(std::move(sc));
  }

  switch (cfg.rerank) {
    case RerankMode::kLateInteraction: {
      TokenEmbeddings cache(embedder);
      const auto query_tokens = token_strings(query);
      for (auto& sc : response.results) {
        sc.cross_score = late_interaction(query_tokens, token_strings(sc.chunk.text), cache);
      }
      break;
    }
    case RerankMode::kNone:
      for (auto& sc : response.results) sc.cross_score = sc.semantic_score;
      break;
    case RerankMode::kExternal: {
      std::unique_ptr<CrossScorer> owned;
      if (external == nullptr) {
        owned = std::make_unique<HttpCrossScorer>(cfg.scorer_endpoint, cfg.scorer_timeout_ms);
        external = owned.get();
      }
      try {
        std::vector<double> scores;
        for (const auto& sc : response.results) scores.push_back(external->score(query, sc.chunk));
        for (std::size_t i = 0; i < scores.size(); ++i) response.results[i].cross_score = scores[i];
      } catch (const Error& e) {
        response.degraded = true;
        response.degraded_reason = e.what();
        for (auto& sc : response.results) sc.cross_score = sc.semantic_score;
      }
      break;
    }
  }

  double max_cross = 0.0;
  std::size_t max_overlap = 0;
  for (const auto& sc : response.results) {
    max_cross = std::max(max_cross, sc.cross_score);
    max_overlap = std::max(max_overlap, sc.overlap_count);
  }
  for (auto& sc : response.results) {
    const double cross_term = max_cross > 0.0 ? std::max(sc.cross_score, 0.0) / max_cross : 0.0;
    const double overlap_term =
        max_overlap > 0 ? static_cast<double>(sc.overlap_count) / static_cast<double>(max_overlap) : 0.0;
    sc.final_score = cfg.alpha * cross_term + (1.0 - cfg.alpha) * overlap_term;
  }

  std::sort(response.results.begin(), response.results.end(),
            [](const ScoredChunk& a, const ScoredChunk& b) {
              if (a.final_score != b.final_score) return a.final_score > b.final_score;
              if (a.semantic_score != b.semantic_score) return a.semantic_score > b.semantic_score;
              return a.chunk.chunk_id < b.chunk.chunk_id;
            });
  return response;
}

std::vector<ScoredChunk> semantic_search(std::string_view query, const Index& index, std::size_t k,
                                         const EmbeddingProvider& embedder) {
  check_fingerprint(index, embedder);
  if (canonical_text(query).empty()) fail(ErrorCode::kInput, "query is empty");
  std::vector<ScoredChunk> out;
  for (const auto& hit : top_k_semantic(index, embedder.embed(query), k)) {
    ScoredChunk sc;
    sc.chunk = index.chunk(hit.row);
    sc.semantic_score = hit.score;
    sc.cross_score = hit.score;
    sc.final_score = hit.score;
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace plansearch
