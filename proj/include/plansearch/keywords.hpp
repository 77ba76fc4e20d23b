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
#include <utility>
#include <vector>

#include "plansearch/embedding.hpp"
#include "plansearch/text.hpp"

namespace plansearch {

/// Normalized keywords in extraction order, without duplicates.
struct KeywordSet {
  std::vector<std::string> keywords;

  bool empty() const noexcept { return keywords.empty(); }
  std::size_t size() const noexcept { return keywords.size(); }
  bool contains(std::string_view keyword) const;

  friend bool operator==(const KeywordSet&, const KeywordSet&) = default;
};

/// Normalizes each entry and drops empties and later duplicates.
KeywordSet make_keyword_set(const std::vector<std::string>& raw);

struct KeywordConfig {
  std::size_t k = 8;        // keywords per chunk
  std::size_t query_k = 5;  // keywords per query
  double mmr_lambda = 0.5;
  std::string stopwords_path;  // empty: bundled English + Chinese lists
};

/// Unique unigram and bigram candidates in byte order. Stopwords are removed;
/// bigrams join two adjacent, distinct, non-stopword tokens.
std::vector<std::string> keyword_candidates(std::string_view text, const StopwordList& stopwords);

/// Scores each candidate by cosine similarity to the whole text and picks up
/// to k of them by maximal marginal relevance. The first pick is the most
/// relevant candidate; each later pick maximizes
///   lambda * relevance - (1 - lambda) * max similarity to the picks so far.
/// Ties go to the byte-wise smaller candidate.
KeywordSet extract_keywords(std::string_view text, const EmbeddingProvider& embedder,
                            std::size_t k, double mmr_lambda,
                            const StopwordList& stopwords = default_stopwords());

/// Bundles an embedder, stopword list and MMR settings.
class KeywordExtractor {
 public:
  KeywordExtractor(const EmbeddingProvider& embedder, StopwordList stopwords, double mmr_lambda)
      : embedder_(embedder), stopwords_(std::move(stopwords)), mmr_lambda_(mmr_lambda) {}

  KeywordSet extract(std::string_view text, std::size_t k) const {
    return extract_keywords(text, embedder_, k, mmr_lambda_, stopwords_);
  }

  const EmbeddingProvider& embedder() const noexcept { return embedder_; }

 private:
  const EmbeddingProvider& embedder_;
  StopwordList stopwords_;
  double mmr_lambda_;
};

enum class KeywordSimilarityMode { kJaccard, kSoft };

/// Jaccard index |a ∩ b| / |a ∪ b|; 0 when both are empty.
double keyword_set_similarity(const KeywordSet& a, const KeywordSet& b);

/// Mean over keywords of `a` of the best cosine similarity (floored at 0) to
/// any keyword of `b`. 0 when either set is empty.
double soft_keyword_similarity(const KeywordSet& a, const KeywordSet& b,
                               const EmbeddingProvider& embedder);

}  // namespace plansearch
