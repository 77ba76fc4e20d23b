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

#include "plansearch/keywords.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "plansearch/error.hpp"

namespace plansearch {

bool KeywordSet::contains(std::string_view keyword) const {
  return std::find(keywords.begin(), keywords.end(), keyword) != keywords.end();
}

KeywordSet make_keyword_set(const std::vector<std::string>& raw) {
  KeywordSet set;
  std::set<std::string> seen;
  for (const auto& entry : raw) {
    std::string normalized = normalize_text(entry);
    if (normalized.empty() || !seen.insert(normalized).second) continue;
    set.keywords.push_back(std::move(normalized));
  }
  return set;
}

std::vector<std::string> keyword_candidates(std::string_view text, const StopwordList& stopwords) {
  const std::vector<Token> tokens = tokenize(normalize_text(text));
  std::set<std::string> pool;
  auto is_stop = [&](const std::string& t) { return stopwords.count(t) > 0; };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& token = tokens[i];
    if (is_stop(token.text)) continue;
    pool.insert(token.text);
    if (i == 0 || !token.adjacent_to_prev) continue;
    const Token& prev = tokens[i - 1];
    if (is_stop(prev.text) || prev.text == token.text) continue;
    std::string bigram = join_bigram(prev, token);
    if (!is_stop(bigram)) pool.insert(std::move(bigram));
  }
  return {pool.begin(), pool.end()};
}

KeywordSet extract_keywords(std::string_view text, const EmbeddingProvider& embedder,
                            std::size_t k, double mmr_lambda, const StopwordList& stopwords) {
  if (k == 0) fail(ErrorCode::kInput, "keyword count k must be at least 1");
  if (text.empty()) fail(ErrorCode::kInput, "cannot extract keywords from empty text");
  if (!(mmr_lambda >= 0.0 && mmr_lambda <= 1.0)) {
    fail(ErrorCode::kInput, "mmr_lambda must lie in [0, 1]");
  }

  const std::vector<std::string> candidates = keyword_candidates(text, stopwords);
  if (candidates.empty()) return {};

  const Embedding doc = embedder.embed(text);
  const std::vector<Embedding> vectors = embedder.embed_batch(candidates);
  std::vector<double> relevance(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) relevance[i] = cosine_sim(vectors[i], doc);

  const std::size_t n = candidates.size();
  std::vector<bool> taken(n, false);
  // Highest similarity of each candidate to anything picked so far.
  std::vector<double> redundancy(n, -std::numeric_limits<double>::infinity());
  KeywordSet out;

  for (std::size_t round = 0; round < std::min(k, n); ++round) {
    std::size_t best = n;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double score = round == 0 ? relevance[i]
                                      : mmr_lambda * relevance[i] - (1.0 - mmr_lambda) * redundancy[i];
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    taken[best] = true;
    out.keywords.push_back(candidates[best]);
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) redundancy[i] = std::max(redundancy[i], cosine_sim(vectors[i], vectors[best]));
    }
  }
  return out;
}

double keyword_set_similarity(const KeywordSet& a, const KeywordSet& b) {
  const std::set<std::string> left(a.keywords.begin(), a.keywords.end());
  const std::set<std::string> right(b.keywords.begin(), b.keywords.end());
  if (left.empty() && right.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& kw : left) shared += right.count(kw);
  const std::size_t combined = left.size() + right.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(combined);
}

double soft_keyword_similarity(const KeywordSet& a, const KeywordSet& b,
                               const EmbeddingProvider& embedder) {
  if (a.empty() || b.empty()) return 0.0;
  const auto left = embedder.embed_batch(a.keywords);
  const auto right = embedder.embed_batch(b.keywords);
  double total = 0.0;
  for (const auto& u : left) {
    double best = 0.0;
    for (const auto& v : right) best = std::max(best, cosine_sim(u, v));
    total += std::min(best, 1.0);
  }
  return total / static_cast<double>(left.size());
}

}  // namespace plansearch
