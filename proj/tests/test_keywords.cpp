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

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "plansearch/embedding.hpp"
#include "plansearch/keywords.hpp"
#include "plansearch/text.hpp"

namespace plansearch {
namespace {

const char* kParagraph =
    "Transit corridors shape urban growth because stations concentrate housing, offices and retail "
    "within walking distance, while green corridors protect wetlands and parks along rivers near "
    "the historic district center";

/// Exhaustive MMR: score every candidate, then simulate each greedy step.
std::vector<std::string> mmr_oracle(const std::string& text, const EmbeddingProvider& embedder, std::size_t k,
                                    double lambda, const StopwordList& stopwords) {
  const auto candidates = keyword_candidates(text, stopwords);
  const auto doc = embedder.embed(text);
  std::vector<Embedding> embs;
  std::vector<double> relevance;
  for (const auto& c : candidates) {
    embs.push_back(embedder.embed(c));
    relevance.push_back(cosine_sim(embs.back(), doc));
  }
  std::vector<std::size_t> picked;
  std::vector<bool> used(candidates.size(), false);
  while (picked.size() < std::min(k, candidates.size())) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      double score = relevance[i];
      if (!picked.empty()) {
        double max_sim = -std::numeric_limits<double>::infinity();
        for (auto j : picked) max_sim = std::max(max_sim, cosine_sim(embs[i], embs[j]));
        score = lambda * relevance[i] - (1.0 - lambda) * max_sim;
      }
      if (score > best) {  // strict: earlier (byte-smaller) candidate wins ties
        best = score;
        best_i = i;
      }
    }
    used[best_i] = true;
    picked.push_back(best_i);
  }
  std::vector<std::string> out;
  for (auto i : picked) out.push_back(candidates[i]);
  return out;
}

TEST(KeywordCandidates, UnigramsAndAdjacentBigramsWithoutStopwords) {
  const auto c = keyword_candidates("The green belt, belt parks", default_stopwords());
  EXPECT_EQ(c, (std::vector<std::string>{"belt", "belt parks", "green", "green belt", "parks"}));
}

TEST(KeywordCandidates, HanTextUsesCharactersAndCharacterBigrams) {
  const auto c = keyword_candidates("城市规划", StopwordList{});
  EXPECT_EQ(c, (std::vector<std::string>{"划", "城", "城市", "市", "市规", "规", "规划"}));
}

TEST(ExtractKeywords, RepeatedTokenGivesSingleKeyword) {
  const HashEmbedder embedder(64);
  const auto kws = extract_keywords("zoning zoning zoning", embedder, 3, 0.5);
  EXPECT_EQ(kws.keywords, (std::vector<std::string>{"zoning"}));
}

TEST(ExtractKeywords, StopwordOnlyTextGivesEmptySet) {
  const HashEmbedder embedder(64);
  EXPECT_TRUE(extract_keywords("the of and to in", embedder, 5, 0.5).keywords.empty());
}

TEST(ExtractKeywords, MatchesExhaustiveMmrOracle) {
  const HashEmbedder embedder(256);
  for (double lambda : {0.3, 0.5, 0.8}) {
    const auto got = extract_keywords(kParagraph, embedder, 5, lambda);
    EXPECT_EQ(got.keywords, mmr_oracle(kParagraph, embedder, 5, lambda, default_stopwords())) << lambda;
  }
}

TEST(ExtractKeywords, LambdaOneIsPureRelevanceRanking) {
  const HashEmbedder embedder(256);
  const auto candidates = keyword_candidates(kParagraph, default_stopwords());
  const auto doc = embedder.embed(kParagraph);
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& c : candidates) ranked.emplace_back(-cosine_sim(embedder.embed(c), doc), c);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> expected;
  for (std::size_t i = 0; i < 6; ++i) expected.push_back(ranked[i].second);
  EXPECT_EQ(extract_keywords(kParagraph, embedder, 6, 1.0).keywords, expected);
}

TEST(ExtractKeywords, DeterministicAndBoundedByK) {
  const HashEmbedder embedder(128);
  const auto a = extract_keywords(kParagraph, embedder, 4, 0.5);
  EXPECT_EQ(a, extract_keywords(kParagraph, embedder, 4, 0.5));
  EXPECT_EQ(a.keywords.size(), 4u);
  EXPECT_LE(extract_keywords("parks", embedder, 4, 0.5).keywords.size(), 1u);
}

TEST(KeywordSet, NormalizesAndDeduplicates) {
  const auto set = make_keyword_set({" Zoning ", "zoning", "PARK"});
  EXPECT_EQ(set.keywords, (std::vector<std::string>{"zoning", "park"}));
  EXPECT_TRUE(set.contains("park"));
}

TEST(KeywordSimilarity, JaccardArithmetic) {
  const auto ab = make_keyword_set({"a", "b"});
  const auto bc = make_keyword_set({"b", "c"});
  EXPECT_DOUBLE_EQ(keyword_set_similarity(ab, ab), 1.0);
  EXPECT_DOUBLE_EQ(keyword_set_similarity(ab, make_keyword_set({"x"})), 0.0);
  EXPECT_DOUBLE_EQ(keyword_set_similarity(ab, bc), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(keyword_set_similarity(bc, ab), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(keyword_set_similarity(KeywordSet{}, KeywordSet{}), 0.0);
}

TEST(KeywordSimilarity, SoftModeIsBoundedAndExactOnIdenticalSets) {
  const HashEmbedder embedder(128);
  const auto a = make_keyword_set({"transit", "housing"});
  const auto b = make_keyword_set({"wetland", "transit corridor", "parks"});
  EXPECT_NEAR(soft_keyword_similarity(a, a, embedder), 1.0, 1e-12);
  const double s = soft_keyword_similarity(a, b, embedder);
  EXPECT_GE(s, 0.0);
  EXPECT_LE(s, 1.0);
  EXPECT_EQ(soft_keyword_similarity(a, KeywordSet{}, embedder), 0.0);
}

}  // namespace
}  // namespace plansearch
