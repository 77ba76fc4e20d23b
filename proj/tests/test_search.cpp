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
#include <set>

#include "plansearch/error.hpp"
#include "plansearch/search.hpp"
#include "plansearch/text.hpp"
#include "test_support.hpp"

namespace plansearch {
namespace {

const std::vector<std::string> kTexts{
    "Bus rapid transit needs dedicated lanes and level boarding at every station.",
    "Mixed-use zoning lets housing, shops and offices share one district.",
    "Floor area ratio caps the built floor space allowed on a parcel.",
    "Historic district rules govern facade materials and building height.",
    "Green corridors link parks, rivers and wetlands for wildlife movement.",
    "Protected cycle lanes on arterial roads form a connected network.",
    "Parking minimums inflate construction costs and the land used for cars.",
    "Adaptive reuse turns old mills and warehouses into homes and studios.",
    "Transit oriented development raises density near rail stations.",
    "Street trees lower summer temperatures in dense urban blocks.",
};

struct Fixture {
  HashEmbedder embedder{128};
  KeywordExtractor extractor{embedder, default_stopwords(), 0.5};
  Index index = make();

  Index make() {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < kTexts.size(); ++i) docs.push_back({"doc" + std::to_string(i), "", kTexts[i], {}});
    IndexBuildConfig cfg;
    cfg.chunking = ChunkingConfig{{200}, 20};
    cfg.keywords.k = 5;
    return build_index(docs, cfg, embedder, extractor);
  }
};

SearchConfig config(std::size_t x, double alpha, RerankMode mode = RerankMode::kLateInteraction) {
  SearchConfig cfg;
  cfg.x = x;
  cfg.alpha = alpha;
  cfg.rerank = mode;
  return cfg;
}

std::vector<std::string> ids(const SearchResponse& r) {
  std::vector<std::string> out;
  for (const auto& sc : r.results) out.push_back(sc.chunk.chunk_id);
  return out;
}

TEST(HierarchicalSearch, PlantedDuplicateRanksFirst) {
  Fixture f;
  ASSERT_EQ(f.index.size(), 10u);
  for (std::size_t i = 0; i < kTexts.size(); ++i) {
    const auto r = hierarchical_search(kTexts[i], f.index, config(6, 0.5), f.embedder, f.extractor);
    ASSERT_FALSE(r.results.empty());
    EXPECT_EQ(r.results[0].chunk.doc_id, "doc" + std::to_string(i));
    EXPECT_NEAR(r.results[0].semantic_score, 1.0, 1e-6);
    std::size_t max_overlap = 0;
    for (const auto& sc : r.results) max_overlap = std::max(max_overlap, sc.overlap_count);
    EXPECT_EQ(r.results[0].overlap_count, max_overlap);
  }
}

TEST(HierarchicalSearch, CandidateBudgetAndUniqueness) {
  Fixture f;
  for (std::size_t x : {1u, 2u, 3u, 5u, 8u, 25u}) {
    const auto r = hierarchical_search("transit lanes near stations", f.index, config(x, 0.5), f.embedder, f.extractor);
    EXPECT_LE(r.results.size(), x);
    EXPECT_GE(r.results.size(), std::min<std::size_t>((x + 1) / 2, f.index.size()));
    const auto list = ids(r);
    EXPECT_EQ(std::set<std::string>(list.begin(), list.end()).size(), list.size());
    for (const auto& sc : r.results) {
      EXPECT_GE(sc.final_score, 0.0);
      EXPECT_LE(sc.final_score, 1.0);
    }
  }
}

TEST(HierarchicalSearch, CandidatesAreKeywordThenVectorRecall) {
  Fixture f;
  const std::string query = "parking costs for cars";
  const auto keywords = f.extractor.extract(query, 5);
  const auto a = top_k_keyword(f.index, keywords, 3);
  const auto b = top_k_semantic(f.index, f.embedder.embed(query), 2);
  std::set<std::string> expected;
  for (const auto& h : a) expected.insert(h.chunk_id);
  for (const auto& h : b) expected.insert(h.chunk_id);
  const auto r = hierarchical_search(query, f.index, config(5, 0.5), f.embedder, f.extractor);
  const auto got = ids(r);
  EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), expected);
  for (const auto& sc : r.results) {
    std::size_t overlap = 0;
    for (const auto& kw : keywords.keywords) overlap += f.index.keywords(*f.index.find(sc.chunk.chunk_id)).contains(kw);
    EXPECT_EQ(sc.overlap_count, overlap);
    EXPECT_LE(sc.overlap_count, keywords.keywords.size());
  }
}

TEST(HierarchicalSearch, FinalScoreFollowsCombinationRule) {
  Fixture f;
  const auto r = hierarchical_search("green parks and wetlands", f.index, config(8, 0.3), f.embedder, f.extractor);
  double max_cross = 0.0;
  std::size_t max_overlap = 0;
  for (const auto& sc : r.results) {
    max_cross = std::max(max_cross, sc.cross_score);
    max_overlap = std::max(max_overlap, sc.overlap_count);
  }
  for (const auto& sc : r.results) {
    const double cross = max_cross > 0 ? std::max(sc.cross_score, 0.0) / max_cross : 0.0;
    const double overlap = max_overlap > 0 ? static_cast<double>(sc.overlap_count) / max_overlap : 0.0;
    EXPECT_NEAR(sc.final_score, 0.3 * cross + 0.7 * overlap, 1e-12);
  }
  for (std::size_t i = 1; i < r.results.size(); ++i) EXPECT_GE(r.results[i - 1].final_score, r.results[i].final_score);
}

TEST(HierarchicalSearch, EmptyKeywordsAndAlphaOneRankByCross) {
  Fixture f;
  const std::string query = "the of and";  // stopwords only: no query keywords
  const auto r = hierarchical_search(query, f.index, config(6, 1.0), f.embedder, f.extractor);
  // A is filled in chunk_id order, B by cosine.
  std::set<std::string> expected;
  for (const auto& h : top_k_keyword(f.index, KeywordSet{}, 3)) expected.insert(h.chunk_id);
  for (const auto& h : top_k_semantic(f.index, f.embedder.embed(query), 3)) expected.insert(h.chunk_id);
  const auto got = ids(r);
  EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), expected);
  auto sorted = r.results;
  std::sort(sorted.begin(), sorted.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
    if (a.cross_score != b.cross_score) return a.cross_score > b.cross_score;
    if (a.semantic_score != b.semantic_score) return a.semantic_score > b.semantic_score;
    return a.chunk.chunk_id < b.chunk.chunk_id;
  });
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i].chunk.chunk_id, got[i]);
}

TEST(HierarchicalSearch, AlphaZeroWithEqualOverlapFallsBackToSemanticOrder) {
  Fixture f;
  const auto r = hierarchical_search("the of and", f.index, config(10, 0.0), f.embedder, f.extractor);
  for (std::size_t i = 1; i < r.results.size(); ++i) {
    const auto& a = r.results[i - 1];
    const auto& b = r.results[i];
    EXPECT_TRUE(a.semantic_score > b.semantic_score ||
                (a.semantic_score == b.semantic_score && a.chunk.chunk_id < b.chunk.chunk_id));
  }
}

TEST(HierarchicalSearch, Deterministic) {
  Fixture f;
  const auto a = hierarchical_search("dense housing near rail", f.index, config(7, 0.5), f.embedder, f.extractor);
  const auto b = hierarchical_search("dense housing near rail", f.index, config(7, 0.5), f.embedder, f.extractor);
  ASSERT_EQ(ids(a), ids(b));
  for (std::size_t i = 0; i < a.results.size(); ++i) EXPECT_EQ(a.results[i].final_score, b.results[i].final_score);
}

TEST(HierarchicalSearch, AddingAQueryKeywordNeverLowersRank) {
  // Hand-made index: three chunks with identical vectors, so only overlap matters at alpha=0.
  HashEmbedder embedder(32);
  KeywordExtractor extractor(embedder, default_stopwords(), 0.5);
  const std::string query = "bus lane station";
  const auto query_keywords = extractor.extract(query, 5);
  ASSERT_GE(query_keywords.keywords.size(), 2u);
  auto build = [&](const std::vector<std::vector<std::string>>& sets) {
    std::vector<Chunk> chunks;
    std::vector<float> vectors;
    std::map<std::string, KeywordSet> kw;
    const auto e = embedder.embed("shared text");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const std::string doc = "d" + std::to_string(i);
      chunks.push_back(Chunk{make_chunk_id(doc, 50, 0), doc, 50, 0, 11, "shared text"});
      for (double v : e.values) vectors.push_back(static_cast<float>(v));
      kw[chunks.back().chunk_id] = make_keyword_set(sets[i]);
    }
    IndexManifest m;
    m.embedder_fingerprint = embedder.fingerprint();
    return Index(chunks, vectors, kw, m);
  };
  const std::vector<std::vector<std::string>> sets{{query_keywords.keywords[0], query_keywords.keywords[1]},
                                                   {"unrelated"},
                                                   {query_keywords.keywords[0]}};
  auto rank_of = [&](const Index& index, const std::string& id) {
    const auto r = hierarchical_search(query, index, config(6, 0.0), embedder, extractor);
    const auto list = ids(r);
    return std::find(list.begin(), list.end(), id) - list.begin();
  };
  const auto before = build(sets);
  for (std::size_t target = 0; target < sets.size(); ++target) {
    for (const auto& kw : query_keywords.keywords) {
      auto grown = sets;
      if (std::find(grown[target].begin(), grown[target].end(), kw) != grown[target].end()) continue;
      grown[target].push_back(kw);
      const std::string id = make_chunk_id("d" + std::to_string(target), 50, 0);
      EXPECT_LE(rank_of(build(grown), id), rank_of(before, id)) << target << " " << kw;
    }
  }
}

TEST(HierarchicalSearch, Errors) {
  Fixture f;
  HashEmbedder other(64);
  try {
    hierarchical_search("bus", f.index, config(4, 0.5), other, f.extractor);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  try {
    hierarchical_search("   ", f.index, config(4, 0.5), f.embedder, f.extractor);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
  }
  EXPECT_THROW(hierarchical_search("bus", f.index, config(0, 0.5), f.embedder, f.extractor), Error);
  EXPECT_THROW(hierarchical_search("bus", f.index, config(4, 1.5), f.embedder, f.extractor), Error);
}

// ---- cross scores ---------------------------------------------------------------

TEST(CrossScore, ChunkWithEveryQueryTokenScoresOne) {
  HashEmbedder embedder(128);
  EXPECT_NEAR(late_interaction_score("green park", "a green and quiet park", embedder), 1.0, 1e-12);
}

TEST(CrossScore, OrthogonalTokensScoreZero) {
  testing::TableEmbedder embedder(4, {{"a", {1, 0, 0, 0}}, {"b", {0, 1, 0, 0}}, {"c", {0, 0, 1, 0}}, {"d", {0, 0, 0, 1}}});
  EXPECT_EQ(late_interaction_score("a b", "c d", embedder), 0.0);
  EXPECT_EQ(late_interaction_score("a b", "", embedder), 0.0);
}

TEST(CrossScore, MatchesExhaustiveTokenAlignment) {
  HashEmbedder embedder(64);
  const std::vector<std::string> query{"green", "park", "transit", "lane"};
  const std::vector<std::string> chunk{"bus", "lane", "near", "green", "river", "parks"};
  double total = 0.0;
  for (const auto& q : query) {
    double best = -2.0;
    for (const auto& c : chunk) best = std::max(best, cosine_sim(embedder.embed(q), embedder.embed(c)));
    total += best;
  }
  EXPECT_NEAR(late_interaction_score("green park transit lane", "bus lane near green river parks", embedder),
              total / 4.0, 1e-12);
}

TEST(CrossScore, ModeNoneIsCosineAndExternalNeedsScorer) {
  HashEmbedder embedder(64);
  const Chunk chunk{"d#w10@0", "d", 10, 0, 10, "rail station"};
  EXPECT_NEAR(cross_score("station", chunk, embedder, RerankMode::kNone),
              cosine_sim(embedder.embed("station"), embedder.embed("rail station")), 1e-15);
  try {
    cross_score("station", chunk, embedder, RerankMode::kExternal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRerank);
  }
}

TEST(ExternalRerank, UsesRemoteScoresAndDegradesOnFailure) {
  testing::MockServer server;
  server.http().Post("/score", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const auto text = body.at("text").get<std::string>();
    res.set_content(nlohmann::json{{"score", text.find("parks") != std::string::npos ? 0.9 : 0.1}}.dump(),
                    "application/json");
  });
  server.start();
  Fixture f;
  auto cfg = config(6, 1.0, RerankMode::kExternal);
  cfg.scorer_endpoint = server.url();
  const auto r = hierarchical_search("green parks", f.index, cfg, f.embedder, f.extractor);
  EXPECT_FALSE(r.degraded);
  EXPECT_EQ(r.results[0].chunk.doc_id, "doc4");
  EXPECT_DOUBLE_EQ(r.results[0].cross_score, 0.9);

  server.stop();
  cfg.scorer_timeout_ms = 200;
  const auto degraded = hierarchical_search("green parks", f.index, cfg, f.embedder, f.extractor);
  EXPECT_TRUE(degraded.degraded);
  EXPECT_FALSE(degraded.degraded_reason.empty());
  for (const auto& sc : degraded.results) EXPECT_EQ(sc.cross_score, sc.semantic_score);
}

TEST(SemanticSearch, MatchesTopK) {
  Fixture f;
  const auto r = semantic_search("zoning for offices", f.index, 4, f.embedder);
  const auto hits = top_k_semantic(f.index, f.embedder.embed("zoning for offices"), 4);
  ASSERT_EQ(r.size(), hits.size());
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i].chunk.chunk_id, hits[i].chunk_id);
}

}  // namespace
}  // namespace plansearch
