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

#include <random>
#include <set>

#include "plansearch/core.hpp"
#include "plansearch/error.hpp"
#include "plansearch/text.hpp"
#include "test_support.hpp"

namespace plansearch {
namespace {

TEST(ChunkId, RendersDocWindowAndStart) {
  EXPECT_EQ(make_chunk_id("d1", 5, 0), "d1#w5@0");
  EXPECT_EQ(make_chunk_id("d1", 5, 4), "d1#w5@4");
  EXPECT_EQ(make_chunk_id("d1", 5, 4), make_chunk_id("d1", 5, 4));
}

TEST(ChunkId, InjectiveOverRandomTriples) {
  std::mt19937_64 gen(3);
  std::set<std::tuple<std::string, std::size_t, std::size_t>> triples;
  std::set<std::string> ids;
  const std::vector<std::string> docs{"a", "b", "a#w1", "doc/x.txt", "d@1", ""};
  for (int i = 0; i < 2000; ++i) {
    const auto& doc = docs[gen() % docs.size()];
    const std::size_t w = 1 + gen() % 50;
    const std::size_t s = gen() % 200;
    if (doc.empty()) continue;
    if (triples.emplace(doc, w, s).second) ids.insert(make_chunk_id(doc, w, s));
  }
  EXPECT_EQ(ids.size(), triples.size());
}

TEST(Document, ValidationRejectsEmptyIdAndText) {
  EXPECT_THROW(validate_document(Document{"", "", "text", {}}), Error);
  EXPECT_THROW(validate_document(Document{"d", "", "", {}}), Error);
  EXPECT_THROW(validate_document(Document{"d", "", std::string("\xff\xfe"), {}}), Error);
  EXPECT_NO_THROW(validate_document(Document{"d", "", "ok", {}}));
}

TEST(Document, DirectoryIdsAreRelativePaths) {
  testing::TempDir dir;
  std::filesystem::create_directories(dir.path() / "sub");
  testing::write_file(dir.path() / "b.txt", "second");
  testing::write_file(dir.path() / "sub" / "a.md", "first");
  const auto docs = load_documents(dir.str());
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, "b.txt");
  EXPECT_EQ(docs[1].doc_id, "sub/a.md");
  EXPECT_EQ(docs[1].text, "first");
}

TEST(Document, JsonLinesRoundTrip) {
  testing::TempDir dir;
  std::vector<Document> docs{{"x", "Title", "Body text", {{"k", "v"}}}, {"y", "", "城市规划", {}}};
  write_documents_jsonl(docs, dir.str("docs.jsonl"));
  const auto back = load_documents(dir.str("docs.jsonl"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].doc_id, "x");
  EXPECT_EQ(back[0].title, "Title");
  EXPECT_EQ(back[0].metadata.at("k"), "v");
  EXPECT_EQ(back[1].text, "城市规划");
}

TEST(Document, MalformedJsonLineNamesTheLine) {
  testing::TempDir dir;
  testing::write_file(dir.path() / "docs.jsonl", "{\"id\":\"a\",\"text\":\"x\"}\n{broken\n");
  try {
    load_documents(dir.str("docs.jsonl"));
    FAIL() << "expected an input error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
}

TEST(Text, Utf8LengthCountsScalarValues) {
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("城市"), 2u);
  EXPECT_EQ(utf8_length("é"), 1u);
  EXPECT_EQ(utf8_encode(utf8_decode("a城b")), "a城b");
}

TEST(Text, NormalizeAppliesNfcAndLowercase) {
  // "e" + combining acute composes to U+00E9.
  EXPECT_EQ(normalize_text("Caf\x65\xcc\x81"), "caf\xc3\xa9");
  EXPECT_EQ(normalize_text("ZONING"), "zoning");
  EXPECT_EQ(canonical_text("  a \n\t b  "), "a b");
}

TEST(Text, Fnv1a64MatchesPublishedVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Tokenize, PunctuationBreaksAdjacency) {
  const auto tokens = tokenize(normalize_text("Mixed-use zoning, near stations"));
  ASSERT_EQ(tokens.size(), 5u);
  EXPECT_EQ(tokens[0].text, "mixed");
  EXPECT_EQ(tokens[1].text, "use");
  EXPECT_FALSE(tokens[1].adjacent_to_prev);
  EXPECT_EQ(tokens[2].text, "zoning");
  EXPECT_TRUE(tokens[2].adjacent_to_prev);
  EXPECT_FALSE(tokens[3].adjacent_to_prev);
  EXPECT_TRUE(tokens[4].adjacent_to_prev);
}

TEST(Tokenize, HanTextSplitsPerCharacter) {
  const auto tokens = tokenize(normalize_text("城市规划"));
  ASSERT_EQ(tokens.size(), 4u);
  for (const auto& t : tokens) EXPECT_TRUE(t.char_level);
  EXPECT_EQ(tokens[0].text, "城");
  EXPECT_TRUE(tokens[1].adjacent_to_prev);
  EXPECT_EQ(join_bigram(tokens[0], tokens[1]), "城市");
  const auto mixed = tokenize(normalize_text("bus 城"));
  ASSERT_EQ(mixed.size(), 2u);
  EXPECT_EQ(join_bigram(mixed[0], mixed[1]), "bus 城");
}

TEST(Stopwords, ParseSkipsCommentsAndBlankLines) {
  const auto list = parse_stopwords("# header\nThe\n\n  of \n");
  EXPECT_EQ(list.size(), 2u);
  EXPECT_TRUE(list.count("the"));
  EXPECT_TRUE(list.count("of"));
  EXPECT_TRUE(default_stopwords().count("the"));
  EXPECT_TRUE(default_stopwords().count("的"));
}

}  // namespace
}  // namespace plansearch
