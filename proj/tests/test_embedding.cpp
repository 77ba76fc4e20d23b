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

#include <cmath>
#include <random>
#include <set>

#include "plansearch/embedding.hpp"
#include "plansearch/error.hpp"
#include "plansearch/text.hpp"
#include "test_support.hpp"

namespace plansearch {
namespace {

constexpr double kTol = 1e-12;

/// Straight-line re-implementation of signed feature hashing, kept separate
/// from the library so the two routes can be compared.
std::vector<double> reference_hash(const std::vector<std::string>& features, std::size_t dims) {
  std::vector<double> v(dims, 0.0);
  for (const auto& f : features) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : f) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    v[h % dims] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

TEST(HashEmbedder, SingleLetterVectorIsPinned) {
  // "a" yields the features "w:a" (bucket 7, +) and "c:<a>" (bucket 3, -).
  const HashEmbedder embedder(8);
  const auto e = embedder.embed("a");
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<double> expected{0, 0, 0, -r, 0, 0, 0, r};
  ASSERT_EQ(e.dims(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(e.values[i], expected[i], kTol) << i;
  EXPECT_EQ(HashEmbedder::features("a"), (std::vector<std::string>{"w:a", "c:<a>"}));
}

TEST(HashEmbedder, MatchesReferenceOnWords) {
  const HashEmbedder embedder(64);
  for (const std::string word : {"zoning", "transit", "park", "corridor"}) {
    std::vector<std::string> features{"w:" + word};
    const std::string wrapped = "<" + word + ">";
    for (std::size_t i = 0; i + 3 <= wrapped.size(); ++i) features.push_back("c:" + wrapped.substr(i, 3));
    const auto expected = reference_hash(features, 64);
    const auto e = embedder.embed(word);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(e.values[i], expected[i], kTol) << word << " " << i;
  }
}

TEST(HashEmbedder, DeterministicAndNormalized) {
  const HashEmbedder embedder(256);
  const auto a = embedder.embed("Transit-oriented development near stations");
  const auto b = embedder.embed("Transit-oriented development near stations");
  EXPECT_EQ(a.values, b.values);
  EXPECT_TRUE(a.normalized);
  double norm = 0.0;
  for (double x : a.values) norm += x * x;
  EXPECT_NEAR(std::sqrt(norm), 1.0, 1e-6);
  EXPECT_THROW(embedder.embed(""), Error);
  EXPECT_NE(embedder.fingerprint(), HashEmbedder(128).fingerprint());
}

TEST(HashEmbedder, PunctuationOnlyTextFallsBackToWholeText) {
  const HashEmbedder embedder(32);
  EXPECT_NO_THROW(embedder.embed("!!!"));
  EXPECT_NE(embedder.embed("!!!").values, embedder.embed("???").values);
}

TEST(HashEmbedder, DisjointBucketsGiveOrthogonalVectors) {
  // Search a small vocabulary for two words whose features occupy disjoint buckets.
  const HashEmbedder embedder(512);
  const std::vector<std::string> words{"alpha", "bravo", "delta", "kilo", "lima", "oscar"};
  auto buckets = [](const std::string& w) {
    std::set<std::uint64_t> out;
    for (const auto& f : HashEmbedder::features(w)) out.insert(fnv1a64(f) % 512);
    return out;
  };
  bool found = false;
  for (std::size_t i = 0; i < words.size() && !found; ++i) {
    for (std::size_t j = i + 1; j < words.size() && !found; ++j) {
      const auto a = buckets(words[i]);
      const auto b = buckets(words[j]);
      bool disjoint = true;
      for (auto x : a) disjoint = disjoint && !b.count(x);
      if (!disjoint) continue;
      found = true;
      EXPECT_EQ(cosine_sim(embedder.embed(words[i]), embedder.embed(words[j])), 0.0);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cosine, BasicIdentities) {
  const auto v = make_normalized({0.3, -0.4, 1.2});
  auto neg = v;
  for (double& x : neg.values) x = -x;
  EXPECT_NEAR(cosine_sim(v, v), 1.0, 1e-12);
  EXPECT_NEAR(cosine_sim(v, neg), -1.0, 1e-12);
  EXPECT_EQ(cosine_sim(make_normalized({1, 0}), make_normalized({0, 1})), 0.0);
  Embedding raw{{2.0, 0.0}, false};
  EXPECT_NEAR(cosine_sim(raw, make_normalized({1, 1})), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(cosine_sim(v, make_normalized({1, 0})), Error);
}

TEST(Cosine, SymmetricOnRandomVectors) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 100; ++i) {
    const auto a = testing::random_unit(gen, 7);
    const auto b = testing::random_unit(gen, 7);
    EXPECT_EQ(cosine_sim(a, b), cosine_sim(b, a));
    EXPECT_NEAR(cosine_sim(a, a), 1.0, 1e-9);
  }
}

TEST(ProjectionHead, IdentityAndScaleInvariance) {
  const auto e = make_normalized({0.2, -0.5, 0.7, 0.1});
  const auto id = ProjectionHead::identity(4);
  const auto out = project(id, e);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out.values[i], e.values[i], 1e-15);
  auto doubled = id;
  for (double& w : doubled.weights) w *= 2.0;
  const auto out2 = project(doubled, e);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out2.values[i], e.values[i], 1e-15);
}

TEST(ProjectionHead, FixedMatrixByHand) {
  // W = [[1,2,0],[0,1,0],[1,0,1]], e = (1,1,1)/sqrt(3): W e is proportional to (3,1,2).
  ProjectionHead head{3, 3, {1, 2, 0, 0, 1, 0, 1, 0, 1}, std::nullopt};
  const auto out = project(head, make_normalized({1, 1, 1}));
  const double n = std::sqrt(14.0);
  EXPECT_NEAR(out.values[0], 3.0 / n, 1e-15);
  EXPECT_NEAR(out.values[1], 1.0 / n, 1e-15);
  EXPECT_NEAR(out.values[2], 2.0 / n, 1e-15);
}

TEST(ProjectionHead, ErrorsAndJsonRoundTrip) {
  ProjectionHead head{2, 3, {1, 2, 3, 4, 5, 6}, std::vector<double>{0.5, -0.5, 0.25}};
  EXPECT_THROW(project(head, make_normalized({1, 0, 0})), Error);
  ProjectionHead zero{2, 2, {0, 0, 0, 0}, std::nullopt};
  try {
    project(zero, make_normalized({1, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumeric);
  }
  EXPECT_EQ(head_from_json(head_to_json(head)), head);
  testing::TempDir dir;
  save_head(head, dir.str("head.json"));
  EXPECT_EQ(load_head(dir.str("head.json")), head);
  ProjectionHead bad{2, 2, {1, 2, 3}, std::nullopt};
  EXPECT_THROW(bad.validate(), Error);
  ProjectionHead nan{1, 1, {std::nan("")}, std::nullopt};
  EXPECT_THROW(nan.validate(), Error);
}

TEST(ProjectedEmbedder, AppliesHeadAndChangesFingerprint) {
  auto base = std::make_shared<HashEmbedder>(16);
  auto head = ProjectionHead::identity(16);
  head.at(0, 1) = 0.5;
  const ProjectedEmbedder projected(base, head);
  const auto expected = project(head, base->embed("green corridor"));
  EXPECT_EQ(projected.embed("green corridor").values, expected.values);
  EXPECT_NE(projected.fingerprint(), base->fingerprint());
  EXPECT_NE(projected.fingerprint(), ProjectedEmbedder(base, ProjectionHead::identity(16)).fingerprint());
  EXPECT_THROW(ProjectedEmbedder(base, ProjectionHead::identity(8)), Error);
}

// ---- remote provider ----------------------------------------------------------

RemoteEmbedderOptions remote_options(const testing::MockServer& server, std::size_t dims) {
  RemoteEmbedderOptions o;
  o.endpoint = server.url();
  o.dims = dims;
  o.timeout_ms = 300;
  o.max_retries = 1;
  o.backoff_ms = 1;
  return o;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInput;
}

TEST(RemoteEmbedder, ParsesEmbeddingsAndNormalizes) {
  testing::MockServer server;
  server.http().Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < body.at("texts").size(); ++i) rows.push_back({3.0, 4.0 + static_cast<double>(i)});
    res.set_content(nlohmann::json{{"embeddings", rows}, {"dims", 2}}.dump(), "application/json");
  });
  server.start();
  const RemoteEmbedder embedder(remote_options(server, 2));
  const auto e = embedder.embed("x");
  EXPECT_NEAR(e.values[0], 0.6, 1e-12);
  EXPECT_NEAR(e.values[1], 0.8, 1e-12);
  const auto batch = embedder.embed_batch({"a", "b"});
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_NEAR(batch[1].values[0], 3.0 / std::sqrt(34.0), 1e-12);
}

TEST(RemoteEmbedder, DistinguishesFailureKinds) {
  testing::MockServer server;
  server.http().Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
    const auto text = nlohmann::json::parse(req.body).at("texts").at(0).get<std::string>();
    if (text == "wrong-dims") {
      res.set_content(R"({"embeddings": [[1, 2, 3]], "dims": 3})", "application/json");
    } else if (text == "garbage") {
      res.set_content("not json", "text/plain");
    } else if (text == "missing") {
      res.set_content(R"({"vectors": []})", "application/json");
    } else if (text == "slow") {
      std::this_thread::sleep_for(std::chrono::milliseconds(900));
      res.set_content(R"({"embeddings": [[1, 0]], "dims": 2})", "application/json");
    } else {
      res.status = 500;
    }
  });
  server.start();
  const RemoteEmbedder embedder(remote_options(server, 2));
  EXPECT_EQ(code_of([&] { embedder.embed("wrong-dims"); }), ErrorCode::kMalformedResponse);
  EXPECT_EQ(code_of([&] { embedder.embed("garbage"); }), ErrorCode::kMalformedResponse);
  EXPECT_EQ(code_of([&] { embedder.embed("missing"); }), ErrorCode::kMalformedResponse);
  EXPECT_EQ(code_of([&] { embedder.embed("server-error"); }), ErrorCode::kTransport);
  auto no_retry = remote_options(server, 2);
  no_retry.max_retries = 0;
  EXPECT_EQ(code_of([&] { RemoteEmbedder(no_retry).embed("slow"); }), ErrorCode::kTimeout);
  server.stop();
  EXPECT_EQ(code_of([&] { embedder.embed("x"); }), ErrorCode::kTransport);
}

TEST(RemoteEmbedder, RetriesTransientFailures) {
  testing::MockServer server;
  std::atomic<int> calls{0};
  server.http().Post("/embed", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"embeddings": [[0, 1]], "dims": 2})", "application/json");
  });
  server.start();
  const RemoteEmbedder embedder(remote_options(server, 2));
  EXPECT_EQ(embedder.embed("x").values, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(calls.load(), 2);
}

}  // namespace
}  // namespace plansearch
