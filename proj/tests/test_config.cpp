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

#include <cstdlib>

#include "plansearch/config.hpp"
#include "plansearch/error.hpp"
#include "test_support.hpp"

namespace plansearch {
namespace {

std::string config_error(const std::string& toml) {
  try {
    parse_config(toml);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << toml;
  return "";
}

TEST(Config, EmptyTextGivesDefaults) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.embedding.provider, "hash");
  EXPECT_EQ(cfg.embedding.dims, 256u);
  EXPECT_EQ(cfg.chunking.window_sizes, (std::vector<std::size_t>{200, 400}));
  EXPECT_EQ(cfg.chunking.overlap, 50u);
  EXPECT_EQ(cfg.search.rerank, RerankMode::kLateInteraction);
  EXPECT_EQ(cfg.eval.variants.size(), 3u);
  EXPECT_EQ(cfg.serve.port, 8080);
}

TEST(Config, ReadsEverySection) {
  const auto cfg = parse_config(R"(
[embedding]
dims = 64
[chunking]
window_sizes = [100]
overlap = 10
[keywords]
k = 7
query_k = 4
mmr_lambda = 0.3
[search]
x = 12
alpha = 0.25
rerank = "none"
keyword_similarity = "soft"
[training]
optimizer = "adam"
lambda = 0.5
epochs = 3
[curation]
selection = "top-fraction"
selection_value = 0.4
dimensions = ["ecology"]
types = ["definition", "application"]
response_mode = "generated"
k_center = 9
[eval]
variants = ["full-hierarchical"]
[serve]
port = 0
default_top = 3
)");
  EXPECT_EQ(cfg.embedding.dims, 64u);
  EXPECT_EQ(cfg.chunking.window_sizes, (std::vector<std::size_t>{100}));
  EXPECT_EQ(cfg.keywords.k, 7u);
  EXPECT_EQ(cfg.search.query_k, 4u);
  EXPECT_EQ(cfg.search.x, 12u);
  EXPECT_EQ(cfg.search.rerank, RerankMode::kNone);
  EXPECT_EQ(cfg.search.keyword_mode, KeywordSimilarityMode::kSoft);
  EXPECT_EQ(cfg.training.optimizer, OptimizerKind::kAdam);
  EXPECT_EQ(cfg.training.epochs, 3u);
  EXPECT_EQ(cfg.curation.pipeline.selection.mode, SelectionMode::kTopFraction);
  EXPECT_EQ(cfg.curation.pipeline.taxonomy.types.size(), 2u);
  EXPECT_EQ(cfg.curation.pipeline.self_ask.response_mode, ResponseMode::kGenerated);
  EXPECT_EQ(cfg.curation.pipeline.chunking.overlap, 10u);
  EXPECT_EQ(cfg.eval.variants, (std::vector<AblationVariant>{AblationVariant::kFull}));
  EXPECT_EQ(cfg.serve.default_top, 3u);
}

TEST(Config, ErrorsNameTheKeyPath) {
  EXPECT_NE(config_error("[search]\nalpah = 0.5\n").find("search.alpah"), std::string::npos);
  EXPECT_NE(config_error("[nonsense]\nx = 1\n").find("nonsense"), std::string::npos);
  EXPECT_NE(config_error("[search]\nx = \"ten\"\n").find("search.x"), std::string::npos);
  EXPECT_NE(config_error("[search]\nrerank = \"cross\"\n").find("search.rerank"), std::string::npos);
  EXPECT_NE(config_error("[chunking]\noverlap = -1\n").find("chunking.overlap"), std::string::npos);
  EXPECT_NE(config_error("[eval]\nvariants = [\"best\"]\n").find("eval.variants"), std::string::npos);
  EXPECT_NE(config_error("[search\n").find("<config>:1"), std::string::npos);
}

TEST(Config, CrossFieldChecks) {
  config_error("[chunking]\nwindow_sizes = [50]\noverlap = 50\n");
  config_error("[keywords]\nmmr_lambda = 1.5\n");
  config_error("[search]\nalpha = -0.1\n");
  config_error("[embedding]\nprovider = \"remote\"\n");
  config_error("[embedding]\nprovider = \"projected\"\n");
  config_error("[curation]\ntypes = []\n");
  config_error("[serve]\nport = 70000\n");
  config_error("[training]\ntau = 0.0\n");
  config_error("[search]\nmax_concurrency = 0\n");
}

TEST(Config, SeedAppliesToEverySeededStage) {
  auto cfg = parse_config("");
  cfg.set_seed(99);
  EXPECT_EQ(cfg.training.seed, 99u);
  EXPECT_EQ(cfg.curation.pipeline.seed, 99u);
}

TEST(Config, ResolveFallsBackToEnvironment) {
  testing::TempDir dir;
  testing::write_file(dir.path() / "env.toml", "[search]\nx = 33\n");
  testing::write_file(dir.path() / "explicit.toml", "[search]\nx = 44\n");
  ::setenv("PLANSEARCH_CONFIG", dir.str("env.toml").c_str(), 1);
  EXPECT_EQ(resolve_config("").search.x, 33u);
  EXPECT_EQ(resolve_config(dir.str("explicit.toml")).search.x, 44u);
  ::unsetenv("PLANSEARCH_CONFIG");
  EXPECT_EQ(resolve_config("").search.x, SearchConfig{}.x);
  try {
    load_config(dir.str("missing.toml"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Config, MakeEmbedderChecksHeadWidth) {
  testing::TempDir dir;
  ProjectionHead head = ProjectionHead::identity(8);
  save_head(head, dir.str("head.json"));
  EmbeddingSettings settings;
  settings.provider = "projected";
  settings.head_path = dir.str("head.json");
  settings.dims = 8;
  EXPECT_EQ(make_embedder(settings)->dims(), 8u);
  settings.dims = 16;
  EXPECT_THROW(make_embedder(settings), Error);
  EXPECT_EQ(make_embedder(EmbeddingSettings{})->dims(), 256u);
}

}  // namespace
}  // namespace plansearch
