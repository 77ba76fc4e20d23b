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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "plansearch/embedding.hpp"
#include "plansearch/indexing.hpp"
#include "plansearch/search.hpp"

namespace plansearch {

struct Judgment {
  std::string query_id;
  std::set<std::string> relevant_chunk_ids;
};

struct Query {
  std::string query_id;
  std::string text;
};

/// query_id -> ranked chunk ids.
using RankedResults = std::map<std::string, std::vector<std::string>>;

/// Fraction of judged queries with at least one relevant chunk in their top k
/// (hit rate). Throws kEvaluation listing any judged query without results.
double score_at_k(const RankedResults& results, const std::vector<Judgment>& judgments, std::size_t k);

/// Mean over judged queries of |relevant ∩ top k| / |relevant|.
double recall_at_k(const RankedResults& results, const std::vector<Judgment>& judgments, std::size_t k);

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws kEvaluation for fewer than two
/// points, mismatched lengths, or a constant input.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct StsPair {
  std::string a;
  std::string b;
  double label = 0.0;
};

/// Spearman correlation between cosine(embed(a), embed(b)) and the labels.
double sts_spearman(const std::vector<StsPair>& pairs, const EmbeddingProvider& embedder);

enum class AblationVariant { kSemanticOnly, kSemanticHead, kFull };

std::string variant_name(AblationVariant variant);
AblationVariant parse_variant(const std::string& name);

struct AblationRow {
  AblationVariant variant;
  double score_at_1 = 0.0;
  double score_at_5 = 0.0;
  double average = 0.0;
};

struct AblationReport {
  std::vector<AblationRow> rows;

  const AblationRow& row(AblationVariant variant) const;
  nlohmann::json to_json() const;
  /// Fixed-width table: Method | score@1 | score@5 | AVG, one row per variant.
  std::string to_table() const;
};

struct AblationInputs {
  const Index* base_index = nullptr;                  // built with `base`
  std::shared_ptr<const EmbeddingProvider> base;
  std::optional<ProjectionHead> head;                 // fine-tuned head; identity when absent
  const KeywordExtractor* extractor = nullptr;        // the one the index keywords came from
  SearchConfig search;
};

/// Runs each variant over `queries` and scores it against `judgments`:
///   semantic-only  vector scan under the base embedder
///   semantic+head  vector scan under base + head
///   full           hierarchical search under base + head (base when no head)
AblationReport run_ablation(const AblationInputs& inputs, const std::vector<Query>& queries,
                            const std::vector<Judgment>& judgments,
                            const std::vector<AblationVariant>& variants);

/// Runs `queries` through one variant, keeping the top `depth` chunk ids.
RankedResults run_variant(const AblationInputs& inputs, AblationVariant variant,
                          const std::vector<Query>& queries, std::size_t depth);

}  // namespace plansearch
