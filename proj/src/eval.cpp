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

#include "plansearch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "plansearch/error.hpp"

namespace plansearch {
namespace {

void require_results(const RankedResults& results, const std::vector<Judgment>& judgments) {
  if (judgments.empty()) fail(ErrorCode::kEvaluation, "no judgments to evaluate");
  std::string missing;
  for (const auto& j : judgments) {
    if (!results.count(j.query_id)) missing += (missing.empty() ? "" : ", ") + j.query_id;
  }
  if (!missing.empty()) fail(ErrorCode::kEvaluation, "no results for judged queries: " + missing);
}

std::string format_score(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", v);
  return buffer;
}

}  // namespace

double score_at_k(const RankedResults& results, const std::vector<Judgment>& judgments, std::size_t k) {
  require_results(results, judgments);
  std::size_t hits = 0;
  for (const auto& j : judgments) {
    const auto& ranked = results.at(j.query_id);
    const std::size_t depth = std::min(k, ranked.size());
    for (std::size_t i = 0; i < depth; ++i) {
      if (j.relevant_chunk_ids.count(ranked[i])) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(judgments.size());
}

double recall_at_k(const RankedResults& results, const std::vector<Judgment>& judgments, std::size_t k) {
  require_results(results, judgments);
  double total = 0.0;
  for (const auto& j : judgments) {
    if (j.relevant_chunk_ids.empty()) fail(ErrorCode::kEvaluation, "judgment " + j.query_id + " lists no relevant chunks");
    const auto& ranked = results.at(j.query_id);
    std::size_t found = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) found += j.relevant_chunk_ids.count(ranked[i]);
    total += static_cast<double>(found) / static_cast<double>(j.relevant_chunk_ids.size());
  }
  return total / static_cast<double>(judgments.size());
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorCode::kEvaluation, "spearman inputs differ in length");
  if (xs.size() < 2) fail(ErrorCode::kEvaluation, "spearman needs at least two points");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) fail(ErrorCode::kEvaluation, "spearman inputs must be finite");
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::kEvaluation, "spearman is undefined for a constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double sts_spearman(const std::vector<StsPair>& pairs, const EmbeddingProvider& embedder) {
  std::vector<double> scores;
  std::vector<double> labels;
  for (const auto& p : pairs) {
    scores.push_back(cosine_sim(embedder.embed(p.a), embedder.embed(p.b)));
    labels.push_back(p.label);
  }
  return spearman(scores, labels);
}

std::string variant_name(AblationVariant variant) {
  switch (variant) {
    case AblationVariant::kSemanticOnly: return "semantic-only";
    case AblationVariant::kSemanticHead: return "semantic+head";
    case AblationVariant::kFull: return "full-hierarchical";
  }
  return "unknown";
}

AblationVariant parse_variant(const std::string& name) {
  for (auto v : {AblationVariant::kSemanticOnly, AblationVariant::kSemanticHead, AblationVariant::kFull}) {
    if (variant_name(v) == name) return v;
  }
  fail(ErrorCode::kConfig, "unknown ablation variant \"" + name +
                               "\" (expected semantic-only, semantic+head or full-hierarchical)");
}

const AblationRow& AblationReport::row(AblationVariant variant) const {
  for (const auto& r : rows) {
    if (r.variant == variant) return r;
  }
  fail(ErrorCode::kEvaluation, "report has no row for " + variant_name(variant));
}

nlohmann::json AblationReport::to_json() const {
  nlohmann::json out;
  out["metric"] = "score@k (hit-rate)";
  out["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    out["rows"].push_back({{"method", variant_name(r.variant)},
                           {"score@1", r.score_at_1},
                           {"score@5", r.score_at_5},
                           {"AVG", r.average}});
  }
  return out;
}

std::string AblationReport::to_table() const {
  char line[128];
  std::string out = "score@k (hit-rate)\n";
  std::snprintf(line, sizeof(line), "%-20s %9s %9s %9s\n", "Method", "score@1", "score@5", "AVG");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-20s %9s %9s %9s\n", variant_name(r.variant).c_str(),
                  format_score(r.score_at_1).c_str(), format_score(r.score_at_5).c_str(),
                  format_score(r.average).c_str());
    out += line;
  }
  return out;
}

RankedResults run_variant(const AblationInputs& inputs, AblationVariant variant,
                          const std::vector<Query>& queries, std::size_t depth) {
  if (inputs.base_index == nullptr || !inputs.base || inputs.extractor == nullptr) {
    fail(ErrorCode::kConfig, "ablation needs an index, a base embedder and a keyword extractor");
  }
  const Index& base_index = *inputs.base_index;
  std::shared_ptr<const EmbeddingProvider> embedder = inputs.base;
  std::optional<Index> projected_index;
  if (variant != AblationVariant::kSemanticOnly) {
    ProjectionHead head = inputs.head.value_or(ProjectionHead::identity(inputs.base->dims()));
    embedder = std::make_shared<ProjectedEmbedder>(inputs.base, std::move(head));
    projected_index.emplace(reembed_index(base_index, *embedder));
  }
  const Index& index = projected_index ? *projected_index : base_index;

  RankedResults results;
  for (const auto& q : queries) {
    std::vector<std::string> ids;
    if (variant == AblationVariant::kFull) {
      const auto response = hierarchical_search(q.text, index, inputs.search, *embedder, *inputs.extractor);
      for (std::size_t i = 0; i < std::min(depth, response.results.size()); ++i) {
        ids.push_back(response.results[i].chunk.chunk_id);
      }
    } else {
      for (const auto& sc : semantic_search(q.text, index, depth, *embedder)) ids.push_back(sc.chunk.chunk_id);
    }
    results[q.query_id] = std::move(ids);
  }
  return results;
}

AblationReport run_ablation(const AblationInputs& inputs, const std::vector<Query>& queries,
                            const std::vector<Judgment>& judgments,
                            const std::vector<AblationVariant>& variants) {
  if (variants.empty()) fail(ErrorCode::kConfig, "no ablation variants requested");
  AblationReport report;
  for (const auto variant : variants) {
    const RankedResults results = run_variant(inputs, variant, queries, 5);
    AblationRow row{variant};
    row.score_at_1 = score_at_k(results, judgments, 1);
    row.score_at_5 = score_at_k(results, judgments, 5);
    row.average = (row.score_at_1 + row.score_at_5) / 2.0;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace plansearch
