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

#include "plansearch/curation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include <unicode/uchar.h>

#include "plansearch/error.hpp"
#include "plansearch/text.hpp"

namespace plansearch {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool is_transport(ErrorCode code) {
  return code == ErrorCode::kTransport || code == ErrorCode::kTimeout;
}

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("curation stage ") + stage + ": " + e.what());
  }
}

}  // namespace

void LabelTaxonomy::validate() const {
  if (dimensions.empty()) fail(ErrorCode::kConfig, "curation.dimensions must not be empty");
  if (types.empty()) fail(ErrorCode::kConfig, "curation.types must not be empty");
}

void HeuristicQualityConfig::validate() const {
  if (min_length > max_length) fail(ErrorCode::kConfig, "curation.min_length exceeds curation.max_length");
  if (falloff == 0) fail(ErrorCode::kConfig, "curation.length_falloff must be positive");
  const double weights[] = {length_weight, alnum_weight, repetition_weight};
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::kConfig, "quality weights must be finite and non-negative");
    total += w;
  }
  if (total <= 0.0) fail(ErrorCode::kConfig, "quality weights must not all be zero");
}

HeuristicQualityScorer::HeuristicQualityScorer(HeuristicQualityConfig cfg) : cfg_(cfg) { cfg_.validate(); }

HeuristicQualityScorer::Terms HeuristicQualityScorer::terms(const Chunk& segment) const {
  Terms t;
  const std::u32string text = utf8_decode(segment.text);
  const double len = static_cast<double>(text.size());
  const double lo = static_cast<double>(cfg_.min_length);
  const double hi = static_cast<double>(cfg_.max_length);
  const double falloff = static_cast<double>(cfg_.falloff);
  if (len < lo) {
    t.length = clamp01(1.0 - (lo - len) / falloff);
  } else if (len > hi) {
    t.length = clamp01(1.0 - (len - hi) / falloff);
  } else {
    t.length = 1.0;
  }

  std::size_t visible = 0;
  std::size_t alnum = 0;
  for (char32_t c : text) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) continue;
    ++visible;
    if (u_isalnum(static_cast<UChar32>(c))) ++alnum;
  }
  t.alnum = visible == 0 ? 0.0 : static_cast<double>(alnum) / static_cast<double>(visible);

  const auto tokens = token_strings(segment.text);
  if (tokens.size() < 3) {
    t.non_repetition = 1.0;
  } else {
    std::set<std::string> distinct;
    const std::size_t total = tokens.size() - 2;
    for (std::size_t i = 0; i < total; ++i) {
      distinct.insert(tokens[i] + '\x1f' + tokens[i + 1] + '\x1f' + tokens[i + 2]);
    }
    t.non_repetition = 1.0 - static_cast<double>(total - distinct.size()) / static_cast<double>(total);
  }
  return t;
}

double HeuristicQualityScorer::score(const Chunk& segment) const {
  const Terms t = terms(segment);
  const double total = cfg_.length_weight + cfg_.alnum_weight + cfg_.repetition_weight;
  return clamp01((cfg_.length_weight * t.length + cfg_.alnum_weight * t.alnum +
                  cfg_.repetition_weight * t.non_repetition) /
                 total);
}

double assess_quality(const Chunk& segment, const QualityScorer& scorer) {
  const double q = scorer.score(segment);
  if (!std::isfinite(q)) fail(ErrorCode::kNumeric, "quality scorer returned a non-finite score");
  return clamp01(q);
}

std::vector<CandidateSegment> select_candidates(const std::vector<Chunk>& segments,
                                                const QualityScorer& scorer,
                                                const SelectionConfig& selection) {
  std::vector<CandidateSegment> scored;
  scored.reserve(segments.size());
  for (const auto& s : segments) scored.push_back(CandidateSegment{s, assess_quality(s, scorer)});
  std::sort(scored.begin(), scored.end(), [](const CandidateSegment& a, const CandidateSegment& b) {
    if (a.quality != b.quality) return a.quality > b.quality;
    return a.segment.chunk_id < b.segment.chunk_id;
  });

  if (selection.mode == SelectionMode::kThreshold) {
    std::erase_if(scored, [&](const CandidateSegment& c) { return c.quality < selection.value; });
  } else {
    if (!(selection.value >= 0.0 && selection.value <= 1.0)) {
      fail(ErrorCode::kConfig, "top fraction must lie in [0, 1]");
    }
    const auto keep = static_cast<std::size_t>(std::ceil(selection.value * static_cast<double>(scored.size())));
    scored.resize(std::min(keep, scored.size()));
  }
  return scored;
}

Label sample_label(const LabelTaxonomy& taxonomy, Rng& rng) {
  taxonomy.validate();
  const std::size_t cell = rng.uniform_index(taxonomy.dimensions.size() * taxonomy.types.size());
  return Label{taxonomy.dimensions[cell / taxonomy.types.size()], taxonomy.types[cell % taxonomy.types.size()]};
}

std::optional<InstructionRecord> self_ask(const CandidateSegment& candidate, const LabelTaxonomy& taxonomy,
                                          TextGenerator& generator, Rng& rng, const SelfAskConfig& cfg,
                                          SelfAskCounters& counters) {
  const Label label = sample_label(taxonomy, rng);
  auto call = [&](GenerationRequest request, const std::string& tmpl) -> std::optional<std::string> {
    request.prompt = render_template(tmpl, request.fields);
    try {
      std::string text = generator.generate(request);
      if (canonical_text(text).empty()) {
        ++counters.malformed_outputs;
        return std::nullopt;
      }
      return text;
    } catch (const Error& e) {
      if (is_transport(e.code())) {
        ++counters.transport_failures;
      } else if (e.code() == ErrorCode::kMalformedResponse) {
        ++counters.malformed_outputs;
      } else {
        throw;
      }
      return std::nullopt;
    }
  };

  GenerationRequest ask;
  ask.kind = "instruction";
  ask.fields = {{"dimension", label.dimension}, {"type", label.type}, {"segment", candidate.segment.text}};
  auto instruction = call(ask, cfg.instruction_template);
  if (!instruction) return std::nullopt;

  InstructionRecord record;
  record.instruction = *instruction;
  record.source_chunk_id = candidate.segment.chunk_id;
  record.label = label;
  record.quality = candidate.quality;
  if (cfg.response_mode == ResponseMode::kDirect) {
    record.output = candidate.segment.text;
  } else {
    GenerationRequest answer;
    answer.kind = "response";
    answer.fields = {{"instruction", record.instruction}, {"segment", candidate.segment.text}};
    auto output = call(answer, cfg.response_template);
    if (!output) return std::nullopt;
    record.input = candidate.segment.text;
    record.output = *output;
  }
  return record;
}

std::vector<InstructionRecord> dedup(const std::vector<InstructionRecord>& records,
                                     const EmbeddingProvider& embedder, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) fail(ErrorCode::kConfig, "dedup threshold must lie in (0, 1]");
  std::vector<InstructionRecord> ordered = records;
  std::stable_sort(ordered.begin(), ordered.end(), [](const InstructionRecord& a, const InstructionRecord& b) {
    return std::tie(b.quality, a.source_chunk_id, a.instruction) < std::tie(a.quality, b.source_chunk_id, b.instruction);
  });

  std::vector<InstructionRecord> kept;
  std::set<std::string> kept_texts;
  std::vector<Embedding> kept_vectors;
  for (auto& record : ordered) {
    std::string canonical = canonical_text(record.instruction);
    if (kept_texts.count(canonical)) continue;
    Embedding e = embedder.embed(record.instruction);
    bool near = false;
    for (const auto& other : kept_vectors) {
      if (cosine_sim(e, other) >= threshold) {
        near = true;
        break;
      }
    }
    if (near) continue;
    kept_texts.insert(std::move(canonical));
    kept_vectors.push_back(std::move(e));
    kept.push_back(std::move(record));
  }
  return kept;
}

double HeuristicRecordScorer::quality(const InstructionRecord& record) const { return clamp01(record.quality); }

double HeuristicRecordScorer::complexity(const InstructionRecord& record) const {
  static const std::u32string kDelimiters = U",;:，；：、?？";
  const std::u32string text = utf8_decode(canonical_text(record.instruction));
  std::size_t clauses = 1;
  for (char32_t c : text) clauses += kDelimiters.find(c) != std::u32string::npos ? 1 : 0;
  const double length_term =
      std::min(1.0, static_cast<double>(text.size()) / static_cast<double>(std::max<std::size_t>(cfg_.reference_length, 1)));
  const double clause_term =
      std::min(1.0, static_cast<double>(clauses) / static_cast<double>(std::max<std::size_t>(cfg_.reference_clauses, 1)));
  return clamp01(0.5 * length_term + 0.5 * clause_term);
}

double euclidean_distance(const Embedding& a, const Embedding& b) {
  if (a.dims() != b.dims()) fail(ErrorCode::kInput, "euclidean_distance dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dims(); ++i) {
    const double d = a.values[i] - b.values[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::vector<std::size_t> k_center_select(const std::vector<Embedding>& items, std::size_t k,
                                         const std::vector<double>& qualities) {
  const std::size_t n = items.size();
  if (k < 1 || k > n) {
    fail(ErrorCode::kInput, "k-center needs 1 <= k <= " + std::to_string(n) + ", got " + std::to_string(k));
  }
  if (qualities.size() != n) fail(ErrorCode::kInput, "k-center needs one quality per item");

  std::size_t seed = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (qualities[i] > qualities[seed]) seed = i;
  }
  std::vector<std::size_t> selected{seed};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);
  chosen[seed] = true;
  while (selected.size() < k) {
    const Embedding& last = items[selected.back()];
    std::size_t best = n;
    double best_distance = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      nearest[i] = std::min(nearest[i], euclidean_distance(items[i], last));
      if (nearest[i] > best_distance) {
        best_distance = nearest[i];
        best = i;
      }
    }
    chosen[best] = true;
    selected.push_back(best);
  }
  return selected;
}

double covering_radius(const std::vector<Embedding>& items, const std::vector<std::size_t>& selected) {
  if (selected.empty()) fail(ErrorCode::kInput, "covering radius of an empty selection");
  double radius = 0.0;
  for (const auto& item : items) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t s : selected) nearest = std::min(nearest, euclidean_distance(item, items.at(s)));
    radius = std::max(radius, nearest);
  }
  return radius;
}

void CurationConfig::validate() const {
  taxonomy.validate();
  chunking.validate();
  quality.validate();
  if (!(dedup_threshold > 0.0 && dedup_threshold <= 1.0)) {
    fail(ErrorCode::kConfig, "curation.dedup_threshold must lie in (0, 1]");
  }
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    fail(ErrorCode::kConfig, "curation.sample_fraction must lie in (0, 1]");
  }
  if (!(min_quality >= 0.0 && min_quality <= 1.0)) fail(ErrorCode::kConfig, "curation.min_quality must lie in [0, 1]");
  if (!(min_complexity >= 0.0 && min_complexity <= 1.0)) {
    fail(ErrorCode::kConfig, "curation.min_complexity must lie in [0, 1]");
  }
  if (k_center < 1) fail(ErrorCode::kConfig, "curation.k_center must be at least 1");
  if (selection.mode == SelectionMode::kTopFraction && !(selection.value >= 0.0 && selection.value <= 1.0)) {
    fail(ErrorCode::kConfig, "curation.selection_value must lie in [0, 1] for top_fraction");
  }
}

nlohmann::json PipelineReport::to_json() const {
  return nlohmann::json{
      {"n_docs_in", n_docs_in},         {"n_docs", n_docs},
      {"n_split", n_split},             {"n_candidates", n_candidates},
      {"n_generated", n_generated},     {"n_skipped_transport", n_skipped_transport},
      {"n_skipped_malformed", n_skipped_malformed}, {"n_dedup", n_dedup},
      {"n_filtered", n_filtered},       {"n_selected", n_selected},
  };
}

PipelineResult run_pipeline(const std::vector<Document>& docs, const CurationConfig& cfg,
                            TextGenerator& generator, const EmbeddingProvider& embedder,
                            const QualityScorer* quality_scorer, const RecordScorer* record_scorer) {
  cfg.validate();
  const HeuristicQualityScorer default_quality(cfg.quality);
  const HeuristicRecordScorer default_record(cfg.complexity);
  if (quality_scorer == nullptr) quality_scorer = &default_quality;
  if (record_scorer == nullptr) record_scorer = &default_record;

  PipelineResult result;
  PipelineReport& report = result.report;
  Rng rng(cfg.seed);

  // 1. raw text: exact duplicates out, then seeded sampling.
  const auto raw = run_stage("initialize", [&] {
    std::vector<Document> kept;
    std::set<std::string> seen_ids;
    std::set<std::string> seen_texts;
    for (const auto& doc : docs) {
      validate_document(doc);
      if (!seen_ids.insert(doc.doc_id).second) fail(ErrorCode::kInput, "duplicate doc_id " + doc.doc_id);
      if (!seen_texts.insert(canonical_text(doc.text)).second) continue;
      if (rng.uniform01() < cfg.sample_fraction) kept.push_back(doc);
    }
    return kept;
  });
  report.n_docs_in = docs.size();
  report.n_docs = raw.size();

  // 2. ensemble splitting.
  result.segments = run_stage("split", [&] {
    std::vector<Chunk> segments;
    for (const auto& doc : raw) {
      auto split = ensemble_split(doc, cfg.chunking);
      segments.insert(segments.end(), split.begin(), split.end());
    }
    return segments;
  });
  report.n_split = result.segments.size();

  // 3. quality assessment.
  const auto candidates = run_stage("quality", [&] {
    return select_candidates(result.segments, *quality_scorer, cfg.selection);
  });
  report.n_candidates = candidates.size();

  // 4. self-ask.
  const auto generated = run_stage("self-ask", [&] {
    std::vector<InstructionRecord> records;
    SelfAskCounters counters;
    for (const auto& candidate : candidates) {
      if (auto record = self_ask(candidate, cfg.taxonomy, generator, rng, cfg.self_ask, counters)) {
        records.push_back(std::move(*record));
      }
    }
    report.n_skipped_transport = counters.transport_failures;
    report.n_skipped_malformed = counters.malformed_outputs;
    return records;
  });
  report.n_generated = generated.size();

  // 5. dedup, quality/complexity filters, k-center.
  const auto unique = run_stage("dedup", [&] { return dedup(generated, embedder, cfg.dedup_threshold); });
  report.n_dedup = unique.size();

  const auto filtered = run_stage("filter", [&] {
    std::vector<InstructionRecord> kept;
    for (auto record : unique) {
      record.quality = clamp01(record_scorer->quality(record));
      record.complexity = clamp01(record_scorer->complexity(record));
      if (record.quality >= cfg.min_quality && record.complexity >= cfg.min_complexity) {
        kept.push_back(std::move(record));
      }
    }
    return kept;
  });
  report.n_filtered = filtered.size();

  result.records = run_stage("diversity", [&] {
    std::vector<InstructionRecord> selected;
    if (filtered.empty()) return selected;
    std::vector<Embedding> vectors;
    std::vector<double> qualities;
    for (const auto& record : filtered) {
      vectors.push_back(embedder.embed(record.instruction));
      qualities.push_back(record.quality);
    }
    for (std::size_t i : k_center_select(vectors, std::min(cfg.k_center, filtered.size()), qualities)) {
      selected.push_back(filtered[i]);
    }
    std::sort(selected.begin(), selected.end(), [](const InstructionRecord& a, const InstructionRecord& b) {
      return std::tie(a.source_chunk_id, a.instruction) < std::tie(b.source_chunk_id, b.instruction);
    });
    return selected;
  });
  report.n_selected = result.records.size();
  return result;
}

nlohmann::json record_to_json(const InstructionRecord& record) {
  return nlohmann::json{
      {"instruction", record.instruction},
      {"input", record.input},
      {"output", record.output},
      {"source_chunk_id", record.source_chunk_id},
      {"label", {{"dimension", record.label.dimension}, {"type", record.label.type}}},
      {"quality", record.quality},
      {"complexity", record.complexity},
  };
}

std::string records_to_jsonl(const std::vector<InstructionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace plansearch
