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

/// \file curation.hpp
/// \brief Instruction-data curation: split, score, self-ask, filter, and
/// diversify.
///
/// Stages of run_pipeline, in order:
///   1. raw documents: exact-duplicate removal and seeded sampling
///   2. ensemble splitting into segments
///   3. quality scoring and candidate selection
///   4. self-ask with a label drawn uniformly from the taxonomy
///   5. deduplication, quality/complexity filtering, greedy k-center
///
/// Learned scorers plug in through QualityScorer and RecordScorer; the
/// heuristic defaults keep every stage deterministic.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plansearch/chunking.hpp"
#include "plansearch/core.hpp"
#include "plansearch/embedding.hpp"
#include "plansearch/generator.hpp"
#include "plansearch/rng.hpp"

namespace plansearch {

struct CandidateSegment {
  Chunk segment;
  double quality = 0.0;
};

struct Label {
  std::string dimension;
  std::string type;

  friend bool operator==(const Label&, const Label&) = default;
};

struct InstructionRecord {
  std::string instruction;
  std::string input;
  std::string output;
  std::string source_chunk_id;
  Label label;
  double quality = 0.0;
  double complexity = 0.0;

  friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

struct LabelTaxonomy {
  std::vector<std::string> dimensions;
  std::vector<std::string> types;

  void validate() const;
};

class QualityScorer {
 public:
  virtual ~QualityScorer() = default;
  /// Score in [0, 1].
  virtual double score(const Chunk& segment) const = 0;
};

struct HeuristicQualityConfig {
  std::size_t min_length = 50;    // scalar values
  std::size_t max_length = 2000;
  std::size_t falloff = 50;       // distance outside [min, max] at which the length term hits 0
  double length_weight = 1.0;
  double alnum_weight = 1.0;
  double repetition_weight = 1.0;

  void validate() const;
};

/// Weighted mean of three terms, clamped to [0, 1]:
///   length         1 inside [min, max], falling linearly to 0 over `falloff`
///   alnum          share of alphanumeric characters among non-whitespace ones
///   non-repetition 1 - duplicate share of token trigrams
class HeuristicQualityScorer final : public QualityScorer {
 public:
  explicit HeuristicQualityScorer(HeuristicQualityConfig cfg);

  struct Terms {
    double length = 0.0;
    double alnum = 0.0;
    double non_repetition = 0.0;
  };

  Terms terms(const Chunk& segment) const;
  double score(const Chunk& segment) const override;

 private:
  HeuristicQualityConfig cfg_;
};

double assess_quality(const Chunk& segment, const QualityScorer& scorer);

enum class SelectionMode { kThreshold, kTopFraction };

struct SelectionConfig {
  SelectionMode mode = SelectionMode::kThreshold;
  double value = 0.5;  // minimum quality, or the fraction to keep
};

/// Scores every segment and keeps those at or above the threshold, or the best
/// ceil(fraction * n). Output is ordered by quality desc, then chunk_id.
std::vector<CandidateSegment> select_candidates(const std::vector<Chunk>& segments,
                                                const QualityScorer& scorer,
                                                const SelectionConfig& selection);

enum class ResponseMode {
  kDirect,     // the segment itself is the answer
  kGenerated,  // the segment becomes the input and the generator answers
};

struct SelfAskConfig {
  ResponseMode response_mode = ResponseMode::kDirect;
  std::string instruction_template =
      "You are an urban planning expert. Write one {type} instruction about {dimension} "
      "that the following passage can answer.\nPassage:\n{segment}";
  std::string response_template =
      "Answer the instruction using the passage.\nInstruction: {instruction}\nPassage:\n{segment}";
};

struct SelfAskCounters {
  std::size_t transport_failures = 0;
  std::size_t malformed_outputs = 0;
};

/// Draws a (dimension, type) pair uniformly over the taxonomy grid.
Label sample_label(const LabelTaxonomy& taxonomy, Rng& rng);

/// Returns nothing, and bumps a counter, when the generator fails or answers
/// with blank text.
std::optional<InstructionRecord> self_ask(const CandidateSegment& candidate, const LabelTaxonomy& taxonomy,
                                          TextGenerator& generator, Rng& rng, const SelfAskConfig& cfg,
                                          SelfAskCounters& counters);

/// Greedy near-duplicate removal in (quality desc, source_chunk_id asc) order.
/// A record is dropped when its canonical instruction text equals a kept one or
/// its instruction embedding has cosine >= threshold with a kept one.
std::vector<InstructionRecord> dedup(const std::vector<InstructionRecord>& records,
                                     const EmbeddingProvider& embedder, double threshold);

class RecordScorer {
 public:
  virtual ~RecordScorer() = default;
  virtual double quality(const InstructionRecord& record) const = 0;
  virtual double complexity(const InstructionRecord& record) const = 0;
};

struct HeuristicComplexityConfig {
  std::size_t reference_length = 60;  // instruction length (scalar values) that saturates
  std::size_t reference_clauses = 3;  // clause count that saturates
};

/// Quality passes the segment score through; complexity averages a length term
/// and a clause-count term (1 + number of clause delimiters), each saturating
/// at its reference value.
class HeuristicRecordScorer final : public RecordScorer {
 public:
  explicit HeuristicRecordScorer(HeuristicComplexityConfig cfg = {}) : cfg_(cfg) {}
  double quality(const InstructionRecord& record) const override;
  double complexity(const InstructionRecord& record) const override;

 private:
  HeuristicComplexityConfig cfg_;
};

/// Greedy farthest-point k-center under Euclidean distance. Starts from the
/// highest-quality item and repeatedly adds the item farthest from the chosen
/// set; ties go to the lowest index. Returns indices in selection order.
std::vector<std::size_t> k_center_select(const std::vector<Embedding>& items, std::size_t k,
                                         const std::vector<double>& qualities);

/// Largest distance from any item to its nearest selected item.
double covering_radius(const std::vector<Embedding>& items, const std::vector<std::size_t>& selected);

double euclidean_distance(const Embedding& a, const Embedding& b);

struct CurationConfig {
  ChunkingConfig chunking;
  HeuristicQualityConfig quality;
  SelectionConfig selection;
  LabelTaxonomy taxonomy{{"land use", "transportation", "ecology", "heritage"},
                         {"definition", "explanation", "application"}};
  SelfAskConfig self_ask;
  HeuristicComplexityConfig complexity;
  double dedup_threshold = 0.9;
  double min_quality = 0.0;
  double min_complexity = 0.0;
  std::size_t k_center = 100;
  double sample_fraction = 1.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct PipelineReport {
  std::size_t n_docs_in = 0;
  std::size_t n_docs = 0;  // after raw dedup and sampling
  std::size_t n_split = 0;
  std::size_t n_candidates = 0;
  std::size_t n_generated = 0;
  std::size_t n_skipped_transport = 0;
  std::size_t n_skipped_malformed = 0;
  std::size_t n_dedup = 0;
  std::size_t n_filtered = 0;
  std::size_t n_selected = 0;

  nlohmann::json to_json() const;
};

struct PipelineResult {
  std::vector<InstructionRecord> records;  // sorted by source_chunk_id, then instruction
  std::vector<Chunk> segments;             // every split segment
  PipelineReport report;
};

/// Runs all five stages. Errors are rethrown with the failing stage's name.
PipelineResult run_pipeline(const std::vector<Document>& docs, const CurationConfig& cfg,
                            TextGenerator& generator, const EmbeddingProvider& embedder,
                            const QualityScorer* quality_scorer = nullptr,
                            const RecordScorer* record_scorer = nullptr);

nlohmann::json record_to_json(const InstructionRecord& record);
std::string records_to_jsonl(const std::vector<InstructionRecord>& records);

}  // namespace plansearch
