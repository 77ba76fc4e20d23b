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

/// \file synthetic.hpp
/// \brief Seeded synthetic corpora for retrieval and embedding benchmarks.
///
/// Words are pronounceable pseudo-words built from syllables, so no suite
/// depends on external data. Every generator is a pure function of its seed.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plansearch/core.hpp"
#include "plansearch/eval.hpp"
#include "plansearch/indexing.hpp"
#include "plansearch/rng.hpp"
#include "plansearch/training.hpp"

namespace plansearch {

/// A query with the document spans (scalar-value offsets) that answer it.
struct SyntheticQuery {
  Query query;
  std::string doc_id;
  std::vector<std::pair<std::size_t, std::size_t>> relevant_spans;
  bool exact_marker = false;
};

struct RetrievalSuite {
  std::vector<Document> docs;
  std::vector<SyntheticQuery> queries;

  std::vector<Query> plain_queries() const;
};

struct KeywordSuiteConfig {
  std::size_t n_docs = 100;
  std::size_t n_queries = 50;
  std::uint64_t seed = 42;
  std::size_t vocabulary_size = 400;
  std::size_t words_per_doc = 60;
  std::size_t marker_repeats = 2;  // times each document's marker triple is planted
  std::size_t noise_words = 4;     // distractor words added to non-exact queries
};

/// Each document is distractor text with a unique marker triple planted
/// `marker_repeats` times. Even-numbered queries are the bare marker triple
/// (exact-marker queries); odd ones add distractor words drawn from other
/// documents. Relevant spans are the planted marker occurrences.
RetrievalSuite make_keyword_suite(const KeywordSuiteConfig& cfg = {});

struct SemanticSuiteConfig {
  std::size_t n_docs = 100;
  std::size_t n_queries = 50;
  std::uint64_t seed = 42;
  std::size_t vocabulary_size = 400;
  std::size_t words_per_doc = 60;
  std::size_t query_words = 10;
  double swap_probability = 0.3;
};

/// Distractor-only documents; each query is an adjacent-swap paraphrase of a
/// word window from one document, and that window is its relevant span.
RetrievalSuite make_semantic_suite(const SemanticSuiteConfig& cfg = {});

/// Chunks of the query's document overlapping any relevant span.
std::vector<Judgment> resolve_judgments(const Index& index, const std::vector<SyntheticQuery>& queries);

struct StsSuiteConfig {
  std::uint64_t seed = 42;
  std::size_t n_train = 500;
  std::size_t n_test = 200;
  std::size_t content_words = 3;
  std::size_t filler_words = 40;
  std::size_t filler_vocabulary = 8;
  std::size_t content_vocabulary = 1500;
  double dropout = 0.6;
};

struct StsSuite {
  std::vector<TrainingPair> train;  // text vs. its dropout perturbation
  std::vector<StsPair> test;        // half positives (label 1), half cross-pairings (label 0)
};

/// Texts mix a few content words with many words from a small shared filler
/// vocabulary, so raw hashed embeddings overrate unrelated texts.
StsSuite make_sts_suite(const StsSuiteConfig& cfg = {});

/// Seeded pseudo-word of `syllables` syllables.
std::string pseudo_word(Rng& rng, std::size_t syllables);

}  // namespace plansearch
