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

/// \file indexing.hpp
/// \brief Flat chunk index: one normalized vector and one keyword set per
/// chunk, searched by exact scan.
///
/// On-disk layout (format version 1):
///   manifest.json  dims, count, embedder fingerprint, build config, CRC32 of vectors.bin
///   vectors.bin    count x dims little-endian float32, row-major
///   keywords.json  chunk_id -> [keyword, ...]
///   chunks.jsonl   one chunk per line in canonical order

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "plansearch/chunking.hpp"
#include "plansearch/core.hpp"
#include "plansearch/embedding.hpp"
#include "plansearch/keywords.hpp"

namespace plansearch {

inline constexpr int kIndexFormatVersion = 1;

struct IndexManifest {
  int format_version = kIndexFormatVersion;
  std::size_t dims = 0;
  std::size_t count = 0;
  std::string embedder_fingerprint;
  ChunkingConfig chunking;
  KeywordConfig keywords;
  std::uint32_t vectors_crc32 = 0;
};

struct IndexBuildConfig {
  ChunkingConfig chunking;
  KeywordConfig keywords;
};

class Index {
 public:
  /// Checks the structural invariants and fills in manifest count/dims/CRC.
  Index(std::vector<Chunk> chunks, std::vector<float> vectors,
        std::map<std::string, KeywordSet> keyword_map, IndexManifest manifest);

  std::size_t size() const noexcept { return chunks_.size(); }
  std::size_t dims() const noexcept { return manifest_.dims; }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  const Chunk& chunk(std::size_t row) const { return chunks_.at(row); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(vectors_).subspan(i * dims(), dims());
  }
  double row_norm(std::size_t i) const { return row_norms_.at(i); }
  const std::vector<float>& vectors() const noexcept { return vectors_; }
  const KeywordSet& keywords(std::size_t row) const;
  const std::map<std::string, KeywordSet>& keyword_map() const noexcept { return keyword_map_; }
  const IndexManifest& manifest() const noexcept { return manifest_; }
  std::optional<std::size_t> find(const std::string& chunk_id) const;

 private:
  std::vector<Chunk> chunks_;
  std::vector<float> vectors_;
  std::map<std::string, KeywordSet> keyword_map_;
  IndexManifest manifest_;
  std::vector<double> row_norms_;
  std::vector<const KeywordSet*> row_keywords_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Splits, embeds and keyword-tags every document. Chunks are ordered by
/// (doc_id, window_size, start).
Index build_index(const std::vector<Document>& docs, const IndexBuildConfig& cfg,
                  const EmbeddingProvider& embedder, const KeywordExtractor& extractor);

/// Re-embeds the chunks of `source` under a different embedder, keeping its
/// chunks and keyword map.
Index reembed_index(const Index& source, const EmbeddingProvider& embedder);

struct Hit {
  std::string chunk_id;
  std::size_t row = 0;
  double score = 0.0;
};

/// Exact cosine scan. Sorted by score desc, then chunk_id asc; min(k, n) hits.
std::vector<Hit> top_k_semantic(const Index& index, const Embedding& query, std::size_t k);

/// Keyword-set similarity scan with the same ordering. Zero-score chunks still
/// fill the result so that it always holds min(k, n) hits. Soft mode needs an
/// embedder.
std::vector<Hit> top_k_keyword(const Index& index, const KeywordSet& query, std::size_t k,
                               KeywordSimilarityMode mode = KeywordSimilarityMode::kJaccard,
                               const EmbeddingProvider* embedder = nullptr);

/// Cosine similarity between `query` and stored row `row`, accumulated in double.
double row_cosine(const Index& index, std::size_t row, const Embedding& query);

/// Throws kConfig when the index was built under a different embedder.
void check_fingerprint(const Index& index, const EmbeddingProvider& embedder);

void save_index(const Index& index, const std::string& dir);
Index load_index(const std::string& dir);

std::uint32_t crc32_of(std::span<const unsigned char> bytes);

}  // namespace plansearch
