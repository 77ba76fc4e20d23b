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

#include "plansearch/chunking.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "plansearch/error.hpp"
#include "plansearch/text.hpp"

namespace plansearch {

void ChunkingConfig::validate() const {
  if (window_sizes.empty()) fail(ErrorCode::kConfig, "chunking.window_sizes must not be empty");
  for (auto w : window_sizes) {
    if (w == 0) fail(ErrorCode::kConfig, "chunking.window_sizes entries must be positive");
  }
  const auto smallest = *std::min_element(window_sizes.begin(), window_sizes.end());
  if (overlap >= smallest) {
    fail(ErrorCode::kConfig, "chunking.overlap (" + std::to_string(overlap) +
                                 ") must be smaller than the smallest window (" +
                                 std::to_string(smallest) + ")");
  }
}

std::vector<Chunk> ensemble_split(const Document& doc, const ChunkingConfig& cfg) {
  cfg.validate();
  const std::u32string text = utf8_decode(doc.text);
  if (text.empty()) fail(ErrorCode::kInput, "document " + doc.doc_id + " is empty");
  const std::size_t length = text.size();

  const std::set<std::size_t> windows(cfg.window_sizes.begin(), cfg.window_sizes.end());
  std::vector<Chunk> chunks;
  for (const std::size_t w : windows) {
    const std::size_t stride = w - cfg.overlap;
    for (std::size_t start = 0;; start += stride) {
      const std::size_t end = std::min(start + w, length);
      Chunk chunk;
      chunk.chunk_id = make_chunk_id(doc.doc_id, w, start);
      chunk.doc_id = doc.doc_id;
      chunk.window_size = w;
      chunk.start = start;
      chunk.end = end;
      chunk.text = utf8_encode(std::u32string_view(text).substr(start, end - start));
      chunks.push_back(std::move(chunk));
      if (end == length) break;
    }
  }
  return chunks;
}

}  // namespace plansearch
