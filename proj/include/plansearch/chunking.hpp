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
#include <vector>

#include "plansearch/core.hpp"

namespace plansearch {

/// Window sizes and the overlap between consecutive windows of the same size,
/// both in Unicode scalar values.
struct ChunkingConfig {
  std::vector<std::size_t> window_sizes{200, 400};
  std::size_t overlap = 50;

  /// Throws kConfig unless window_sizes is non-empty, all positive, and
  /// overlap < min(window_sizes).
  void validate() const;
};

/// Splits `doc` at every configured window size. For each size w, chunks start
/// at multiples of (w - overlap) and the last one is clipped at the document
/// end. Output is ordered by (window_size, start).
std::vector<Chunk> ensemble_split(const Document& doc, const ChunkingConfig& cfg);

}  // namespace plansearch
