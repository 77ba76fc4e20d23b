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
#include <string>
#include <vector>

namespace plansearch {

struct Document {
  std::string doc_id;
  std::string title;
  std::string text;
  std::map<std::string, std::string> metadata;
};

/// A contiguous span [start, end) of a document, in scalar values, produced by
/// splitting with a given window size.
struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  std::size_t window_size = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
};

/// A recalled chunk with every score that went into its final rank.
struct ScoredChunk {
  Chunk chunk;
  double semantic_score = 0.0;
  double keyword_score = 0.0;
  std::size_t overlap_count = 0;
  double cross_score = 0.0;
  double final_score = 0.0;
};

/// Renders "doc_id#w{window_size}@{start}".
std::string make_chunk_id(const std::string& doc_id, std::size_t window_size, std::size_t start);

/// Throws kInput unless doc_id is non-empty and text is valid, non-empty UTF-8.
void validate_document(const Document& doc);

/// Reads every regular file under `dir` as a UTF-8 document whose id is the
/// '/'-separated relative path. Result is sorted by doc_id.
std::vector<Document> load_documents_dir(const std::string& dir);

/// Reads JSON-lines records {"id","title","text","metadata"}; blank lines are
/// skipped.
std::vector<Document> load_documents_jsonl(const std::string& path);

/// Directory or .jsonl file, whichever `path` is.
std::vector<Document> load_documents(const std::string& path);

void write_documents_jsonl(const std::vector<Document>& docs, const std::string& path);

}  // namespace plansearch
