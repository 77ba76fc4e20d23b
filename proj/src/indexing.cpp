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

#include "plansearch/indexing.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "plansearch/error.hpp"

namespace plansearch {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

bool canonical_less(const Chunk& a, const Chunk& b) {
  return std::tie(a.doc_id, a.window_size, a.start) < std::tie(b.doc_id, b.window_size, b.start);
}

std::vector<unsigned char> vectors_to_bytes(const std::vector<float>& vectors) {
  std::vector<unsigned char> bytes(vectors.size() * 4);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto word = std::bit_cast<std::uint32_t>(vectors[i]);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<unsigned char>(word >> (8 * b));
  }
  return bytes;
}

std::vector<float> vectors_from_bytes(std::span<const unsigned char> bytes) {
  std::vector<float> vectors(bytes.size() / 4);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    std::uint32_t word = 0;
    for (int b = 0; b < 4; ++b) word |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
    vectors[i] = std::bit_cast<float>(word);
  }
  return vectors;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

json manifest_to_json(const IndexManifest& m) {
  return json{
      {"format_version", m.format_version},
      {"dims", m.dims},
      {"count", m.count},
      {"embedder_fingerprint", m.embedder_fingerprint},
      {"chunking", {{"window_sizes", m.chunking.window_sizes}, {"overlap", m.chunking.overlap}}},
      {"keywords", {{"k", m.keywords.k}, {"query_k", m.keywords.query_k},
                    {"mmr_lambda", m.keywords.mmr_lambda},
                    {"stopwords_path", m.keywords.stopwords_path}}},
      {"vectors_crc32", m.vectors_crc32},
  };
}

IndexManifest manifest_from_json(const json& j) {
  IndexManifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != kIndexFormatVersion) {
    fail(ErrorCode::kVersionMismatch, "index format version " + std::to_string(m.format_version) +
                                          " is not supported (expected " +
                                          std::to_string(kIndexFormatVersion) + ")");
  }
  m.dims = j.at("dims").get<std::size_t>();
  m.count = j.at("count").get<std::size_t>();
  m.embedder_fingerprint = j.at("embedder_fingerprint").get<std::string>();
  m.chunking.window_sizes = j.at("chunking").at("window_sizes").get<std::vector<std::size_t>>();
  m.chunking.overlap = j.at("chunking").at("overlap").get<std::size_t>();
  m.keywords.k = j.at("keywords").at("k").get<std::size_t>();
  m.keywords.query_k = j.at("keywords").at("query_k").get<std::size_t>();
  m.keywords.mmr_lambda = j.at("keywords").at("mmr_lambda").get<double>();
  m.keywords.stopwords_path = j.at("keywords").value("stopwords_path", std::string{});
  m.vectors_crc32 = j.at("vectors_crc32").get<std::uint32_t>();
  return m;
}

template <typename ScoreFn>
std::vector<Hit> rank_rows(const Index& index, std::size_t k, ScoreFn score) {
  std::vector<Hit> hits;
  hits.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    hits.push_back(Hit{index.chunk(i).chunk_id, i, score(i)});
  }
  const std::size_t keep = std::min(k, hits.size());
  auto better = [](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.chunk_id < b.chunk_id;
  };
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), better);
  hits.resize(keep);
  return hits;
}

}  // namespace

std::uint32_t crc32_of(std::span<const unsigned char> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t piece = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = crc32(crc, bytes.data() + offset, static_cast<uInt>(piece));
    offset += piece;
  }
  return static_cast<std::uint32_t>(crc);
}

Index::Index(std::vector<Chunk> chunks, std::vector<float> vectors,
             std::map<std::string, KeywordSet> keyword_map, IndexManifest manifest)
    : chunks_(std::move(chunks)),
      vectors_(std::move(vectors)),
      keyword_map_(std::move(keyword_map)),
      manifest_(std::move(manifest)) {
  const std::size_t n = chunks_.size();
  if (n == 0) fail(ErrorCode::kInput, "an index needs at least one chunk");
  if (vectors_.size() % n != 0 || vectors_.empty()) {
    fail(ErrorCode::kInput, "vector matrix does not have one row per chunk");
  }
  const std::size_t dims = vectors_.size() / n;
  if (manifest_.dims != 0 && manifest_.dims != dims) {
    fail(ErrorCode::kInput, "manifest dims disagree with the vector matrix");
  }
  if (keyword_map_.size() != n) fail(ErrorCode::kInput, "keyword map does not have one entry per chunk");
  manifest_.dims = dims;
  manifest_.count = n;
  manifest_.vectors_crc32 = crc32_of(vectors_to_bytes(vectors_));

  row_norms_.resize(n);
  row_keywords_.resize(n);
  by_id_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !canonical_less(chunks_[i - 1], chunks_[i])) {
      fail(ErrorCode::kInput, "chunks are not in canonical (doc_id, window_size, start) order at " +
                                  chunks_[i].chunk_id);
    }
    double norm_sq = 0.0;
    for (float v : row(i)) norm_sq += static_cast<double>(v) * v;
    row_norms_[i] = std::sqrt(norm_sq);
    if (!(std::abs(row_norms_[i] - 1.0) < 1e-5)) {
      fail(ErrorCode::kInput, "vector row for " + chunks_[i].chunk_id + " is not normalized");
    }
    auto it = keyword_map_.find(chunks_[i].chunk_id);
    if (it == keyword_map_.end()) fail(ErrorCode::kInput, "no keyword set for " + chunks_[i].chunk_id);
    row_keywords_[i] = &it->second;
    if (!by_id_.emplace(chunks_[i].chunk_id, i).second) {
      fail(ErrorCode::kInput, "duplicate chunk id " + chunks_[i].chunk_id);
    }
  }
}

const KeywordSet& Index::keywords(std::size_t row) const { return *row_keywords_.at(row); }

std::optional<std::size_t> Index::find(const std::string& chunk_id) const {
  auto it = by_id_.find(chunk_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

Index build_index(const std::vector<Document>& docs, const IndexBuildConfig& cfg,
                  const EmbeddingProvider& embedder, const KeywordExtractor& extractor) {
  if (docs.empty()) fail(ErrorCode::kInput, "no documents to index");
  cfg.chunking.validate();
  std::set<std::string> seen;
  for (const auto& doc : docs) {
    validate_document(doc);
    if (!seen.insert(doc.doc_id).second) fail(ErrorCode::kInput, "duplicate doc_id " + doc.doc_id);
  }

  std::vector<Chunk> chunks;
  for (const auto& doc : docs) {
    auto split = ensemble_split(doc, cfg.chunking);
    chunks.insert(chunks.end(), std::make_move_iterator(split.begin()),
                  std::make_move_iterator(split.end()));
  }
  std::sort(chunks.begin(), chunks.end(), canonical_less);

  const std::size_t dims = embedder.dims();
  std::vector<float> vectors;
  vectors.reserve(chunks.size() * dims);
  std::map<std::string, KeywordSet> keyword_map;
  for (const auto& chunk : chunks) {
    Embedding e;
    try {
      e = embedder.embed(chunk.text);
    } catch (const Error& err) {
      fail(ErrorCode::kBuild, "embedding chunk " + chunk.chunk_id + " failed: " + err.what());
    }
    if (e.dims() != dims) fail(ErrorCode::kBuild, "embedder returned wrong dims for " + chunk.chunk_id);
    for (double v : e.values) vectors.push_back(static_cast<float>(v));
    try {
      keyword_map.emplace(chunk.chunk_id, extractor.extract(chunk.text, cfg.keywords.k));
    } catch (const Error& err) {
      fail(ErrorCode::kBuild, "keyword extraction for chunk " + chunk.chunk_id + " failed: " + err.what());
    }
  }

  IndexManifest manifest;
  manifest.embedder_fingerprint = embedder.fingerprint();
  manifest.chunking = cfg.chunking;
  std::sort(manifest.chunking.window_sizes.begin(), manifest.chunking.window_sizes.end());
  manifest.chunking.window_sizes.erase(
      std::unique(manifest.chunking.window_sizes.begin(), manifest.chunking.window_sizes.end()),
      manifest.chunking.window_sizes.end());
  manifest.keywords = cfg.keywords;
  return Index(std::move(chunks), std::move(vectors), std::move(keyword_map), std::move(manifest));
}

Index reembed_index(const Index& source, const EmbeddingProvider& embedder) {
  std::vector<float> vectors;
  vectors.reserve(source.size() * embedder.dims());
  for (const auto& chunk : source.chunks()) {
    Embedding e;
    try {
      e = embedder.embed(chunk.text);
    } catch (const Error& err) {
      fail(ErrorCode::kBuild, "embedding chunk " + chunk.chunk_id + " failed: " + err.what());
    }
    for (double v : e.values) vectors.push_back(static_cast<float>(v));
  }
  IndexManifest manifest = source.manifest();
  manifest.dims = 0;
  manifest.embedder_fingerprint = embedder.fingerprint();
  return Index(source.chunks(), std::move(vectors), source.keyword_map(), std::move(manifest));
}

double row_cosine(const Index& index, std::size_t row, const Embedding& query) {
  const auto r = index.row(row);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) sum += static_cast<double>(r[i]) * query.values[i];
  const double q_norm = query.normalized ? 1.0 : std::sqrt(dot(query.values, query.values));
  return sum / (index.row_norm(row) * q_norm);
}

std::vector<Hit> top_k_semantic(const Index& index, const Embedding& query, std::size_t k) {
  if (query.dims() != index.dims()) {
    fail(ErrorCode::kInput, "query dims " + std::to_string(query.dims()) + " do not match index dims " +
                                std::to_string(index.dims()));
  }
  if (!query.normalized && dot(query.values, query.values) == 0.0) {
    fail(ErrorCode::kNumeric, "query embedding is a zero vector");
  }
  return rank_rows(index, k, [&](std::size_t i) { return row_cosine(index, i, query); });
}

std::vector<Hit> top_k_keyword(const Index& index, const KeywordSet& query, std::size_t k,
                               KeywordSimilarityMode mode, const EmbeddingProvider* embedder) {
  if (mode == KeywordSimilarityMode::kSoft) {
    if (embedder == nullptr) fail(ErrorCode::kConfig, "soft keyword similarity needs an embedder");
    return rank_rows(index, k, [&](std::size_t i) {
      return soft_keyword_similarity(query, index.keywords(i), *embedder);
    });
  }
  return rank_rows(index, k, [&](std::size_t i) { return keyword_set_similarity(query, index.keywords(i)); });
}

void check_fingerprint(const Index& index, const EmbeddingProvider& embedder) {
  if (index.manifest().embedder_fingerprint != embedder.fingerprint()) {
    fail(ErrorCode::kConfig, "index was built with embedder \"" + index.manifest().embedder_fingerprint +
                                 "\" but the query embedder is \"" + embedder.fingerprint() + "\"");
  }
}

void save_index(const Index& index, const std::string& dir) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());

  const auto bytes = vectors_to_bytes(index.vectors());
  write_file(root / "vectors.bin",
             std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  write_file(root / "manifest.json", manifest_to_json(index.manifest()).dump(2) + "\n");

  json keywords = json::object();
  for (const auto& [chunk_id, set] : index.keyword_map()) keywords[chunk_id] = set.keywords;
  write_file(root / "keywords.json", keywords.dump(2) + "\n");

  std::string lines;
  for (const auto& c : index.chunks()) {
    lines += json{{"chunk_id", c.chunk_id}, {"doc_id", c.doc_id}, {"window_size", c.window_size},
                  {"start", c.start}, {"end", c.end}, {"text", c.text}}
                 .dump();
    lines += '\n';
  }
  write_file(root / "chunks.jsonl", lines);
}

Index load_index(const std::string& dir) {
  const fs::path root(dir);
  IndexManifest manifest;
  try {
    manifest = manifest_from_json(json::parse(read_file(root / "manifest.json")));
  } catch (const json::exception& e) {
    fail(ErrorCode::kInput, "malformed manifest.json: " + std::string(e.what()));
  }
  if (manifest.count == 0 || manifest.dims == 0) fail(ErrorCode::kInput, "index manifest describes an empty index");

  const std::string raw = read_file(root / "vectors.bin");
  const std::size_t expected = manifest.count * manifest.dims * 4;
  if (raw.size() < expected) {
    fail(ErrorCode::kTruncated, "vectors.bin holds " + std::to_string(raw.size()) + " bytes, expected " +
                                    std::to_string(expected));
  }
  if (raw.size() > expected) fail(ErrorCode::kInput, "vectors.bin is longer than the manifest says");
  const std::span<const unsigned char> bytes(reinterpret_cast<const unsigned char*>(raw.data()), raw.size());
  if (crc32_of(bytes) != manifest.vectors_crc32) fail(ErrorCode::kChecksum, "vectors.bin failed its CRC32 check");

  std::vector<Chunk> chunks;
  {
    std::istringstream in(read_file(root / "chunks.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto j = json::parse(line);
        Chunk c;
        c.chunk_id = j.at("chunk_id").get<std::string>();
        c.doc_id = j.at("doc_id").get<std::string>();
        c.window_size = j.at("window_size").get<std::size_t>();
        c.start = j.at("start").get<std::size_t>();
        c.end = j.at("end").get<std::size_t>();
        c.text = j.at("text").get<std::string>();
        chunks.push_back(std::move(c));
      } catch (const json::exception& e) {
        fail(ErrorCode::kInput, "malformed chunks.jsonl line: " + std::string(e.what()));
      }
    }
  }
  if (chunks.size() < manifest.count) fail(ErrorCode::kTruncated, "chunks.jsonl has fewer chunks than the manifest");
  if (chunks.size() > manifest.count) fail(ErrorCode::kInput, "chunks.jsonl has more chunks than the manifest");

  std::map<std::string, KeywordSet> keyword_map;
  try {
    const auto j = json::parse(read_file(root / "keywords.json"));
    for (const auto& [chunk_id, list] : j.items()) {
      keyword_map[chunk_id] = KeywordSet{list.get<std::vector<std::string>>()};
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kInput, "malformed keywords.json: " + std::string(e.what()));
  }

  const std::uint32_t stored_crc = manifest.vectors_crc32;
  Index index(std::move(chunks), vectors_from_bytes(bytes), std::move(keyword_map), std::move(manifest));
  if (index.manifest().vectors_crc32 != stored_crc) fail(ErrorCode::kChecksum, "vector checksum mismatch after decode");
  return index;
}

}  // namespace plansearch
