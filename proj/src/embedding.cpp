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

#include "plansearch/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "http_client.hpp"
#include "plansearch/error.hpp"
#include "plansearch/text.hpp"

namespace plansearch {
namespace {

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

}  // namespace

Embedding make_normalized(std::vector<double> values) {
  double norm_sq = 0.0;
  for (double v : values) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  if (!std::isfinite(norm)) fail(ErrorCode::kNumeric, "embedding has non-finite entries");
  if (norm == 0.0) fail(ErrorCode::kNumeric, "cannot normalize a zero vector");
  for (double& v : values) v /= norm;
  return Embedding{std::move(values), true};
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double cosine_sim(const Embedding& a, const Embedding& b) {
  if (a.dims() != b.dims()) {
    fail(ErrorCode::kInput, "cosine_sim dimension mismatch: " + std::to_string(a.dims()) +
                                " vs " + std::to_string(b.dims()));
  }
  const double ab = dot(a.values, b.values);
  if (a.normalized && b.normalized) return ab;
  const double denom = std::sqrt(dot(a.values, a.values)) * std::sqrt(dot(b.values, b.values));
  if (denom == 0.0) fail(ErrorCode::kNumeric, "cosine_sim of a zero vector");
  return ab / denom;
}

std::vector<Embedding> EmbeddingProvider::embed_batch(const std::vector<std::string>& texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(embed(text));
  return out;
}

// --- HashEmbedder -----------------------------------------------------------

HashEmbedder::HashEmbedder(std::size_t dims) : dims_(dims) {
  if (dims_ == 0) fail(ErrorCode::kConfig, "hash embedder dims must be positive");
}

std::string HashEmbedder::fingerprint() const {
  return "hash-fnv1a64-v1:d" + std::to_string(dims_);
}

std::vector<std::string> HashEmbedder::features(std::string_view text) {
  std::vector<std::string> out;
  for (const Token& token : tokenize(normalize_text(text))) {
    out.push_back("w:" + token.text);
    const std::u32string wrapped = U"<" + utf8_decode(token.text) + U">";
    for (std::size_t i = 0; i + 3 <= wrapped.size(); ++i) {
      out.push_back("c:" + utf8_encode(std::u32string_view(wrapped).substr(i, 3)));
    }
  }
  return out;
}

Embedding HashEmbedder::embed(std::string_view text) const {
  if (text.empty()) fail(ErrorCode::kInput, "cannot embed empty text");
  std::vector<double> values(dims_, 0.0);
  for (const auto& feature : features(text)) {
    const std::uint64_t h = fnv1a64(feature);
    values[h % dims_] += (h >> 63) ? -1.0 : 1.0;
  }
  bool all_zero = true;
  for (double v : values) all_zero = all_zero && v == 0.0;
  if (all_zero) {
    const std::string normalized = normalize_text(text);
    const std::uint64_t h = fnv1a64("t:" + (normalized.empty() ? std::string(text) : normalized));
    values[h % dims_] = 1.0;
  }
  return make_normalized(std::move(values));
}

// --- RemoteEmbedder ---------------------------------------------------------

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) fail(ErrorCode::kConfig, "embedding.endpoint is required for the remote provider");
  if (options_.dims == 0) fail(ErrorCode::kConfig, "embedding.dims must be positive");
}

std::string RemoteEmbedder::fingerprint() const {
  return "remote:" + options_.endpoint + ":d" + std::to_string(options_.dims);
}

Embedding RemoteEmbedder::embed(std::string_view text) const {
  return embed_batch({std::string(text)}).front();
}

std::vector<Embedding> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  for (const auto& text : texts) {
    if (text.empty()) fail(ErrorCode::kInput, "cannot embed empty text");
  }
  const nlohmann::json reply = detail::post_json(
      options_.endpoint, "/embed", nlohmann::json{{"texts", texts}},
      detail::HttpOptions{options_.timeout_ms, options_.max_retries, options_.backoff_ms});

  std::vector<Embedding> out;
  try {
    const auto dims = reply.at("dims").get<std::size_t>();
    if (dims != options_.dims) {
      fail(ErrorCode::kMalformedResponse, "remote embedder returned dims " + std::to_string(dims) +
                                              ", expected " + std::to_string(options_.dims));
    }
    const auto& rows = reply.at("embeddings");
    if (!rows.is_array() || rows.size() != texts.size()) {
      fail(ErrorCode::kMalformedResponse, "remote embedder returned the wrong number of embeddings");
    }
    for (const auto& row : rows) {
      auto values = row.get<std::vector<double>>();
      if (values.size() != dims) fail(ErrorCode::kMalformedResponse, "embedding row has the wrong length");
      out.push_back(make_normalized(std::move(values)));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedResponse, std::string("remote embedder response: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNumeric) fail(ErrorCode::kMalformedResponse, e.what());
    throw;
  }
  return out;
}

// --- ProjectionHead ---------------------------------------------------------

ProjectionHead ProjectionHead::identity(std::size_t dims, bool with_bias) {
  ProjectionHead head;
  head.d_in = dims;
  head.d_out = dims;
  head.weights.assign(dims * dims, 0.0);
  for (std::size_t i = 0; i < dims; ++i) head.at(i, i) = 1.0;
  if (with_bias) head.bias = std::vector<double>(dims, 0.0);
  return head;
}

void ProjectionHead::validate() const {
  if (d_in == 0 || d_out == 0) fail(ErrorCode::kInput, "projection head dims must be positive");
  if (weights.size() != d_in * d_out) fail(ErrorCode::kInput, "projection head W has the wrong size");
  if (bias && bias->size() != d_out) fail(ErrorCode::kInput, "projection head b has the wrong size");
  for (double w : weights) {
    if (!std::isfinite(w)) fail(ErrorCode::kInput, "projection head W has non-finite entries");
  }
  if (bias) {
    for (double v : *bias) {
      if (!std::isfinite(v)) fail(ErrorCode::kInput, "projection head b has non-finite entries");
    }
  }
}

std::vector<double> apply_head(const ProjectionHead& head, std::span<const double> input) {
  std::vector<double> out(head.d_out, 0.0);
  for (std::size_t r = 0; r < head.d_out; ++r) {
    out[r] = dot(std::span<const double>(head.weights).subspan(r * head.d_in, head.d_in), input);
    if (head.bias) out[r] += (*head.bias)[r];
  }
  return out;
}

Embedding project(const ProjectionHead& head, const Embedding& e) {
  if (e.dims() != head.d_in) {
    fail(ErrorCode::kInput, "projection expects dims " + std::to_string(head.d_in) + ", got " +
                                std::to_string(e.dims()));
  }
  return make_normalized(apply_head(head, e.values));
}

nlohmann::json head_to_json(const ProjectionHead& head) {
  nlohmann::json j;
  j["d_in"] = head.d_in;
  j["d_out"] = head.d_out;
  j["W"] = head.weights;
  if (head.bias) j["b"] = *head.bias;
  return j;
}

ProjectionHead head_from_json(const nlohmann::json& j) {
  ProjectionHead head;
  try {
    head.d_in = j.at("d_in").get<std::size_t>();
    head.d_out = j.at("d_out").get<std::size_t>();
    head.weights = j.at("W").get<std::vector<double>>();
    if (j.contains("b") && !j.at("b").is_null()) head.bias = j.at("b").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInput, std::string("malformed projection head: ") + e.what());
  }
  head.validate();
  return head;
}

ProjectionHead load_head(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read projection head " + path);
  try {
    return head_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInput, path + ": " + e.what());
  }
}

void save_head(const ProjectionHead& head, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write projection head " + path);
  out << head_to_json(head).dump() << '\n';
}

// --- ProjectedEmbedder ------------------------------------------------------

ProjectedEmbedder::ProjectedEmbedder(std::shared_ptr<const EmbeddingProvider> base,
                                     ProjectionHead head)
    : base_(std::move(base)), head_(std::move(head)) {
  head_.validate();
  if (head_.d_in != base_->dims()) {
    fail(ErrorCode::kConfig, "projection head d_in " + std::to_string(head_.d_in) +
                                 " does not match base embedder dims " +
                                 std::to_string(base_->dims()));
  }
}

std::string ProjectedEmbedder::fingerprint() const {
  return "projected(" + base_->fingerprint() + "):" + hex64(fnv1a64(head_to_json(head_).dump()));
}

Embedding ProjectedEmbedder::embed(std::string_view text) const {
  return project(head_, base_->embed(text));
}

std::vector<Embedding> ProjectedEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  auto base = base_->embed_batch(texts);
  for (auto& e : base) e = project(head_, e);
  return base;
}

}  // namespace plansearch
