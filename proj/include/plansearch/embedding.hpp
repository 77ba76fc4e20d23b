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

/// \file embedding.hpp
/// \brief Embedding providers and the projection head used for fine-tuning.
///
/// Every provider returns L2-normalized vectors of a fixed dimension and
/// carries a fingerprint that identifies the exact vector space it produces;
/// an index built with one fingerprint refuses queries embedded under another.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace plansearch {

struct Embedding {
  std::vector<double> values;
  bool normalized = false;

  std::size_t dims() const noexcept { return values.size(); }
};

/// L2-normalizes `values`. Throws kNumeric for zero or non-finite input.
Embedding make_normalized(std::vector<double> values);

double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Cosine similarity; exactly the dot product when both inputs are normalized.
/// Throws kInput on dimension mismatch and kNumeric for a zero vector.
double cosine_sim(const Embedding& a, const Embedding& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dims() const = 0;
  virtual std::string fingerprint() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;

  /// Default implementation embeds one text at a time.
  virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const;
};

/// Signed feature hashing of token unigrams ("w:" + token) and character
/// trigrams of each token wrapped as "<token>" ("c:" + trigram). The bucket is
/// fnv1a64(feature) mod dims and the sign is the hash's top bit (set means -1).
/// Text without tokens, or whose features cancel out, falls back to a single
/// "t:" + normalized-text feature.
class HashEmbedder final : public EmbeddingProvider {
 public:
  explicit HashEmbedder(std::size_t dims);

  std::size_t dims() const override { return dims_; }
  std::string fingerprint() const override;
  Embedding embed(std::string_view text) const override;

  /// Feature strings in extraction order, duplicates included.
  static std::vector<std::string> features(std::string_view text);

 private:
  std::size_t dims_;
};

struct RemoteEmbedderOptions {
  std::string endpoint;  // base URL, e.g. "http://127.0.0.1:9000"
  std::size_t dims = 0;
  int timeout_ms = 5000;
  int max_retries = 3;
  int backoff_ms = 100;
};

/// Client for POST {endpoint}/embed with body {"texts": [...]} answering
/// {"embeddings": [[...], ...], "dims": N}. Transport failures, timeouts and
/// malformed responses raise distinct error codes.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteEmbedderOptions options);

  std::size_t dims() const override { return options_.dims; }
  std::string fingerprint() const override;
  Embedding embed(std::string_view text) const override;
  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override;

 private:
  RemoteEmbedderOptions options_;
};

/// Trainable linear map W (d_out x d_in, row-major) plus optional bias.
struct ProjectionHead {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<double> weights;
  std::optional<std::vector<double>> bias;

  static ProjectionHead identity(std::size_t dims, bool with_bias = false);

  /// Throws kInput on shape mismatch or non-finite entries.
  void validate() const;

  double& at(std::size_t row, std::size_t col) { return weights[row * d_in + col]; }
  double at(std::size_t row, std::size_t col) const { return weights[row * d_in + col]; }

  friend bool operator==(const ProjectionHead&, const ProjectionHead&) = default;
};

/// W * e + b before normalization.
std::vector<double> apply_head(const ProjectionHead& head, std::span<const double> input);

/// normalize(W * e + b). Throws kInput on dims mismatch, kNumeric when the
/// result is zero or non-finite.
Embedding project(const ProjectionHead& head, const Embedding& e);

nlohmann::json head_to_json(const ProjectionHead& head);
ProjectionHead head_from_json(const nlohmann::json& j);
ProjectionHead load_head(const std::string& path);
void save_head(const ProjectionHead& head, const std::string& path);

/// Frozen base provider followed by a projection head.
class ProjectedEmbedder final : public EmbeddingProvider {
 public:
  ProjectedEmbedder(std::shared_ptr<const EmbeddingProvider> base, ProjectionHead head);

  std::size_t dims() const override { return head_.d_out; }
  std::string fingerprint() const override;
  Embedding embed(std::string_view text) const override;
  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override;

  const ProjectionHead& head() const noexcept { return head_; }
  const EmbeddingProvider& base() const noexcept { return *base_; }

 private:
  std::shared_ptr<const EmbeddingProvider> base_;
  ProjectionHead head_;
};

}  // namespace plansearch
