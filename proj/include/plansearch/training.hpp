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

/// \file training.hpp
/// \brief Contrastive fine-tuning of a projection head on a frozen encoder.
///
/// Loss for one query with candidates c_0..c_N (the positive among them):
///
///   z_i  = cos(h_q, h_i) / tau,   Q = softmax(z)
///   loss = -log Q[pos] + lambda * KL(P || Q)
///
/// where h = normalize(W x + b) under the trainable head and P is the same
/// softmax computed under the frozen head. The KL term keeps the fine-tuned
/// candidate distribution close to the pre-trained one.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "plansearch/embedding.hpp"
#include "plansearch/generator.hpp"

namespace plansearch {

struct TrainingPair {
  std::string query;
  std::string positive;
  std::vector<std::string> hard_negatives;
};

enum class OptimizerKind { kSgd, kAdam };

struct TrainConfig {
  double tau = 0.05;
  double lambda = 0.5;
  double learning_rate = 1e-2;
  std::size_t epochs = 5;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

/// Softmax output: strictly positive, sums to one.
struct CandidateDistribution {
  std::vector<double> probabilities;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

double infonce_kl_loss(const Embedding& h_q, const std::vector<Embedding>& candidates,
                       std::size_t positive_index, const CandidateDistribution& frozen,
                       double tau, double lambda);

CandidateDistribution frozen_distribution(const Embedding& h_q_frozen,
                                          const std::vector<Embedding>& candidates_frozen,
                                          double tau);

/// One query with its candidates, all as base-encoder embeddings, and the
/// frozen-head distribution over those candidates.
struct TrainingExample {
  Embedding query;
  std::vector<Embedding> candidates;
  std::size_t positive_index = 0;
  CandidateDistribution frozen;
};

struct HeadGradient {
  std::vector<double> weights;
  std::optional<std::vector<double>> bias;
};

struct LossAndGradient {
  double loss = 0.0;
  HeadGradient gradient;
};

/// Mean loss over `examples` under `head`.
double batch_loss(std::span<const TrainingExample> examples, const ProjectionHead& head,
                  double tau, double lambda);

/// Mean loss and its analytic gradient with respect to the head parameters.
/// Throws kNumeric naming the offending example index on non-finite values.
LossAndGradient batch_loss_and_gradient(std::span<const TrainingExample> examples,
                                        const ProjectionHead& head, double tau, double lambda);

/// Caches base-encoder embeddings by text.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(const EmbeddingProvider& base) : base_(base) {}
  const Embedding& get(const std::string& text);

 private:
  const EmbeddingProvider& base_;
  std::unordered_map<std::string, Embedding> cache_;
};

/// Candidates per pair: its positive (index 0), its hard negatives, then the
/// positives of the other pairs in the batch that differ from its own.
std::vector<TrainingExample> make_examples(std::span<const TrainingPair> batch,
                                           EmbeddingCache& cache, const ProjectionHead& frozen,
                                           double tau);

HeadGradient loss_gradient(std::span<const TrainingPair> batch, const ProjectionHead& head,
                           const EmbeddingProvider& base, const ProjectionHead& frozen,
                           const TrainConfig& cfg);

struct TrainResult {
  ProjectionHead head;
  std::vector<double> epoch_losses;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Starts from the frozen head and runs `cfg.epochs` passes of seeded
/// shuffled mini-batches. Throws kTraining with epoch and step on divergence.
TrainResult train(std::span<const TrainingPair> pairs, const EmbeddingProvider& base,
                  const ProjectionHead& frozen, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

enum class PerturbationKind { kDropout, kSwap, kRewrite, kExplain };

struct PerturbationConfig {
  PerturbationKind kind = PerturbationKind::kDropout;
  double probability = 0.1;
  /// Required for kRewrite and kExplain.
  TextGenerator* generator = nullptr;
  std::string rewrite_template = "Rewrite the following text without changing its meaning:\n{text}";
  std::string explain_template = "Explain the following term or sentence:\n{text}";
};

struct PositivePairs {
  std::vector<TrainingPair> pairs;
  std::size_t skipped = 0;
};

/// Builds (text, perturbed text) pairs. Dropout draws one uniform per token
/// and drops it when the draw is below p; swap walks left to right and swaps a
/// token with its successor when the draw is below p, skipping past the
/// swapped pair. Texts without whitespace perturb per character. Pairs whose
/// positive comes out empty, or whose generator call fails, are skipped.
PositivePairs generate_positive_pairs(const std::vector<std::string>& texts,
                                      const PerturbationConfig& strategy, std::uint64_t seed);

}  // namespace plansearch
