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

#include "plansearch/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unicode/uchar.h>

#include "plansearch/error.hpp"
#include "plansearch/rng.hpp"
#include "plansearch/text.hpp"

namespace plansearch {
namespace {

double log_sum_exp(std::span<const double> z) {
  const double peak = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

void check_candidates(std::size_t count, std::size_t positive_index, std::size_t frozen_count) {
  if (count == 0) fail(ErrorCode::kInput, "candidate list is empty");
  if (positive_index >= count) {
    fail(ErrorCode::kInput, "positive index " + std::to_string(positive_index) +
                                " out of range for " + std::to_string(count) + " candidates");
  }
  if (frozen_count != count) {
    fail(ErrorCode::kInput, "frozen distribution has " + std::to_string(frozen_count) +
                                " entries for " + std::to_string(count) + " candidates");
  }
}

/// Loss from logits; shared by the public loss and the gradient routine.
double loss_from_logits(std::span<const double> z, std::size_t pos, std::span<const double> p,
                        double lambda) {
  const double lse = log_sum_exp(z);
  double loss = lse - z[pos];
  if (lambda != 0.0) {
    double kl = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (p[i] > 0.0) kl += p[i] * (std::log(p[i]) - (z[i] - lse));
    }
    loss += lambda * kl;
  }
  return loss;
}

struct Projected {
  std::vector<double> unit;  // normalize(W x + b)
  double norm = 0.0;         // |W x + b|
};

Projected forward(const ProjectionHead& head, const Embedding& x) {
  if (x.dims() != head.d_in) {
    fail(ErrorCode::kInput, "example embedding dims " + std::to_string(x.dims()) +
                                " do not match head d_in " + std::to_string(head.d_in));
  }
  Projected out;
  out.unit = apply_head(head, x.values);
  out.norm = std::sqrt(dot(out.unit, out.unit));
  if (!(out.norm > 0.0) || !std::isfinite(out.norm)) {
    fail(ErrorCode::kNumeric, "projection produced a zero or non-finite vector");
  }
  for (double& v : out.unit) v /= out.norm;
  return out;
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

/// Whitespace tokens, or characters when the text has no whitespace.
std::pair<std::vector<std::u32string>, std::u32string> perturbation_units(const std::string& text) {
  const std::u32string decoded = utf8_decode(text);
  std::vector<std::u32string> units;
  std::u32string current;
  bool has_space = false;
  for (char32_t c : decoded) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      has_space = true;
      if (!current.empty()) units.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) units.push_back(std::move(current));
  if (!has_space && units.size() == 1 && units.front().size() > 1) {
    std::vector<std::u32string> chars;
    for (char32_t c : units.front()) chars.emplace_back(1, c);
    return {std::move(chars), U""};
  }
  return {std::move(units), U" "};
}

std::string join_units(const std::vector<std::u32string>& units, const std::u32string& joiner) {
  std::u32string out;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (i > 0) out += joiner;
    out += units[i];
  }
  return utf8_encode(out);
}

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) fail(ErrorCode::kConfig, message);
  };
  require(std::isfinite(tau) && tau > 0.0, "training.tau must be finite and positive");
  require(std::isfinite(lambda) && lambda >= 0.0, "training.lambda must be finite and non-negative");
  require(std::isfinite(learning_rate) && learning_rate >= 0.0,
          "training.learning_rate must be finite and non-negative");
  require(epochs >= 1, "training.epochs must be at least 1");
  require(batch_size >= 1, "training.batch_size must be at least 1");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "training.adam_beta1 must lie in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "training.adam_beta2 must lie in [0, 1)");
  require(adam_epsilon > 0.0, "training.adam_epsilon must be positive");
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) fail(ErrorCode::kInput, "softmax of an empty vector");
  const double lse = log_sum_exp(logits);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = std::exp(logits[i] - lse);
  return out;
}

double infonce_kl_loss(const Embedding& h_q, const std::vector<Embedding>& candidates,
                       std::size_t positive_index, const CandidateDistribution& frozen,
                       double tau, double lambda) {
  check_candidates(candidates.size(), positive_index, frozen.probabilities.size());
  std::vector<double> z(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) z[i] = cosine_sim(h_q, candidates[i]) / tau;
  const double loss = loss_from_logits(z, positive_index, frozen.probabilities, lambda);
  if (!std::isfinite(loss)) fail(ErrorCode::kNumeric, "loss is not finite");
  return loss;
}

CandidateDistribution frozen_distribution(const Embedding& h_q_frozen,
                                          const std::vector<Embedding>& candidates_frozen,
                                          double tau) {
  if (candidates_frozen.empty()) fail(ErrorCode::kInput, "candidate list is empty");
  std::vector<double> z(candidates_frozen.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = cosine_sim(h_q_frozen, candidates_frozen[i]) / tau;
  return CandidateDistribution{softmax(z)};
}

double batch_loss(std::span<const TrainingExample> examples, const ProjectionHead& head,
                  double tau, double lambda) {
  if (examples.empty()) fail(ErrorCode::kInput, "empty batch");
  double total = 0.0;
  for (const auto& ex : examples) {
    const Embedding q{forward(head, ex.query).unit, true};
    std::vector<Embedding> cands;
    for (const auto& c : ex.candidates) cands.push_back(Embedding{forward(head, c).unit, true});
    total += infonce_kl_loss(q, cands, ex.positive_index, ex.frozen, tau, lambda);
  }
  return total / static_cast<double>(examples.size());
}

LossAndGradient batch_loss_and_gradient(std::span<const TrainingExample> examples,
                                        const ProjectionHead& head, double tau, double lambda) {
  if (examples.empty()) fail(ErrorCode::kInput, "empty batch");
  const std::size_t d_in = head.d_in;
  const std::size_t d_out = head.d_out;

  LossAndGradient result;
  result.gradient.weights.assign(d_in * d_out, 0.0);
  if (head.bias) result.gradient.bias = std::vector<double>(d_out, 0.0);
  auto& dW = result.gradient.weights;

  // Pushes dL/dh through h = u/|u| and u = W x + b into the accumulators.
  auto backprop = [&](const Projected& p, const std::vector<double>& dh, const Embedding& x) {
    const double radial = dot(p.unit, dh);
    for (std::size_t r = 0; r < d_out; ++r) {
      const double du = (dh[r] - p.unit[r] * radial) / p.norm;
      if (du == 0.0) continue;
      double* row = dW.data() + r * d_in;
      for (std::size_t c = 0; c < d_in; ++c) row[c] += du * x.values[c];
      if (result.gradient.bias) (*result.gradient.bias)[r] += du;
    }
  };

  for (std::size_t e = 0; e < examples.size(); ++e) {
    const TrainingExample& ex = examples[e];
    const std::size_t m = ex.candidates.size();
    check_candidates(m, ex.positive_index, ex.frozen.probabilities.size());

    const Projected q = forward(head, ex.query);
    std::vector<Projected> cands;
    cands.reserve(m);
    for (const auto& c : ex.candidates) cands.push_back(forward(head, c));

    std::vector<double> z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = dot(q.unit, cands[i].unit) / tau;
    const auto& p = ex.frozen.probabilities;
    const double loss = loss_from_logits(z, ex.positive_index, p, lambda);
    const std::vector<double> probs = softmax(z);
    const double p_mass = std::accumulate(p.begin(), p.end(), 0.0);

    // dL/dz_i = Q_i - [i == pos] + lambda * (Q_i * sum(P) - P_i)
    std::vector<double> dz(m);
    for (std::size_t i = 0; i < m; ++i) {
      dz[i] = probs[i] - (i == ex.positive_index ? 1.0 : 0.0) + lambda * (probs[i] * p_mass - p[i]);
    }

    std::vector<double> dq(d_out, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double g = dz[i] / tau;
      for (std::size_t r = 0; r < d_out; ++r) dq[r] += g * cands[i].unit[r];
    }
    backprop(q, dq, ex.query);
    std::vector<double> dc(d_out);
    for (std::size_t i = 0; i < m; ++i) {
      const double g = dz[i] / tau;
      for (std::size_t r = 0; r < d_out; ++r) dc[r] = g * q.unit[r];
      backprop(cands[i], dc, ex.candidates[i]);
    }

    if (!std::isfinite(loss) || !all_finite(dq)) {
      fail(ErrorCode::kNumeric, "non-finite loss or gradient at pair " + std::to_string(e));
    }
    result.loss += loss;
  }

  const double scale = 1.0 / static_cast<double>(examples.size());
  result.loss *= scale;
  for (double& g : dW) g *= scale;
  if (result.gradient.bias) {
    for (double& g : *result.gradient.bias) g *= scale;
  }
  if (!all_finite(dW) || (result.gradient.bias && !all_finite(*result.gradient.bias))) {
    fail(ErrorCode::kNumeric, "non-finite gradient accumulated over the batch");
  }
  return result;
}

const Embedding& EmbeddingCache::get(const std::string& text) {
  auto it = cache_.find(text);
  if (it == cache_.end()) it = cache_.emplace(text, base_.embed(text)).first;
  return it->second;
}

std::vector<TrainingExample> make_examples(std::span<const TrainingPair> batch,
                                           EmbeddingCache& cache, const ProjectionHead& frozen,
                                           double tau) {
  std::vector<TrainingExample> examples;
  examples.reserve(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const TrainingPair& pair = batch[j];
    if (pair.query.empty() || pair.positive.empty()) {
      fail(ErrorCode::kInput, "training pair " + std::to_string(j) + " has an empty text");
    }
    TrainingExample ex;
    ex.query = cache.get(pair.query);
    ex.candidates.push_back(cache.get(pair.positive));
    for (const auto& neg : pair.hard_negatives) {
      if (neg.empty()) fail(ErrorCode::kInput, "training pair " + std::to_string(j) + " has an empty negative");
      ex.candidates.push_back(cache.get(neg));
    }
    for (std::size_t other = 0; other < batch.size(); ++other) {
      if (other == j || batch[other].positive == pair.positive) continue;
      ex.candidates.push_back(cache.get(batch[other].positive));
    }
    ex.positive_index = 0;

    const Embedding frozen_q = project(frozen, ex.query);
    std::vector<Embedding> frozen_c;
    frozen_c.reserve(ex.candidates.size());
    for (const auto& c : ex.candidates) frozen_c.push_back(project(frozen, c));
    ex.frozen = frozen_distribution(frozen_q, frozen_c, tau);
    examples.push_back(std::move(ex));
  }
  return examples;
}

HeadGradient loss_gradient(std::span<const TrainingPair> batch, const ProjectionHead& head,
                           const EmbeddingProvider& base, const ProjectionHead& frozen,
                           const TrainConfig& cfg) {
  cfg.validate();
  head.validate();
  if (head.d_in != base.dims()) fail(ErrorCode::kInput, "head d_in does not match the base embedder");
  EmbeddingCache cache(base);
  const auto examples = make_examples(batch, cache, frozen, cfg.tau);
  return batch_loss_and_gradient(examples, head, cfg.tau, cfg.lambda).gradient;
}

TrainResult train(std::span<const TrainingPair> pairs, const EmbeddingProvider& base,
                  const ProjectionHead& frozen, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  frozen.validate();
  if (pairs.empty()) fail(ErrorCode::kInput, "no training pairs");
  if (frozen.d_in != base.dims()) {
    fail(ErrorCode::kConfig, "frozen head d_in " + std::to_string(frozen.d_in) +
                                 " does not match base embedder dims " + std::to_string(base.dims()));
  }

  TrainResult result{frozen, {}};
  ProjectionHead& head = result.head;
  EmbeddingCache cache(base);
  Rng rng(cfg.seed);

  // Adam moments, laid out as [W..., b...].
  const std::size_t n_params = head.weights.size() + (head.bias ? head.bias->size() : 0);
  std::vector<double> m1(cfg.optimizer == OptimizerKind::kAdam ? n_params : 0, 0.0);
  std::vector<double> m2(m1.size(), 0.0);
  std::size_t adam_t = 0;

  auto update = [&](const HeadGradient& g) {
    const double lr = cfg.learning_rate;
    if (cfg.optimizer == OptimizerKind::kSgd) {
      for (std::size_t i = 0; i < head.weights.size(); ++i) head.weights[i] -= lr * g.weights[i];
      if (head.bias) {
        for (std::size_t i = 0; i < head.bias->size(); ++i) (*head.bias)[i] -= lr * (*g.bias)[i];
      }
      return;
    }
    ++adam_t;
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_t));
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_t));
    auto step = [&](double& param, double grad, std::size_t slot) {
      m1[slot] = cfg.adam_beta1 * m1[slot] + (1.0 - cfg.adam_beta1) * grad;
      m2[slot] = cfg.adam_beta2 * m2[slot] + (1.0 - cfg.adam_beta2) * grad * grad;
      param -= lr * (m1[slot] / c1) / (std::sqrt(m2[slot] / c2) + cfg.adam_epsilon);
    };
    for (std::size_t i = 0; i < head.weights.size(); ++i) step(head.weights[i], g.weights[i], i);
    if (head.bias) {
      for (std::size_t i = 0; i < head.bias->size(); ++i) {
        step((*head.bias)[i], (*g.bias)[i], head.weights.size() + i);
      }
    }
  };

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_total = 0.0;
    std::size_t step = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++step) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::vector<TrainingPair> batch;
      for (std::size_t i = start; i < stop; ++i) batch.push_back(pairs[order[i]]);
      const auto examples = make_examples(batch, cache, frozen, cfg.tau);
      LossAndGradient lg;
      try {
        lg = batch_loss_and_gradient(examples, head, cfg.tau, cfg.lambda);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumeric) throw;
        fail(ErrorCode::kTraining, "training diverged at epoch " + std::to_string(epoch + 1) +
                                       ", step " + std::to_string(step + 1) + ": " + e.what());
      }
      epoch_total += lg.loss * static_cast<double>(batch.size());
      update(lg.gradient);
    }
    const double mean = epoch_total / static_cast<double>(pairs.size());
    result.epoch_losses.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  return result;
}

PositivePairs generate_positive_pairs(const std::vector<std::string>& texts,
                                      const PerturbationConfig& strategy, std::uint64_t seed) {
  if (texts.empty()) fail(ErrorCode::kInput, "no texts to generate pairs from");
  const bool external = strategy.kind == PerturbationKind::kRewrite ||
                        strategy.kind == PerturbationKind::kExplain;
  if (external && strategy.generator == nullptr) {
    fail(ErrorCode::kConfig, "rewrite/explain perturbations need a generator");
  }
  if (!external && !(strategy.probability >= 0.0 && strategy.probability <= 1.0)) {
    fail(ErrorCode::kConfig, "perturbation probability must lie in [0, 1]");
  }

  Rng rng(seed);
  PositivePairs out;
  for (const auto& text : texts) {
    if (text.empty()) fail(ErrorCode::kInput, "cannot perturb an empty text");
    std::string positive;
    if (external) {
      GenerationRequest request;
      request.kind = strategy.kind == PerturbationKind::kRewrite ? "rewrite" : "explain";
      request.fields["text"] = text;
      request.prompt = render_template(strategy.kind == PerturbationKind::kRewrite
                                           ? strategy.rewrite_template
                                           : strategy.explain_template,
                                       request.fields);
      try {
        positive = strategy.generator->generate(request);
      } catch (const Error&) {
        ++out.skipped;
        continue;
      }
    } else {
      auto [units, joiner] = perturbation_units(text);
      std::vector<std::u32string> kept;
      bool changed = false;
      if (strategy.kind == PerturbationKind::kDropout) {
        for (auto& unit : units) {
          if (rng.uniform01() >= strategy.probability) {
            kept.push_back(std::move(unit));
          } else {
            changed = true;
          }
        }
      } else {
        std::size_t i = 0;
        while (i + 1 < units.size()) {
          if (rng.uniform01() < strategy.probability) {
            changed = changed || units[i] != units[i + 1];
            std::swap(units[i], units[i + 1]);
            i += 2;
          } else {
            i += 1;
          }
        }
        kept = std::move(units);
      }
      // An untouched text keeps its original spacing.
      positive = changed ? join_units(kept, joiner) : text;
    }
    if (canonical_text(positive).empty()) {
      ++out.skipped;
      continue;
    }
    out.pairs.push_back(TrainingPair{text, positive, {}});
  }
  return out;
}

}  // namespace plansearch
