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

#include "plansearch/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "plansearch/error.hpp"
#include "plansearch/rng.hpp"
#include "plansearch/text.hpp"

namespace plansearch {
namespace {

constexpr std::string_view kConsonants = "bcdfghjklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string numbered(const char* prefix, std::size_t i) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s%03zu", prefix, i);
  return buffer;
}

/// `count` distinct pseudo-words not present in `taken`; adds them to `taken`.
std::vector<std::string> fresh_words(Rng& rng, std::size_t count, std::size_t min_syllables,
                                     std::size_t max_syllables, std::set<std::string>& taken) {
  std::vector<std::string> out;
  const auto& stopwords = default_stopwords();
  while (out.size() < count) {
    const std::size_t syllables = min_syllables + rng.uniform_index(max_syllables - min_syllables + 1);
    std::string word = pseudo_word(rng, syllables);
    if (stopwords.count(word) || !taken.insert(word).second) continue;
    out.push_back(std::move(word));
  }
  return out;
}

/// Joins words with single spaces and records the scalar-value span of each.
struct Assembled {
  std::string text;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
};

Assembled assemble(const std::vector<std::string>& words) {
  Assembled out;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) {
      out.text += ' ';
      ++offset;
    }
    const std::size_t len = utf8_length(words[i]);
    out.spans.emplace_back(offset, offset + len);
    out.text += words[i];
    offset += len;
  }
  return out;
}

std::string join_words(const std::vector<std::string>& words) { return assemble(words).text; }

}  // namespace

std::string pseudo_word(Rng& rng, std::size_t syllables) {
  std::string word;
  for (std::size_t s = 0; s < syllables; ++s) {
    word += kConsonants[rng.uniform_index(kConsonants.size())];
    word += kVowels[rng.uniform_index(kVowels.size())];
  }
  if (rng.uniform_index(2) == 1) word += kConsonants[rng.uniform_index(kConsonants.size())];
  return word;
}

std::vector<Query> RetrievalSuite::plain_queries() const {
  std::vector<Query> out;
  for (const auto& q : queries) out.push_back(q.query);
  return out;
}

RetrievalSuite make_keyword_suite(const KeywordSuiteConfig& cfg) {
  if (cfg.n_queries > cfg.n_docs) fail(ErrorCode::kConfig, "keyword suite needs n_queries <= n_docs");
  Rng rng(cfg.seed);
  std::set<std::string> taken;
  const auto vocabulary = fresh_words(rng, cfg.vocabulary_size, 2, 3, taken);

  RetrievalSuite suite;
  std::vector<std::vector<std::string>> markers;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> marker_spans;
  for (std::size_t d = 0; d < cfg.n_docs; ++d) {
    const auto triple = fresh_words(rng, 3, 4, 4, taken);
    std::vector<std::string> words;
    for (std::size_t w = 0; w < cfg.words_per_doc; ++w) words.push_back(vocabulary[rng.uniform_index(vocabulary.size())]);

    // Plant the triple at distinct word slots, spread over the document.
    std::vector<std::size_t> slots;
    for (std::size_t r = 0; r < cfg.marker_repeats; ++r) {
      const std::size_t band = words.size() / std::max<std::size_t>(cfg.marker_repeats, 1);
      slots.push_back(r * band + rng.uniform_index(std::max<std::size_t>(band, 1)));
    }
    std::vector<std::string> planted;
    std::vector<std::size_t> marker_word_positions;
    for (std::size_t w = 0; w <= words.size(); ++w) {
      for (std::size_t slot : slots) {
        if (slot == w) {
          for (const auto& m : triple) {
            marker_word_positions.push_back(planted.size());
            planted.push_back(m);
          }
        }
      }
      if (w < words.size()) planted.push_back(words[w]);
    }
    const Assembled doc_text = assemble(planted);
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (std::size_t i = 0; i < marker_word_positions.size(); i += 3) {
      spans.emplace_back(doc_text.spans[marker_word_positions[i]].first,
                         doc_text.spans[marker_word_positions[i + 2]].second);
    }
    suite.docs.push_back(Document{numbered("doc-", d), "", doc_text.text, {}});
    markers.push_back(triple);
    marker_spans.push_back(std::move(spans));
  }

  std::vector<std::size_t> order(cfg.n_docs);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t q = 0; q < cfg.n_queries; ++q) {
    const std::size_t d = order[q];
    SyntheticQuery sq;
    sq.query.query_id = numbered("q-", q);
    sq.doc_id = suite.docs[d].doc_id;
    sq.relevant_spans = marker_spans[d];
    sq.exact_marker = q % 2 == 0;
    std::vector<std::string> words = markers[d];
    if (!sq.exact_marker) {
      for (std::size_t n = 0; n < cfg.noise_words; ++n) {
        std::size_t other = rng.uniform_index(cfg.n_docs);
        if (other == d) other = (other + 1) % cfg.n_docs;
        const auto other_words = token_strings(suite.docs[other].text);
        std::string word = other_words[rng.uniform_index(other_words.size())];
        const std::size_t at = rng.uniform_index(words.size() + 1);
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), std::move(word));
      }
    }
    sq.query.text = join_words(words);
    suite.queries.push_back(std::move(sq));
  }
  return suite;
}

RetrievalSuite make_semantic_suite(const SemanticSuiteConfig& cfg) {
  if (cfg.query_words == 0 || cfg.query_words > cfg.words_per_doc) {
    fail(ErrorCode::kConfig, "semantic suite needs 0 < query_words <= words_per_doc");
  }
  if (cfg.n_queries > cfg.n_docs) fail(ErrorCode::kConfig, "semantic suite needs n_queries <= n_docs");
  Rng rng(cfg.seed);
  std::set<std::string> taken;
  const auto vocabulary = fresh_words(rng, cfg.vocabulary_size, 2, 3, taken);

  RetrievalSuite suite;
  std::vector<std::vector<std::string>> doc_words;
  std::vector<Assembled> assembled;
  for (std::size_t d = 0; d < cfg.n_docs; ++d) {
    std::vector<std::string> words;
    for (std::size_t w = 0; w < cfg.words_per_doc; ++w) words.push_back(vocabulary[rng.uniform_index(vocabulary.size())]);
    assembled.push_back(assemble(words));
    suite.docs.push_back(Document{numbered("doc-", d), "", assembled.back().text, {}});
    doc_words.push_back(std::move(words));
  }

  std::vector<std::size_t> order(cfg.n_docs);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t q = 0; q < cfg.n_queries; ++q) {
    const std::size_t d = order[q];
    const std::size_t first = rng.uniform_index(cfg.words_per_doc - cfg.query_words + 1);
    std::vector<std::string> window(doc_words[d].begin() + static_cast<std::ptrdiff_t>(first),
                                    doc_words[d].begin() + static_cast<std::ptrdiff_t>(first + cfg.query_words));
    std::size_t i = 0;
    while (i + 1 < window.size()) {
      if (rng.uniform01() < cfg.swap_probability) {
        std::swap(window[i], window[i + 1]);
        i += 2;
      } else {
        i += 1;
      }
    }
    SyntheticQuery sq;
    sq.query.query_id = numbered("q-", q);
    sq.query.text = join_words(window);
    sq.doc_id = suite.docs[d].doc_id;
    sq.relevant_spans = {{assembled[d].spans[first].first, assembled[d].spans[first + cfg.query_words - 1].second}};
    suite.queries.push_back(std::move(sq));
  }
  return suite;
}

std::vector<Judgment> resolve_judgments(const Index& index, const std::vector<SyntheticQuery>& queries) {
  std::vector<Judgment> out;
  for (const auto& q : queries) {
    Judgment j{q.query.query_id, {}};
    for (const auto& chunk : index.chunks()) {
      if (chunk.doc_id != q.doc_id) continue;
      for (const auto& [start, end] : q.relevant_spans) {
        if (chunk.start < end && start < chunk.end) {
          j.relevant_chunk_ids.insert(chunk.chunk_id);
          break;
        }
      }
    }
    if (j.relevant_chunk_ids.empty()) {
      fail(ErrorCode::kEvaluation, "query " + q.query.query_id + " has no relevant chunk in the index");
    }
    out.push_back(std::move(j));
  }
  return out;
}

StsSuite make_sts_suite(const StsSuiteConfig& cfg) {
  Rng rng(cfg.seed);
  std::set<std::string> taken;
  const auto filler = fresh_words(rng, cfg.filler_vocabulary, 1, 1, taken);
  const auto content = fresh_words(rng, cfg.content_vocabulary, 3, 3, taken);

  auto make_text = [&] {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < cfg.content_words; ++i) words.push_back(content[rng.uniform_index(content.size())]);
    for (std::size_t i = 0; i < cfg.filler_words; ++i) words.push_back(filler[rng.uniform_index(filler.size())]);
    rng.shuffle(words);
    return join_words(words);
  };
  PerturbationConfig dropout;
  dropout.kind = PerturbationKind::kDropout;
  dropout.probability = cfg.dropout;

  // Draws texts until `count` of them survive perturbation.
  auto perturbed_pairs = [&](std::size_t count) {
    std::vector<TrainingPair> pairs;
    while (pairs.size() < count) {
      std::vector<std::string> texts;
      for (std::size_t i = pairs.size(); i < count; ++i) texts.push_back(make_text());
      auto generated = generate_positive_pairs(texts, dropout, rng.next());
      for (auto& p : generated.pairs) pairs.push_back(std::move(p));
    }
    return pairs;
  };

  StsSuite suite;
  suite.train = perturbed_pairs(cfg.n_train);
  const auto held_out = perturbed_pairs(cfg.n_test);
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    if (i % 2 == 0) {
      suite.test.push_back(StsPair{held_out[i].query, held_out[i].positive, 1.0});
    } else {
      const auto& other = held_out[(i + 1) % held_out.size()];
      suite.test.push_back(StsPair{held_out[i].query, other.positive, 0.0});
    }
  }
  return suite;
}

}  // namespace plansearch
