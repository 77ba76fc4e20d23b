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

/// \file io.hpp
/// \brief JSON-lines readers and writers for queries, judgments and pairs.
///
/// Formats, one object per line:
///   queries         {"query_id", "text"}
///   judgments       {"query_id", "relevant": [chunk ids]}
///   sts pairs       {"a", "b", "label"}
///   training pairs  {"query", "positive", "negatives": [...]}

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plansearch/eval.hpp"
#include "plansearch/training.hpp"

namespace plansearch {

/// Calls `on_line` for every non-blank line parsed as JSON. Parse and field
/// errors raise kInput prefixed with "path:line".
void read_jsonl(const std::string& path, const std::function<void(const nlohmann::json&)>& on_line);

/// Writes one compact JSON object per line.
void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& lines);

std::vector<Query> load_queries(const std::string& path);
void write_queries(const std::vector<Query>& queries, const std::string& path);

std::vector<Judgment> load_judgments(const std::string& path);
void write_judgments(const std::vector<Judgment>& judgments, const std::string& path);

std::vector<StsPair> load_sts_pairs(const std::string& path);
void write_sts_pairs(const std::vector<StsPair>& pairs, const std::string& path);

std::vector<TrainingPair> load_training_pairs(const std::string& path);
void write_training_pairs(const std::vector<TrainingPair>& pairs, const std::string& path);

}  // namespace plansearch
