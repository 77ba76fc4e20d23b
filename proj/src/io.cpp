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

#include "plansearch/io.hpp"

#include <fstream>

#include "plansearch/error.hpp"

namespace plansearch {

void read_jsonl(const std::string& path, const std::function<void(const nlohmann::json&)>& on_line) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      on_line(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kInput, path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  for (const auto& line : lines) out << line.dump() << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed for " + path);
}

std::vector<Query> load_queries(const std::string& path) {
  std::vector<Query> out;
  read_jsonl(path, [&](const nlohmann::json& j) {
    Query q{j.at("query_id").get<std::string>(), j.at("text").get<std::string>()};
    if (q.query_id.empty()) fail(ErrorCode::kInput, "empty query_id");
    out.push_back(std::move(q));
  });
  return out;
}

void write_queries(const std::vector<Query>& queries, const std::string& path) {
  std::vector<nlohmann::json> lines;
  for (const auto& q : queries) lines.push_back({{"query_id", q.query_id}, {"text", q.text}});
  write_jsonl(path, lines);
}

std::vector<Judgment> load_judgments(const std::string& path) {
  std::vector<Judgment> out;
  read_jsonl(path, [&](const nlohmann::json& j) {
    Judgment judgment;
    judgment.query_id = j.at("query_id").get<std::string>();
    for (const auto& id : j.at("relevant")) judgment.relevant_chunk_ids.insert(id.get<std::string>());
    out.push_back(std::move(judgment));
  });
  return out;
}

void write_judgments(const std::vector<Judgment>& judgments, const std::string& path) {
  std::vector<nlohmann::json> lines;
  for (const auto& j : judgments) lines.push_back({{"query_id", j.query_id}, {"relevant", j.relevant_chunk_ids}});
  write_jsonl(path, lines);
}

std::vector<StsPair> load_sts_pairs(const std::string& path) {
  std::vector<StsPair> out;
  read_jsonl(path, [&](const nlohmann::json& j) {
    out.push_back(StsPair{j.at("a").get<std::string>(), j.at("b").get<std::string>(), j.at("label").get<double>()});
  });
  return out;
}

void write_sts_pairs(const std::vector<StsPair>& pairs, const std::string& path) {
  std::vector<nlohmann::json> lines;
  for (const auto& p : pairs) lines.push_back({{"a", p.a}, {"b", p.b}, {"label", p.label}});
  write_jsonl(path, lines);
}

std::vector<TrainingPair> load_training_pairs(const std::string& path) {
  std::vector<TrainingPair> out;
  read_jsonl(path, [&](const nlohmann::json& j) {
    TrainingPair pair;
    pair.query = j.at("query").get<std::string>();
    pair.positive = j.at("positive").get<std::string>();
    if (j.contains("negatives")) pair.hard_negatives = j.at("negatives").get<std::vector<std::string>>();
    if (pair.query.empty() || pair.positive.empty()) fail(ErrorCode::kInput, "query and positive must be non-empty");
    out.push_back(std::move(pair));
  });
  return out;
}

void write_training_pairs(const std::vector<TrainingPair>& pairs, const std::string& path) {
  std::vector<nlohmann::json> lines;
  for (const auto& p : pairs) {
    lines.push_back({{"query", p.query}, {"positive", p.positive}, {"negatives", p.hard_negatives}});
  }
  write_jsonl(path, lines);
}

}  // namespace plansearch
