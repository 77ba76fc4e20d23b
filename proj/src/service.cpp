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

#include "plansearch/service.hpp"

#include <cmath>
#include <cstdint>

#include <httplib.h>

#include "plansearch/error.hpp"

namespace plansearch {

struct SearchService::Server {
  httplib::Server http;
};

nlohmann::json scored_chunk_to_json(const ScoredChunk& hit, std::size_t rank) {
  return nlohmann::json{{"rank", rank},
                        {"chunk_id", hit.chunk.chunk_id},
                        {"doc_id", hit.chunk.doc_id},
                        {"final_score", hit.final_score},
                        {"semantic_score", hit.semantic_score},
                        {"keyword_score", hit.keyword_score},
                        {"overlap_count", hit.overlap_count},
                        {"cross_score", hit.cross_score}};
}

SearchService::SearchService(const Index& index, std::shared_ptr<const EmbeddingProvider> embedder,
                             StopwordList stopwords, double mmr_lambda, SearchConfig defaults,
                             std::size_t default_top)
    : index_(index),
      embedder_(std::move(embedder)),
      extractor_(*embedder_, std::move(stopwords), mmr_lambda),
      defaults_(std::move(defaults)),
      default_top_(default_top),
      server_(std::make_unique<Server>()) {
  check_fingerprint(index_, *embedder_);
  defaults_.validate();
}

SearchService::~SearchService() = default;

nlohmann::json SearchService::search(const nlohmann::json& request) const {
  if (!request.is_object()) fail(ErrorCode::kInput, "request body must be a JSON object");
  const auto query = request.find("query");
  if (query == request.end() || !query->is_string() || query->get<std::string>().empty()) {
    fail(ErrorCode::kInput, "\"query\" must be a non-empty string");
  }
  SearchConfig cfg = defaults_;
  std::size_t top = default_top_;
  if (const auto it = request.find("x"); it != request.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1) fail(ErrorCode::kInput, "\"x\" must be a positive integer");
    cfg.x = it->get<std::size_t>();
  }
  if (const auto it = request.find("alpha"); it != request.end()) {
    if (!it->is_number()) fail(ErrorCode::kInput, "\"alpha\" must be a number");
    cfg.alpha = it->get<double>();
    if (!std::isfinite(cfg.alpha) || cfg.alpha < 0.0 || cfg.alpha > 1.0) {
      fail(ErrorCode::kInput, "\"alpha\" must lie in [0, 1]");
    }
  }
  if (const auto it = request.find("top"); it != request.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1) fail(ErrorCode::kInput, "\"top\" must be a positive integer");
    top = it->get<std::size_t>();
  }

  std::unique_ptr<CrossScorer> scorer;
  if (cfg.rerank == RerankMode::kExternal) {
    scorer = std::make_unique<HttpCrossScorer>(cfg.scorer_endpoint, cfg.scorer_timeout_ms);
  }
  const auto response = hierarchical_search(query->get<std::string>(), index_, cfg, *embedder_, extractor_, scorer.get());
  nlohmann::json results = nlohmann::json::array();
  for (std::size_t i = 0; i < response.results.size() && i < top; ++i) {
    auto entry = scored_chunk_to_json(response.results[i], i + 1);
    entry["text"] = response.results[i].chunk.text;
    results.push_back(std::move(entry));
  }
  nlohmann::json out{{"results", std::move(results)}, {"degraded", response.degraded}};
  if (response.degraded) out["degraded_reason"] = response.degraded_reason;
  return out;
}

nlohmann::json SearchService::health() const {
  return nlohmann::json{{"status", "ok"}, {"chunks", index_.size()}, {"dims", index_.dims()}};
}

int SearchService::bind(const std::string& host, int port) {
  auto& http = server_->http;
  http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(health().dump(), "application/json");
  });
  http.Post("/search", [this](const httplib::Request& req, httplib::Response& res) {
    auto reply_error = [&res](int status, const std::string& message) {
      res.status = status;
      res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
    };
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      reply_error(400, "request body is not valid JSON");
      return;
    }
    try {
      res.set_content(search(body).dump(), "application/json");
    } catch (const Error& err) {
      reply_error(err.code() == ErrorCode::kInput ? 400 : 500, err.what());
    }
  });
  const int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void SearchService::run() { server_->http.listen_after_bind(); }

void SearchService::stop() { server_->http.stop(); }

}  // namespace plansearch
