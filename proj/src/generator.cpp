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

#include "plansearch/generator.hpp"

#include <algorithm>

#include "http_client.hpp"
#include "plansearch/error.hpp"
#include "plansearch/text.hpp"

namespace plansearch {
namespace {

std::string field_or(const GenerationRequest& request, const std::string& key) {
  auto it = request.fields.find(key);
  return it == request.fields.end() ? std::string{} : it->second;
}

/// First `n` tokens of `text`, joined the way the tokenizer would read them.
std::string leading_tokens(const std::string& text, std::size_t n) {
  const auto tokens = tokenize(normalize_text(text));
  std::string out;
  for (std::size_t i = 0; i < std::min(n, tokens.size()); ++i) {
    if (i > 0 && !(tokens[i - 1].char_level && tokens[i].char_level)) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

}  // namespace

std::string render_template(const std::string& tmpl, const std::map<std::string, std::string>& fields) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string::npos) break;
    const auto close = tmpl.find('}', open);
    if (close == std::string::npos) break;
    out.append(tmpl, pos, open - pos);
    const auto it = fields.find(tmpl.substr(open + 1, close - open - 1));
    if (it != fields.end()) {
      out += it->second;
    } else {
      out.append(tmpl, open, close - open + 1);
    }
    pos = close + 1;
  }
  out.append(tmpl, pos, std::string::npos);
  return out;
}

HttpGenerator::HttpGenerator(std::string endpoint, int timeout_ms, int max_retries)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms), max_retries_(max_retries) {
  if (endpoint_.empty()) fail(ErrorCode::kConfig, "generator endpoint is not configured");
}

std::string HttpGenerator::generate(const GenerationRequest& request) {
  const auto reply = detail::post_json(endpoint_, "/generate", nlohmann::json{{"prompt", request.prompt}},
                                       detail::HttpOptions{timeout_ms_, max_retries_, 100});
  if (!reply.is_object() || !reply.contains("text") || !reply.at("text").is_string()) {
    fail(ErrorCode::kMalformedResponse, "generator reply lacks a string \"text\" field");
  }
  return reply.at("text").get<std::string>();
}

std::string StubGenerator::generate(const GenerationRequest& request) {
  if (request.kind == "instruction") {
    return "[" + field_or(request, "dimension") + " / " + field_or(request, "type") +
           "] What does the passage say about \"" + leading_tokens(field_or(request, "segment"), 6) +
           "\"?";
  }
  if (request.kind == "response") {
    return "Answer to \"" + field_or(request, "instruction") +
           "\": " + leading_tokens(field_or(request, "segment"), 24);
  }
  if (request.kind == "rewrite" || request.kind == "explain") {
    return request.kind + ": " + field_or(request, "text");
  }
  fail(ErrorCode::kInput, "stub generator does not know request kind \"" + request.kind + "\"");
}

}  // namespace plansearch
