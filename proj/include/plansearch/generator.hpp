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

#include <map>
#include <string>

namespace plansearch {

/// One generation call. `prompt` is what goes over the wire; `kind` and
/// `fields` carry the structured inputs the prompt was rendered from so that
/// offline generators can produce deterministic output.
struct GenerationRequest {
  std::string kind;  // "instruction", "response", "rewrite", "explain"
  std::string prompt;
  std::map<std::string, std::string> fields;
};

/// External text generator. Implementations throw Error with kTransport,
/// kTimeout or kMalformedResponse; callers count those as skips.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string generate(const GenerationRequest& request) = 0;
};

/// POST {endpoint}/generate {"prompt": ...} -> {"text": ...}.
class HttpGenerator final : public TextGenerator {
 public:
  HttpGenerator(std::string endpoint, int timeout_ms = 30000, int max_retries = 3);
  std::string generate(const GenerationRequest& request) override;

 private:
  std::string endpoint_;
  int timeout_ms_;
  int max_retries_;
};

/// Deterministic template filler used for offline runs and pipeline tests.
class StubGenerator final : public TextGenerator {
 public:
  std::string generate(const GenerationRequest& request) override;
};

/// Replaces every "{name}" in `tmpl` with fields.at(name); unknown
/// placeholders are left as-is.
std::string render_template(const std::string& tmpl, const std::map<std::string, std::string>& fields);

}  // namespace plansearch
