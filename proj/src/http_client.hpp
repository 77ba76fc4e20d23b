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

#include <string>

#include <json.hpp>

namespace plansearch::detail {

struct HttpOptions {
  int timeout_ms = 5000;
  int max_retries = 3;
  int backoff_ms = 100;
};

/// POSTs `body` as JSON to base_url + path and parses the JSON reply.
/// Connection failures and non-200 statuses retry with exponential backoff,
/// then raise kTransport or kTimeout; an unparseable body raises
/// kMalformedResponse immediately.
nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const HttpOptions& options);

}  // namespace plansearch::detail
