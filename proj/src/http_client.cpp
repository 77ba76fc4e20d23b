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

#include "http_client.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "plansearch/error.hpp"

namespace plansearch::detail {

nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const HttpOptions& options) {
  if (base_url.empty()) fail(ErrorCode::kConfig, "remote endpoint is not configured");
  const auto timeout = std::chrono::milliseconds(options.timeout_ms);
  const std::string payload = body.dump();

  ErrorCode last_code = ErrorCode::kTransport;
  std::string last_message;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(options.backoff_ms << (attempt - 1)));
    }
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(path, payload, "application/json");
    if (!result) {
      const auto err = result.error();
      const bool slow = std::chrono::steady_clock::now() - started >= timeout;
      last_code = (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && slow))
                      ? ErrorCode::kTimeout
                      : ErrorCode::kTransport;
      last_message = httplib::to_string(err);
      continue;
    }
    if (result->status != 200) {
      last_code = ErrorCode::kTransport;
      last_message = "HTTP status " + std::to_string(result->status);
      continue;
    }
    try {
      return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kMalformedResponse, base_url + path + ": " + e.what());
    }
  }
  fail(last_code, base_url + path + ": " + last_message);
}

}  // namespace plansearch::detail
