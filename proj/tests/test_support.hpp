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

// Shared fixtures for the unit tests.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "plansearch/embedding.hpp"
#include "plansearch/error.hpp"

namespace plansearch::testing {

/// Embeds texts by table lookup; unknown texts are an input error.
class TableEmbedder final : public EmbeddingProvider {
 public:
  TableEmbedder(std::size_t dims, std::map<std::string, std::vector<double>> table)
      : dims_(dims), table_(std::move(table)) {}

  std::size_t dims() const override { return dims_; }
  std::string fingerprint() const override { return "table:d" + std::to_string(dims_); }
  Embedding embed(std::string_view text) const override {
    const auto it = table_.find(std::string(text));
    if (it == table_.end()) fail(ErrorCode::kInput, "no table entry for \"" + std::string(text) + "\"");
    return make_normalized(it->second);
  }

 private:
  std::size_t dims_;
  std::map<std::string, std::vector<double>> table_;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("plansearch_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = "") const { return child.empty() ? path_.string() : (path_ / child).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

/// HTTP server on a free loopback port, running on a background thread.
class MockServer {
 public:
  MockServer() = default;
  ~MockServer() { stop(); }

  httplib::Server& http() { return server_; }

  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int port() const { return port_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

/// Random unit vector of `dims` components.
inline Embedding random_unit(std::mt19937_64& gen, std::size_t dims) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dims);
  for (auto& x : v) x = normal(gen);
  return make_normalized(std::move(v));
}

}  // namespace plansearch::testing
