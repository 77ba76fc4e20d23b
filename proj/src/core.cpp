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

#include "plansearch/core.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plansearch/error.hpp"
#include "plansearch/text.hpp"

namespace plansearch {

namespace fs = std::filesystem;

std::string make_chunk_id(const std::string& doc_id, std::size_t window_size, std::size_t start) {
  return doc_id + "#w" + std::to_string(window_size) + "@" + std::to_string(start);
}

void validate_document(const Document& doc) {
  if (doc.doc_id.empty()) fail(ErrorCode::kInput, "document has an empty id");
  if (utf8_length(doc.text) == 0) fail(ErrorCode::kInput, "document " + doc.doc_id + " is empty");
}

std::vector<Document> load_documents_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIo, "not a directory: " + dir);
  std::vector<Document> docs;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot read " + entry.path().string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    Document doc;
    doc.doc_id = fs::relative(entry.path(), dir).generic_string();
    doc.text = buffer.str();
    validate_document(doc);
    docs.push_back(std::move(doc));
  }
  std::sort(docs.begin(), docs.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  return docs;
}

std::vector<Document> load_documents_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Document doc;
      doc.doc_id = j.at("id").get<std::string>();
      doc.title = j.value("title", std::string{});
      doc.text = j.at("text").get<std::string>();
      if (j.contains("metadata")) {
        for (const auto& [key, value] : j.at("metadata").items()) {
          doc.metadata[key] = value.get<std::string>();
        }
      }
      validate_document(doc);
      docs.push_back(std::move(doc));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kInput, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

std::vector<Document> load_documents(const std::string& path) {
  if (fs::is_directory(path)) return load_documents_dir(path);
  return load_documents_jsonl(path);
}

void write_documents_jsonl(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  for (const auto& doc : docs) {
    nlohmann::json j;
    j["id"] = doc.doc_id;
    j["title"] = doc.title;
    j["text"] = doc.text;
    j["metadata"] = doc.metadata;
    out << j.dump() << '\n';
  }
}

}  // namespace plansearch
