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

/// \file text.hpp
/// \brief Unicode handling shared by every text-consuming module.
///
/// All offsets in this project are counted in Unicode scalar values. Text is
/// normalized to NFC and lowercased with root-locale rules before tokenizing,
/// so results never depend on the process locale.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace plansearch {

/// Decodes UTF-8 into scalar values. Throws kInput on malformed input.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

/// Number of scalar values in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

/// NFC, root-locale lowercase, surrounding whitespace stripped.
std::string normalize_text(std::string_view text);

/// normalize_text plus internal whitespace runs collapsed to one space.
std::string canonical_text(std::string_view text);

/// 64-bit FNV-1a over the raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

struct Token {
  std::string text;
  /// Produced from a script written without spaces (Han, kana, Thai, ...);
  /// such tokens are single characters.
  bool char_level = false;
  /// True when nothing but whitespace separates this token from the previous
  /// one. Punctuation and symbols break adjacency.
  bool adjacent_to_prev = false;
};

/// Tokenizes already-normalized text. Whitespace separates words; punctuation
/// and symbols separate words and break adjacency; characters from scripts
/// without word spacing become one token each.
std::vector<Token> tokenize(std::string_view normalized);

/// Convenience: normalize then tokenize, returning only token strings.
std::vector<std::string> token_strings(std::string_view text);

/// Joins two adjacent tokens into a bigram: concatenated when both are
/// character-level, space-separated otherwise.
std::string join_bigram(const Token& left, const Token& right);

using StopwordList = std::unordered_set<std::string>;

/// Parses a plain-text stopword list: one entry per line, '#' comments.
StopwordList parse_stopwords(std::string_view contents);
StopwordList load_stopwords(const std::string& path);
/// The bundled English + Chinese lists.
const StopwordList& default_stopwords();

}  // namespace plansearch
