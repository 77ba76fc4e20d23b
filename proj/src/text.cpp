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

#include "plansearch/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <fstream>
#include <sstream>

#include "plansearch/error.hpp"
#include "plansearch/stopwords_data.hpp"

namespace plansearch {
namespace {

bool is_unspaced_script(UChar32 c) {
  UErrorCode status = U_ZERO_ERROR;
  const UScriptCode script = uscript_getScript(c, &status);
  if (U_FAILURE(status)) return false;
  switch (script) {
    case USCRIPT_HAN:
    case USCRIPT_HIRAGANA:
    case USCRIPT_KATAKANA:
    case USCRIPT_THAI:
    case USCRIPT_LAO:
    case USCRIPT_KHMER:
    case USCRIPT_MYANMAR:
    case USCRIPT_TIBETAN:
      return true;
    default:
      return false;
  }
}

bool is_separator_symbol(UChar32 c) {
  if (u_ispunct(c)) return true;
  const auto category = u_charType(c);
  return category == U_MATH_SYMBOL || category == U_CURRENCY_SYMBOL ||
         category == U_MODIFIER_SYMBOL || category == U_OTHER_SYMBOL ||
         category == U_CONTROL_CHAR;
}

std::string trim_whitespace(std::string_view text) {
  std::u32string decoded = utf8_decode(text);
  std::size_t begin = 0;
  std::size_t end = decoded.size();
  while (begin < end && u_isUWhiteSpace(static_cast<UChar32>(decoded[begin]))) ++begin;
  while (end > begin && u_isUWhiteSpace(static_cast<UChar32>(decoded[end - 1]))) --end;
  return utf8_encode(std::u32string_view(decoded).substr(begin, end - begin));
}

}  // namespace

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) fail(ErrorCode::kInput, "invalid UTF-8 at byte " + std::to_string(i));
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buffer[4];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buffer, n, 4, static_cast<UChar32>(c), error);
    if (error) fail(ErrorCode::kInput, "invalid scalar value in text");
    out.append(reinterpret_cast<const char*>(buffer), static_cast<std::size_t>(n));
  }
  return out;
}

std::size_t utf8_length(std::string_view text) { return utf8_decode(text).size(); }

std::string normalize_text(std::string_view text) {
  // Validate first so malformed input is reported rather than replaced.
  utf8_decode(text);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) fail(ErrorCode::kInput, "NFC normalizer unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  source.toLower(icu::Locale::getRoot());
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) fail(ErrorCode::kInput, "NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return trim_whitespace(out);
}

std::string canonical_text(std::string_view text) {
  const std::u32string decoded = utf8_decode(normalize_text(text));
  std::u32string collapsed;
  bool in_space = false;
  for (char32_t c : decoded) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !collapsed.empty()) collapsed.push_back(U' ');
    in_space = false;
    collapsed.push_back(c);
  }
  return utf8_encode(collapsed);
}

std::vector<Token> tokenize(std::string_view normalized) {
  std::vector<Token> tokens;
  std::u32string word;
  bool adjacency = false;  // may the next token join the previous one?

  auto flush = [&] {
    if (word.empty()) return;
    tokens.push_back(Token{utf8_encode(word), false, adjacency});
    word.clear();
    adjacency = true;
  };

  for (char32_t ch : utf8_decode(normalized)) {
    const auto c = static_cast<UChar32>(ch);
    if (u_isUWhiteSpace(c)) {
      flush();
    } else if (is_separator_symbol(c)) {
      flush();
      adjacency = false;
    } else if (is_unspaced_script(c)) {
      flush();
      tokens.push_back(Token{utf8_encode(std::u32string(1, ch)), true, adjacency});
      adjacency = true;
    } else {
      word.push_back(ch);
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> token_strings(std::string_view text) {
  std::vector<std::string> out;
  for (auto& token : tokenize(normalize_text(text))) out.push_back(std::move(token.text));
  return out;
}

std::string join_bigram(const Token& left, const Token& right) {
  if (left.char_level && right.char_level) return left.text + right.text;
  return left.text + " " + right.text;
}

StopwordList parse_stopwords(std::string_view contents) {
  StopwordList words;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string entry = normalize_text(line);
    if (entry.empty() || entry.front() == '#') continue;
    words.insert(entry);
  }
  return words;
}

StopwordList load_stopwords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read stopword list " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_stopwords(buffer.str());
}

const StopwordList& default_stopwords() {
  static const StopwordList words = [] {
    StopwordList merged = parse_stopwords(detail::kStopwordsEn);
    merged.merge(parse_stopwords(detail::kStopwordsZh));
    return merged;
  }();
  return words;
}

}  // namespace plansearch
