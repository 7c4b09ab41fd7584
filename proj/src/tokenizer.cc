// Copyright 2026 The cvdrisk Authors.
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

#include "cvdrisk/tokenizer.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <fstream>
#include <sstream>

#include "cvdrisk/error.h"

namespace cvdrisk {
namespace {

bool IsWhitespace(UChar32 c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || u_isUWhiteSpace(c);
}

bool IsControl(UChar32 c) {
  if (c == '\t' || c == '\n' || c == '\r') return false;
  const int8_t type = u_charType(c);
  return type == U_CONTROL_CHAR || type == U_FORMAT_CHAR;
}

// ASCII symbols count as punctuation alongside Unicode P* categories, the
// convention clinical BERT vocabularies were built with.
bool IsPunctuation(UChar32 c) {
  if ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
      (c >= 123 && c <= 126)) {
    return true;
  }
  return u_ispunct(c);
}

void AppendUtf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, c, error);
  if (!error) out.append(buf, len);
}

// Byte offsets of each code point start in a valid UTF-8 string, plus the
// end offset.
std::vector<size_t> CodePointOffsets(std::string_view s) {
  std::vector<size_t> offsets;
  int32_t i = 0;
  const int32_t n = static_cast<int32_t>(s.size());
  while (i < n) {
    offsets.push_back(static_cast<size_t>(i));
    UChar32 c;
    U8_NEXT(s.data(), i, n, c);
  }
  offsets.push_back(s.size());
  return offsets;
}

}  // namespace

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  Vocabulary vocab;
  vocab.index_.reserve(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vocabulary: empty token at line " + std::to_string(i + 1));
    }
    auto [it, inserted] =
        vocab.index_.emplace(tokens[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vocabulary: duplicate token '" + tokens[i] + "' at line " +
                      std::to_string(i + 1));
    }
  }
  vocab.entries_ = std::move(tokens);
  auto special = [&](std::string_view name) {
    auto id = vocab.Find(name);
    if (!id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vocabulary: missing special token " + std::string(name));
    }
    return *id;
  };
  vocab.cls_ = special(kClsToken);
  vocab.sep_ = special(kSepToken);
  vocab.unk_ = special(kUnkToken);
  vocab.pad_ = special(kPadToken);
  return vocab;
}

Vocabulary Vocabulary::Parse(std::string_view content) {
  std::vector<std::string> tokens;
  size_t start = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    tokens.emplace_back(line);
    start = end + 1;
  }
  return FromTokens(std::move(tokens));
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open vocabulary " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t TokenSequence::length() const {
  size_t n = 0;
  for (uint8_t m : attention_mask) n += m;
  return n;
}

std::string Normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u.toLower(icu::Locale::getRoot());
  if (U_SUCCESS(status)) {
    icu::UnicodeString composed = nfc->normalize(u, status);
    if (U_SUCCESS(status)) u = composed;
  }

  std::string out;
  out.reserve(text.size() + 8);
  bool pending_space = false;
  auto put = [&](UChar32 c) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    AppendUtf8(out, c);
  };
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    i = u.moveIndex32(i, 1);
    if (IsWhitespace(c)) {
      pending_space = true;
    } else if (IsControl(c)) {
      continue;
    } else if (IsPunctuation(c)) {
      pending_space = true;
      put(c);
      pending_space = true;
    } else {
      put(c);
    }
  }
  return out;
}

std::vector<std::string> SplitWords(std::string_view normalized) {
  std::vector<std::string> words;
  size_t start = 0;
  while (start < normalized.size()) {
    size_t end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    if (end > start) words.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return words;
}

std::vector<std::string> WordPiece(std::string_view word,
                                   const Vocabulary& vocab) {
  if (word.empty()) return {};
  const std::vector<size_t> offsets = CodePointOffsets(word);
  const size_t n_chars = offsets.size() - 1;

  std::vector<std::string> pieces;
  std::string candidate;
  size_t start = 0;
  while (start < n_chars) {
    const size_t longest = std::min(n_chars, start + kMaxPieceChars);
    bool found = false;
    for (size_t end = longest; end > start; --end) {
      candidate.clear();
      if (start > 0) candidate = kContinuationPrefix;
      candidate.append(word.substr(offsets[start], offsets[end] - offsets[start]));
      if (vocab.Contains(candidate)) {
        pieces.push_back(candidate);
        start = end;
        found = true;
        break;
      }
    }
    if (!found) return {std::string(kUnkToken)};
  }
  return pieces;
}

TokenSequence Encode(std::string_view text, const Vocabulary& vocab,
                     size_t max_len) {
  if (max_len < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "encode: max_len must be at least 3, got " +
                    std::to_string(max_len));
  }
  std::vector<std::string> pieces;
  for (const std::string& word : SplitWords(Normalize(text))) {
    for (std::string& piece : WordPiece(word, vocab)) {
      pieces.push_back(std::move(piece));
    }
  }
  if (pieces.size() > max_len - 2) pieces.resize(max_len - 2);

  TokenSequence seq;
  seq.max_len = max_len;
  seq.ids.reserve(max_len);
  seq.tokens.reserve(max_len);
  seq.attention_mask.reserve(max_len);
  auto push = [&](std::string token, TokenId id, uint8_t mask) {
    seq.tokens.push_back(std::move(token));
    seq.ids.push_back(id);
    seq.attention_mask.push_back(mask);
  };
  push(std::string(kClsToken), vocab.cls_id(), 1);
  for (std::string& piece : pieces) {
    const TokenId id = vocab.Find(piece).value_or(vocab.unk_id());
    push(std::move(piece), id, 1);
  }
  push(std::string(kSepToken), vocab.sep_id(), 1);
  while (seq.ids.size() < max_len) push(std::string(kPadToken), vocab.pad_id(), 0);
  return seq;
}

std::string Detokenize(const TokenSequence& seq) {
  std::string out;
  for (size_t i = 0; i < seq.tokens.size(); ++i) {
    if (!seq.attention_mask[i]) break;
    const std::string& tok = seq.tokens[i];
    if (tok == kClsToken || tok == kSepToken || tok == kPadToken) continue;
    if (tok.starts_with(kContinuationPrefix)) {
      out.append(tok, kContinuationPrefix.size());
    } else {
      if (!out.empty()) out.push_back(' ');
      out += tok;
    }
  }
  return out;
}

}  // namespace cvdrisk
