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

#ifndef CVDRISK_TOKENIZER_H_
#define CVDRISK_TOKENIZER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cvdrisk {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kContinuationPrefix = "##";

inline constexpr size_t kDefaultMaxLen = 128;
// Longest subword candidate, in code points, tried by the greedy scan.
inline constexpr size_t kMaxPieceChars = 100;

using TokenId = int32_t;

// Subword vocabulary in the vocab.txt layout: one token per line, id equal to
// the zero-based line number.
class Vocabulary {
 public:
  // Throws Error(kInvalidArgument) on duplicates, empty entries or missing
  // special tokens.
  static Vocabulary FromTokens(std::vector<std::string> tokens);
  static Vocabulary Parse(std::string_view content);
  static Vocabulary Load(const std::filesystem::path& path);

  std::optional<TokenId> Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token).has_value(); }
  const std::string& Token(TokenId id) const { return entries_.at(id); }
  size_t size() const { return entries_.size(); }

  TokenId cls_id() const { return cls_; }
  TokenId sep_id() const { return sep_; }
  TokenId unk_id() const { return unk_; }
  TokenId pad_id() const { return pad_; }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId cls_ = 0, sep_ = 0, unk_ = 0, pad_ = 0;
};

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::string> tokens;
  std::vector<uint8_t> attention_mask;
  size_t max_len = 0;

  // Number of real (unpadded) positions, including [CLS] and [SEP].
  size_t length() const;
};

// NFC, lowercase, drop control characters, isolate punctuation, collapse
// whitespace. Invalid UTF-8 sequences are replaced by U+FFFD.
std::string Normalize(std::string_view text);

// Splits normalized text on single spaces.
std::vector<std::string> SplitWords(std::string_view normalized);

// Greedy longest-match-first WordPiece for one whitespace-free word. Falls
// back to a single [UNK] if any position cannot be matched.
std::vector<std::string> WordPiece(std::string_view word,
                                   const Vocabulary& vocab);

// Throws Error(kInvalidArgument) when max_len < 3.
TokenSequence Encode(std::string_view text, const Vocabulary& vocab,
                     size_t max_len = kDefaultMaxLen);

// Rejoins the non-special tokens of a sequence, gluing "##" pieces.
std::string Detokenize(const TokenSequence& seq);

}  // namespace cvdrisk

#endif  // CVDRISK_TOKENIZER_H_
