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

// Rule-based audit of a risk prediction against its source text.
//
// Symptom phrases are matched longest-first over normalized tokens. A match is
// negated when a negation cue ends within the kNegationWindow tokens before it
// and no scope terminator sits between the cue and the match. The report
// flags a high-risk prediction with no surviving symptom mention
// (hallucination guard) and symptom mentions without any time anchor
// (temporal ambiguity). Reports only annotate; the prediction is untouched.

#ifndef CVDRISK_VERIFY_H_
#define CVDRISK_VERIFY_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cvdrisk/forest.h"

namespace cvdrisk {

inline constexpr size_t kNegationWindow = 5;

using Phrase = std::vector<std::string>;  // normalized tokens

struct SymptomEntry {
  std::string name;
  std::vector<Phrase> phrases;
  double weight = 1.0;  // (0, 1]
};

class Lexicon {
 public:
  // Phrases are normalized on load. Throws Error(kParse / kInvalidArgument).
  static Lexicon FromJson(const nlohmann::json& j);
  static Lexicon Parse(std::string_view json_text);
  static Lexicon Load(const std::filesystem::path& path);
  // The curated lexicon shipped with the project (data/lexicon.json).
  static const Lexicon& Builtin();

  const std::vector<SymptomEntry>& symptoms() const { return symptoms_; }
  const std::vector<Phrase>& negation_cues() const { return negation_cues_; }
  const std::vector<Phrase>& temporal_anchors() const { return temporal_anchors_; }
  const std::vector<Phrase>& scope_terminators() const { return scope_terminators_; }

 private:
  std::vector<SymptomEntry> symptoms_;
  std::vector<Phrase> negation_cues_;
  std::vector<Phrase> temporal_anchors_;
  std::vector<Phrase> scope_terminators_;
};

struct SymptomMatch {
  std::string symptom;  // canonical name
  std::string phrase;   // surface phrase as matched
  size_t begin = 0;     // token span [begin, end)
  size_t end = 0;
  double weight = 1.0;
  bool negated = false;
  bool temporally_anchored = false;

  bool operator==(const SymptomMatch&) const = default;
};

enum class Advisory { kConsistent, kReviewRecommended };

std::string_view AdvisoryName(Advisory advisory);

struct VerificationReport {
  std::vector<SymptomMatch> matches;
  bool temporal_ambiguity = false;
  bool hallucination_flag = false;
  Advisory advisory = Advisory::kConsistent;
};

// Tokens of a normalized text (single-space separated).
std::vector<std::string> VerifierTokens(std::string_view text);

// Longest-match-first, non-overlapping. Expects normalized text.
std::vector<SymptomMatch> MatchSymptoms(std::string_view text, const Lexicon& lex);

// Sets `negated` on each match.
std::vector<SymptomMatch> DetectNegation(std::string_view text, std::vector<SymptomMatch> matches,
                                         const Lexicon& lex);

// True iff some match is not negated and no temporal anchor occurs anywhere in
// the text. Also sets `temporally_anchored` on matches whose clause holds an
// anchor.
bool DetectTemporalAmbiguity(std::string_view text, std::vector<SymptomMatch>& matches,
                             const Lexicon& lex);

// Normalizes raw text, then runs the three passes above.
VerificationReport VerifyPrediction(std::string_view text, const Prediction& pred,
                                    const Lexicon& lex);

nlohmann::ordered_json VerificationToJson(const VerificationReport& report);

}  // namespace cvdrisk

#endif  // CVDRISK_VERIFY_H_
