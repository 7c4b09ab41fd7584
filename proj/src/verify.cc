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

#include "cvdrisk/verify.h"

#include "binary_io.h"
#include "builtin_lexicon.h"
#include "cvdrisk/error.h"
#include "cvdrisk/tokenizer.h"

namespace cvdrisk {
namespace {

using nlohmann::json;

Phrase ToPhrase(const std::string& raw, const char* what) {
  Phrase p = SplitWords(Normalize(raw));
  if (p.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("lexicon: empty ") + what);
  }
  return p;
}

std::vector<Phrase> PhraseList(const json& j, const char* key) {
  std::vector<Phrase> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) {
    throw Error(ErrorCode::kParse, std::string("lexicon: '") + key + "' must be an array");
  }
  for (const json& item : j[key]) {
    if (!item.is_string()) {
      throw Error(ErrorCode::kParse, std::string("lexicon: '") + key + "' entries must be strings");
    }
    out.push_back(ToPhrase(item.get<std::string>(), key));
  }
  return out;
}

bool PhraseAt(const std::vector<std::string>& tokens, size_t pos, const Phrase& phrase) {
  if (pos + phrase.size() > tokens.size()) return false;
  for (size_t k = 0; k < phrase.size(); ++k) {
    if (tokens[pos + k] != phrase[k]) return false;
  }
  return true;
}

struct Occurrence {
  size_t begin, end;
};

std::vector<Occurrence> FindAll(const std::vector<std::string>& tokens,
                                const std::vector<Phrase>& phrases) {
  std::vector<Occurrence> out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    for (const Phrase& p : phrases) {
      if (PhraseAt(tokens, i, p)) out.push_back({i, i + p.size()});
    }
  }
  return out;
}

std::vector<bool> TerminatorMask(const std::vector<std::string>& tokens, const Lexicon& lex) {
  std::vector<bool> mask(tokens.size(), false);
  for (const Occurrence& o : FindAll(tokens, lex.scope_terminators())) {
    for (size_t t = o.begin; t < o.end; ++t) mask[t] = true;
  }
  return mask;
}

std::string Join(const std::vector<std::string>& tokens, size_t begin, size_t end) {
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace

Lexicon Lexicon::FromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "lexicon: expected a JSON object");
  Lexicon lex;
  if (!j.contains("symptoms") || !j["symptoms"].is_array()) {
    throw Error(ErrorCode::kParse, "lexicon: 'symptoms' must be an array");
  }
  for (const json& s : j["symptoms"]) {
    SymptomEntry e;
    if (!s.is_object() || !s.contains("name") || !s["name"].is_string()) {
      throw Error(ErrorCode::kParse, "lexicon: every symptom needs a string 'name'");
    }
    e.name = s["name"].get<std::string>();
    if (!s.contains("phrases") || !s["phrases"].is_array() || s["phrases"].empty()) {
      throw Error(ErrorCode::kParse, "lexicon: symptom '" + e.name + "' needs phrases");
    }
    for (const json& p : s["phrases"]) {
      if (!p.is_string()) throw Error(ErrorCode::kParse, "lexicon: phrases must be strings");
      e.phrases.push_back(ToPhrase(p.get<std::string>(), "phrase"));
    }
    if (s.contains("weight")) {
      if (!s["weight"].is_number()) throw Error(ErrorCode::kParse, "lexicon: weight must be a number");
      e.weight = s["weight"].get<double>();
    }
    if (!(e.weight > 0.0 && e.weight <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "lexicon: weight of '" + e.name + "' must be in (0, 1]");
    }
    lex.symptoms_.push_back(std::move(e));
  }
  lex.negation_cues_ = PhraseList(j, "negation_cues");
  lex.temporal_anchors_ = PhraseList(j, "temporal_anchors");
  lex.scope_terminators_ = PhraseList(j, "scope_terminators");
  return lex;
}

Lexicon Lexicon::Parse(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("lexicon: invalid JSON: ") + e.what());
  }
  return FromJson(j);
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  try {
    return Parse(binary::ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

const Lexicon& Lexicon::Builtin() {
  static const Lexicon lex = Parse(kBuiltinLexiconJson);
  return lex;
}

std::string_view AdvisoryName(Advisory advisory) {
  return advisory == Advisory::kConsistent ? "consistent" : "review_recommended";
}

std::vector<std::string> VerifierTokens(std::string_view text) { return SplitWords(text); }

std::vector<SymptomMatch> MatchSymptoms(std::string_view text, const Lexicon& lex) {
  const std::vector<std::string> tokens = VerifierTokens(text);
  std::vector<SymptomMatch> matches;
  size_t i = 0;
  while (i < tokens.size()) {
    const SymptomEntry* best_entry = nullptr;
    size_t best_len = 0;
    for (const SymptomEntry& e : lex.symptoms()) {
      for (const Phrase& p : e.phrases) {
        if (p.size() > best_len && PhraseAt(tokens, i, p)) {
          best_entry = &e;
          best_len = p.size();
        }
      }
    }
    if (!best_entry) {
      ++i;
      continue;
    }
    SymptomMatch m;
    m.symptom = best_entry->name;
    m.phrase = Join(tokens, i, i + best_len);
    m.begin = i;
    m.end = i + best_len;
    m.weight = best_entry->weight;
    matches.push_back(std::move(m));
    i += best_len;
  }
  return matches;
}

std::vector<SymptomMatch> DetectNegation(std::string_view text, std::vector<SymptomMatch> matches,
                                         const Lexicon& lex) {
  const std::vector<std::string> tokens = VerifierTokens(text);
  const std::vector<bool> terminator = TerminatorMask(tokens, lex);
  const std::vector<Occurrence> cues = FindAll(tokens, lex.negation_cues());
  for (SymptomMatch& m : matches) {
    m.negated = false;
    const size_t window_start = m.begin >= kNegationWindow ? m.begin - kNegationWindow : 0;
    for (const Occurrence& cue : cues) {
      if (cue.begin < window_start || cue.end > m.begin) continue;
      bool blocked = false;
      for (size_t t = cue.end; t < m.begin; ++t) {
        if (terminator[t]) {
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        m.negated = true;
        break;
      }
    }
  }
  return matches;
}

bool DetectTemporalAmbiguity(std::string_view text, std::vector<SymptomMatch>& matches,
                             const Lexicon& lex) {
  const std::vector<std::string> tokens = VerifierTokens(text);
  const std::vector<bool> terminator = TerminatorMask(tokens, lex);
  const std::vector<Occurrence> anchors = FindAll(tokens, lex.temporal_anchors());

  bool any_live = false;
  for (SymptomMatch& m : matches) {
    size_t lo = m.begin;
    while (lo > 0 && !terminator[lo - 1]) --lo;
    size_t hi = m.end;
    while (hi < tokens.size() && !terminator[hi]) ++hi;
    m.temporally_anchored = false;
    for (const Occurrence& a : anchors) {
      if (a.begin >= lo && a.end <= hi) {
        m.temporally_anchored = true;
        break;
      }
    }
    any_live = any_live || !m.negated;
  }
  return any_live && anchors.empty();
}

VerificationReport VerifyPrediction(std::string_view text, const Prediction& pred,
                                    const Lexicon& lex) {
  const std::string normalized = Normalize(text);
  VerificationReport report;
  report.matches = DetectNegation(normalized, MatchSymptoms(normalized, lex), lex);
  report.temporal_ambiguity = DetectTemporalAmbiguity(normalized, report.matches, lex);
  bool supported = false;
  for (const SymptomMatch& m : report.matches) supported = supported || !m.negated;
  report.hallucination_flag = pred.label == 1 && !supported;
  report.advisory = report.hallucination_flag || report.temporal_ambiguity
                        ? Advisory::kReviewRecommended
                        : Advisory::kConsistent;
  return report;
}

nlohmann::ordered_json VerificationToJson(const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["matches"] = nlohmann::ordered_json::array();
  for (const SymptomMatch& m : report.matches) {
    j["matches"].push_back({{"symptom", m.symptom},
                            {"phrase", m.phrase},
                            {"span", {m.begin, m.end}},
                            {"weight", m.weight},
                            {"negated", m.negated},
                            {"temporally_anchored", m.temporally_anchored}});
  }
  j["temporal_ambiguity"] = report.temporal_ambiguity;
  j["hallucination_flag"] = report.hallucination_flag;
  j["advisory"] = AdvisoryName(report.advisory);
  return j;
}

}  // namespace cvdrisk
