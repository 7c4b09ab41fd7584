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

#include "cvdrisk/error.h"

namespace cvdrisk {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kInvalidLabel: return "invalid-label";
    case ErrorCode::kInvalidRecord: return "invalid-record";
    case ErrorCode::kUnlabeledRecord: return "unlabeled-record";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kMissingId: return "missing-id";
    case ErrorCode::kNetwork: return "network";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kMalformedResponse: return "malformed-response";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kEmptyNode: return "empty-node";
    case ErrorCode::kSingleClass: return "single-class";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kUntrained: return "untrained";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kCaseMismatch: return "case-mismatch";
  }
  return "unknown";
}

}  // namespace cvdrisk
