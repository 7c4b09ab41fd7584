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

#ifndef CVDRISK_ERROR_H_
#define CVDRISK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cvdrisk {

enum class ErrorCode {
  kIo,
  kParse,
  kDuplicateId,
  kInvalidLabel,
  kInvalidRecord,
  kUnlabeledRecord,
  kInvalidArgument,
  kMissingId,
  kNetwork,
  kTimeout,
  kMalformedResponse,
  kDimensionMismatch,
  kBadMagic,
  kFormat,
  kEmptyNode,
  kSingleClass,
  kNonFinite,
  kUntrained,
  kLengthMismatch,
  kCaseMismatch,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as cvdrisk::Error. The code lets callers and
// tests distinguish failure classes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cvdrisk

#endif  // CVDRISK_ERROR_H_
