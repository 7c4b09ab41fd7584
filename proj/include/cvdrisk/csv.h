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

#ifndef CVDRISK_CSV_H_
#define CVDRISK_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace cvdrisk::csv {

struct Row {
  std::vector<std::string> fields;
  size_t line = 0;  // 1-based line on which the row starts
};

// RFC-4180 reader: quoted fields may contain commas, "" escapes and line
// breaks. CRLF and LF line endings are both accepted. Throws Error(kParse)
// on an unterminated quote or stray characters after a closing quote.
std::vector<Row> Parse(std::string_view content);

// Quotes a field only when it needs it.
std::string Escape(std::string_view field);

std::string FormatRow(const std::vector<std::string>& fields);

}  // namespace cvdrisk::csv

#endif  // CVDRISK_CSV_H_
