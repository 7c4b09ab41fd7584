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


#ifndef CVDRISK_TESTS_TEST_UTIL_H_
#define CVDRISK_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace cvdrisk::testing {

inline std::filesystem::path TestData(const std::string& name) {
  return std::filesystem::path(CVDRISK_TEST_DATA) / name;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cvdrisk-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void Spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

// The 20-case two-rater table: 8 both-1, 8 both-0, then 2 + 2 disagreements.
// Cohen's kappa is (0.8 - 0.5) / (1 - 0.5) = 0.6.
inline std::vector<int> KappaTableA() {
  std::vector<int> a;
  for (int i = 0; i < 20; ++i) a.push_back(i < 8 || (i >= 16 && i < 18) ? 1 : 0);
  return a;
}
inline std::vector<int> KappaTableB() {
  std::vector<int> b;
  for (int i = 0; i < 20; ++i) b.push_back(i < 8 || i >= 18 ? 1 : 0);
  return b;
}

// Rater CSV rows for one rater over cases c1..cN.
inline std::string RaterCsv(const std::string& rater, const std::vector<int>& judgments,
                            int likert, bool header = true) {
  std::string out = header ? "rater,case_id,likert,risk_judgment\n" : "";
  for (size_t i = 0; i < judgments.size(); ++i) {
    out += rater + ",c" + std::to_string(i + 1) + "," + std::to_string(likert) + "," +
           std::to_string(judgments[i]) + "\n";
  }
  return out;
}

}  // namespace cvdrisk::testing

#endif  // CVDRISK_TESTS_TEST_UTIL_H_
