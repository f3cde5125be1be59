// Copyright 2026 The Transcriptor Authors. All Rights Reserved.
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

#ifndef TRANSCRIPTOR_TESTS_TEST_UTIL_H_
#define TRANSCRIPTOR_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "transcriptor/image.h"

namespace transcriptor::testing {

inline GrayImage random_image(std::mt19937_64& rng, int w, int h, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> dist(lo, hi);
  GrayImage img(w, h);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(dist(rng));
  return img;
}

inline BinaryImage random_mask(std::mt19937_64& rng, int w, int h, double density) {
  std::bernoulli_distribution ink(density);
  BinaryImage mask(w, h);
  for (auto& p : mask.data()) p = ink(rng) ? 1 : 0;
  return mask;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("transcriptor-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace transcriptor::testing

#endif  // TRANSCRIPTOR_TESTS_TEST_UTIL_H_
