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

#include <cctype>

#include "transcriptor/error.h"
#include "transcriptor/pipeline.h"

namespace transcriptor::pipeline {
namespace {

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

int to_int(std::string_view digits) {
  int v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

Score parse_score(std::string_view text) {
  const auto sep = text.find_first_of(".,");
  const std::string_view int_part = text.substr(0, sep);
  const std::string_view frac_part =
      sep == std::string_view::npos ? std::string_view{} : text.substr(sep + 1);

  const bool int_ok = !int_part.empty() && int_part.size() <= 2 && all_digits(int_part);
  const bool frac_ok = sep == std::string_view::npos ||
                       (!frac_part.empty() && frac_part.size() <= 2 && all_digits(frac_part));
  if (!int_ok || !frac_ok) {
    throw Error(ErrorCode::kInvalidFormat, "not a score: '" + std::string(text) + "'");
  }

  // Hundredths keep the comparison with 10 exact.
  int hundredths = to_int(int_part) * 100;
  if (!frac_part.empty()) {
    hundredths += to_int(frac_part) * (frac_part.size() == 1 ? 10 : 1);
  }
  if (hundredths > 1000) {
    throw Error(ErrorCode::kOutOfRange, "score above 10: '" + std::string(text) + "'");
  }

  Score out;
  out.text = std::string(text);
  if (sep != std::string_view::npos) out.text[sep] = '.';
  out.value = hundredths / 100.0;
  return out;
}

}  // namespace transcriptor::pipeline
