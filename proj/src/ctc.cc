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

#include "transcriptor/ctc.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "transcriptor/error.h"

namespace transcriptor::ctc {

double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

LogitsSequence::LogitsSequence(std::size_t steps, std::size_t classes,
                               std::vector<double> values)
    : steps_(steps), classes_(classes), values_(std::move(values)) {
  if (classes_ < 1 || values_.size() != steps_ * classes_) {
    throw Error(ErrorCode::kShapeMismatch, "logits must be steps x classes");
  }
}

LogitsSequence LogitsSequence::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kShapeMismatch, "no logit rows");
  const std::size_t k = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * k);
  for (const auto& r : rows) {
    if (r.size() != k) throw Error(ErrorCode::kShapeMismatch, "ragged logit rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return LogitsSequence(rows.size(), k, std::move(values));
}

Alphabet::Alphabet() : Alphabet("0123456789.,") {}

Alphabet::Alphabet(std::string glyphs) : glyphs_(std::move(glyphs)) {
  std::string sorted = glyphs_;
  std::sort(sorted.begin(), sorted.end());
  if (glyphs_.empty() || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kInvalidParam, "alphabet glyphs must be unique and nonempty");
  }
}

std::vector<int> Alphabet::encode(std::string_view text) const {
  std::vector<int> out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto pos = glyphs_.find(ch);
    if (pos == std::string::npos) {
      throw Error(ErrorCode::kInvalidTarget, std::string("glyph not in alphabet: ") + ch);
    }
    out.push_back(static_cast<int>(pos));
  }
  return out;
}

std::string Alphabet::decode(std::span<const int> labeling) const {
  std::string out;
  out.reserve(labeling.size());
  for (int idx : labeling) out.push_back(glyph(static_cast<std::size_t>(idx)));
  return out;
}

std::vector<int> collapse_path(std::span<const int> path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int k : path) {
    if (k != prev && k != blank) out.push_back(k);
    prev = k;
  }
  return out;
}

namespace {

void check_alphabet(const LogitsSequence& lp, const Alphabet& alphabet) {
  if (lp.classes() != alphabet.size() + 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "logits have " + std::to_string(lp.classes()) + " classes, alphabet needs " +
                    std::to_string(alphabet.size() + 1));
  }
}

}  // namespace

Decoded greedy_decode(const LogitsSequence& lp, const Alphabet& alphabet) {
  check_alphabet(lp, alphabet);
  std::vector<int> path(lp.steps());
  double log_prob = 0.0;
  for (std::size_t t = 0; t < lp.steps(); ++t) {
    const auto row = lp.row(t);
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k] > row[best]) best = k;
    }
    path[t] = static_cast<int>(best);
    log_prob += row[best];
  }
  Decoded out;
  out.labeling = collapse_path(path, static_cast<int>(lp.blank()));
  out.text = alphabet.decode(out.labeling);
  out.log_prob = log_prob;
  return out;
}

Decoded beam_decode(const LogitsSequence& lp, const Alphabet& alphabet, std::size_t width) {
  check_alphabet(lp, alphabet);
  if (width < 1) throw Error(ErrorCode::kInvalidParam, "beam width must be >= 1");

  // (prefix, ends in blank) -> log probability of all paths in that state.
  using Key = std::pair<std::vector<int>, bool>;
  std::vector<std::pair<Key, double>> beam{{{{}, true}, 0.0}};
  const int blank = static_cast<int>(lp.blank());

  for (std::size_t t = 0; t < lp.steps(); ++t) {
    const auto row = lp.row(t);
    std::map<Key, double> next;
    auto accumulate = [&next](Key key, double value) {
      auto [it, inserted] = next.try_emplace(std::move(key), value);
      if (!inserted) it->second = log_add(it->second, value);
    };
    for (const auto& [key, q] : beam) {
      const auto& [prefix, blank_end] = key;
      accumulate({prefix, true}, q + row[blank]);
      for (int c = 0; c < blank; ++c) {
        const double value = q + row[c];
        if (!blank_end && !prefix.empty() && prefix.back() == c) {
          accumulate({prefix, false}, value);
        } else {
          std::vector<int> extended = prefix;
          extended.push_back(c);
          accumulate({std::move(extended), false}, value);
        }
      }
    }
    beam.assign(next.begin(), next.end());
    // Map order makes the tie-break deterministic.
    std::stable_sort(beam.begin(), beam.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (beam.size() > width) beam.resize(width);
  }

  std::map<std::vector<int>, double> totals;
  for (const auto& [key, q] : beam) {
    auto [it, inserted] = totals.try_emplace(key.first, q);
    if (!inserted) it->second = log_add(it->second, q);
  }
  Decoded out;
  for (const auto& [prefix, q] : totals) {
    if (out.log_prob == kLogZero || q > out.log_prob) {
      out.labeling = prefix;
      out.log_prob = q;
    }
  }
  out.text = alphabet.decode(out.labeling);
  return out;
}

std::size_t required_frames(std::span<const int> target) {
  std::size_t frames = target.size();
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++frames;
  }
  return frames;
}

double ctc_loss(const LogitsSequence& lp, std::span<const int> target) {
  const int blank = static_cast<int>(lp.blank());
  for (int k : target) {
    if (k < 0 || k >= blank) {
      throw Error(ErrorCode::kInvalidTarget, "target index " + std::to_string(k) +
                                                 " is not a symbol class");
    }
  }
  const std::size_t T = lp.steps();
  if (required_frames(target) > T) {
    throw Error(ErrorCode::kTargetTooLong,
                "target needs " + std::to_string(required_frames(target)) + " frames, have " +
                    std::to_string(T));
  }
  if (T == 0) return 0.0;

  // Extended labeling: blank, l1, blank, l2, ..., blank.
  const std::size_t S = 2 * target.size() + 1;
  auto label = [&](std::size_t s) { return s % 2 == 0 ? blank : target[s / 2]; };

  std::vector<double> alpha(S, kLogZero), next(S);
  alpha[0] = lp.at(0, blank);
  if (S > 1) alpha[1] = lp.at(0, label(1));
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double sum = alpha[s];
      if (s >= 1) sum = log_add(sum, alpha[s - 1]);
      if (s >= 2 && label(s) != blank && label(s) != label(s - 2)) {
        sum = log_add(sum, alpha[s - 2]);
      }
      next[s] = sum == kLogZero ? kLogZero : sum + lp.at(t, label(s));
    }
    alpha.swap(next);
  }
  const double total = S > 1 ? log_add(alpha[S - 1], alpha[S - 2]) : alpha[S - 1];
  return -total;
}

double confidence(double log_prob, std::size_t steps) {
  if (steps == 0) return 1.0;
  return std::exp(log_prob / static_cast<double>(steps));
}

}  // namespace transcriptor::ctc
