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

#ifndef TRANSCRIPTOR_CTC_H_
#define TRANSCRIPTOR_CTC_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace transcriptor::ctc {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) with kLogZero as the additive identity.
double log_add(double a, double b);

// T rows of K log-probabilities; the blank is the last class.
class LogitsSequence {
 public:
  LogitsSequence() = default;
  LogitsSequence(std::size_t steps, std::size_t classes, std::vector<double> values);
  static LogitsSequence from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t steps() const { return steps_; }
  std::size_t classes() const { return classes_; }
  std::size_t blank() const { return classes_ - 1; }
  double at(std::size_t t, std::size_t k) const { return values_[t * classes_ + k]; }
  std::span<const double> row(std::size_t t) const {
    return {values_.data() + t * classes_, classes_};
  }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const LogitsSequence&, const LogitsSequence&) = default;

 private:
  std::size_t steps_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> values_;
};

// Glyph table; blank_index() == glyph count.
class Alphabet {
 public:
  // '0'..'9', '.', ','.
  Alphabet();
  explicit Alphabet(std::string glyphs);

  std::size_t size() const { return glyphs_.size(); }
  std::size_t blank_index() const { return glyphs_.size(); }
  char glyph(std::size_t index) const { return glyphs_.at(index); }
  const std::string& glyphs() const { return glyphs_; }
  // Throws InvalidTarget for characters outside the alphabet.
  std::vector<int> encode(std::string_view text) const;
  std::string decode(std::span<const int> labeling) const;

 private:
  std::string glyphs_;
};

// Merge consecutive repeats, then drop blanks.
std::vector<int> collapse_path(std::span<const int> path, int blank);

struct Decoded {
  std::string text;
  std::vector<int> labeling;
  double log_prob = kLogZero;
};

// Per-step argmax (lowest index on ties), collapsed. log_prob is the log
// probability of the argmax path.
Decoded greedy_decode(const LogitsSequence& lp, const Alphabet& alphabet);

// Prefix beam search. Hypotheses are (prefix, ends-in-blank) pairs carrying
// the summed probability of their paths; identical hypotheses merge and the
// `width` most probable survive each step. The result is the prefix with the
// largest total over both end states, and log_prob is that total.
Decoded beam_decode(const LogitsSequence& lp, const Alphabet& alphabet, std::size_t width);

// Minimum frames needed to emit `target`: its length plus its adjacent repeats.
std::size_t required_frames(std::span<const int> target);

// -log sum over all paths collapsing to `target` (forward algorithm).
double ctc_loss(const LogitsSequence& lp, std::span<const int> target);

// Per-frame geometric mean probability of a decoded labeling.
double confidence(double log_prob, std::size_t steps);

}  // namespace transcriptor::ctc

#endif  // TRANSCRIPTOR_CTC_H_
