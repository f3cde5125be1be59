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

#include <algorithm>
#include <cstdlib>
#include <map>

#include "transcriptor/error.h"
#include "transcriptor/pipeline.h"

namespace transcriptor::pipeline {
namespace {

double ratio(std::int64_t correct, std::int64_t total) {
  return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

// Truth lines that have a detected line within the tolerance.
std::int64_t matched_lines(const std::vector<int>& truth, const std::vector<int>& detected) {
  std::int64_t n = 0;
  for (int t : truth) {
    const bool hit = std::any_of(detected.begin(), detected.end(),
                                 [t](int d) { return std::abs(d - t) <= kLineTolerancePx; });
    n += hit;
  }
  return n;
}

std::string file_name(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

}  // namespace

double Metrics::vertical_line_acc() const { return ratio(vertical_correct, vertical_total); }
double Metrics::horizontal_line_acc() const { return ratio(horizontal_correct, horizontal_total); }
double Metrics::id_seq_acc() const { return ratio(id_correct, id_total); }
double Metrics::score_seq_acc() const { return ratio(score_correct, score_total); }

Metrics evaluate(const std::vector<TranscriptResult>& pred, const std::vector<PageTruth>& truth) {
  std::map<std::string, const TranscriptResult*> by_name;
  for (const TranscriptResult& r : pred) {
    if (!by_name.emplace(file_name(r.source), &r).second) {
      throw Error(ErrorCode::kTruthMismatch, "duplicate prediction for " + r.source, r.source);
    }
  }
  std::map<std::string, const PageTruth*> truth_by_name;
  for (const PageTruth& t : truth) {
    if (!truth_by_name.emplace(file_name(t.image), &t).second) {
      throw Error(ErrorCode::kTruthMismatch, "duplicate truth for " + t.image, t.image);
    }
  }
  for (const auto& [name, r] : by_name) {
    if (!truth_by_name.contains(name)) {
      throw Error(ErrorCode::kTruthMismatch, "no truth page for " + r->source, r->source);
    }
  }

  Metrics m;
  for (const PageTruth& t : truth) {
    const auto it = by_name.find(file_name(t.image));
    const TranscriptResult* r = it == by_name.end() ? nullptr : it->second;
    m.vertical_total += static_cast<std::int64_t>(t.v_positions.size());
    m.horizontal_total += static_cast<std::int64_t>(t.h_positions.size());
    m.id_total += static_cast<std::int64_t>(t.rows.size());
    m.score_total += static_cast<std::int64_t>(t.rows.size());
    if (r == nullptr) continue;  // a failed document scores zero

    m.vertical_correct += matched_lines(t.v_positions, r->grid.v_positions);
    m.horizontal_correct += matched_lines(t.h_positions, r->grid.h_positions);
    // Data rows align by order; rows the prediction lacks count as wrong and
    // surplus predicted rows are ignored.
    const std::size_t n = std::min(t.rows.size(), r->records.size());
    for (std::size_t i = 0; i < n; ++i) {
      m.id_correct += r->records[i].student_id == t.rows[i].first;
      m.score_correct += r->records[i].score_text == t.rows[i].second;
    }
  }
  if (m.vertical_total == 0 || m.horizontal_total == 0 || m.id_total == 0) {
    throw Error(ErrorCode::kTruthMismatch, "truth contains no lines or rows");
  }
  return m;
}

}  // namespace transcriptor::pipeline
