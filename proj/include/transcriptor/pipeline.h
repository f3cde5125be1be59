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

#ifndef TRANSCRIPTOR_PIPELINE_H_
#define TRANSCRIPTOR_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transcriptor/crnn.h"
#include "transcriptor/grid.h"
#include "transcriptor/image.h"

namespace transcriptor::pipeline {

// Keys of the flat config file are exactly these field names.
struct PipelineConfig {
  int id_column = 1;
  int score_column = 5;
  int header_rows = 1;

  double blur_sigma = 1.0;
  int blur_radius = 2;
  double deskew_max_angle = 5.0;
  double deskew_coarse_step = 0.5;
  double deskew_fine_step = 0.05;

  double h_min_len_frac = 0.5;
  double v_min_len_frac = 0.25;
  double hough_theta_window = 2.0;
  double hough_theta_step = 0.25;
  double hough_rho_step = 1.0;
  double hough_vote_frac = 0.4;
  double merge_rho_tol = 8.0;

  int inset = 4;
  int beam_width = 8;
  double blank_ink_frac = 0.005;
  double review_confidence = 0.3;

  // Empty: student IDs go through the CRNN. Otherwise `id_recognizer` selects
  // "crnn" or "external" and the command receives a crop path as its argument.
  std::string ocr_command;
  std::string id_recognizer = "crnn";
  std::string class_id_template;
  double class_id_min_score = 0.6;
  int class_id_region_width = 360;

  unsigned threads = 0;

  // Throws ConfigError on out-of-domain values.
  void validate() const;
};

PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string format_config(const PipelineConfig& config);

struct Score {
  std::string text;  // separator normalized to '.'
  double value = 0.0;
};

// INT | INT SEP FRAC with INT = 1-2 digits, SEP in {'.', ','}, FRAC = 1-2
// digits, value in [0, 10]. Throws InvalidFormat or OutOfRange.
Score parse_score(std::string_view text);

struct ScoreRecord {
  int row = 0;  // grid row index
  std::string student_id;
  double id_confidence = 0.0;
  std::string score_text;
  std::optional<double> score_value;
  double confidence = 0.0;
  bool flagged = false;  // confidence below review threshold
};

struct GridSummary {
  int rows = 0;
  int cols = 0;
  std::vector<int> h_positions;
  std::vector<int> v_positions;
};

struct TranscriptResult {
  std::string source;
  std::optional<std::string> class_id;
  double deskew_angle = 0.0;
  int header_rows = 0;
  GridSummary grid;
  std::vector<ScoreRecord> records;
};

struct Recognition {
  std::string text;
  double confidence = 0.0;
};

// Fraction of pixels darker than mid-gray.
double ink_fraction(const GrayImage& cell);

// Blank cells (ink fraction below `blank_ink_frac`) return ("", 1) without
// running the network; otherwise preprocess -> forward -> beam decode.
Recognition recognize_cell(const GrayImage& cell, const crnn::ModelWeights& weights,
                           int beam_width, double blank_ink_frac = 0.005);

// Runs `command_template` on an image written to a temporary file. "{}" in
// the template is replaced by the quoted path, otherwise the path is appended.
// Throws ExternalCommandFailed on nonzero exit or empty output.
std::string run_external_ocr(const std::string& command_template, const GrayImage& crop);

// Locates the class-ID anchor with template matching inside rows
// [0, search_bottom) and reads the region to its right. Absent when no template
// is configured, the match is weak, or the reader returns nothing.
std::optional<std::string> recognize_class_id(const GrayImage& img, const PipelineConfig& config,
                                              const crnn::ModelWeights& weights,
                                              int search_bottom = -1);

// Intermediate rasters written when a debug directory is given.
struct DebugSink {
  std::filesystem::path dir;
  std::string stem;
  void dump(std::string_view stage, const GrayImage& img) const;
};

TranscriptResult process_image(const GrayImage& img, std::string source,
                               const PipelineConfig& config, const crnn::ModelWeights& weights,
                               const DebugSink* debug = nullptr);
TranscriptResult process_transcript(const std::filesystem::path& path,
                                    const PipelineConfig& config,
                                    const crnn::ModelWeights& weights,
                                    const DebugSink* debug = nullptr);

// Grid recovery alone: blur, binarize, deskew, masks, Hough, merge, build.
struct GridDetection {
  double deskew_angle = 0.0;
  int threshold = 0;
  GrayImage deskewed;
  grid::GridModel grid;
};
GridDetection detect_grid(const GrayImage& img, const PipelineConfig& config,
                          const DebugSink* debug = nullptr);

// CSV: header "class_id,student_id,score,confidence", LF endings.
std::string to_csv(const std::vector<TranscriptResult>& results);
std::string to_json(const std::vector<TranscriptResult>& results);
std::vector<TranscriptResult> results_from_json(std::string_view text);
void emit_csv(const std::vector<TranscriptResult>& results, const std::filesystem::path& path);
void emit_json(const std::vector<TranscriptResult>& results, const std::filesystem::path& path);

// Ground truth for one page.
struct PageTruth {
  std::string image;  // file name of the page image
  std::optional<std::string> class_id;
  std::vector<int> h_positions;
  std::vector<int> v_positions;
  int header_rows = 0;
  int id_column = 1;
  int score_column = 5;
  // [student_id, score_text] per data row.
  std::vector<std::pair<std::string, std::string>> rows;
};

std::string truth_to_json(const PageTruth& truth);
PageTruth truth_from_json(std::string_view text);
PageTruth load_truth(const std::filesystem::path& path);
// A file, or every *.truth.json inside a directory (sorted).
std::vector<PageTruth> load_truths(const std::filesystem::path& path);

struct Metrics {
  std::int64_t vertical_correct = 0, vertical_total = 0;
  std::int64_t horizontal_correct = 0, horizontal_total = 0;
  std::int64_t id_correct = 0, id_total = 0;
  std::int64_t score_correct = 0, score_total = 0;

  double vertical_line_acc() const;
  double horizontal_line_acc() const;
  double id_seq_acc() const;
  double score_seq_acc() const;
};

inline constexpr int kLineTolerancePx = 3;

// Predictions are matched to truths by image file name. Throws TruthMismatch
// when a prediction has no truth page or rows cannot be aligned.
Metrics evaluate(const std::vector<TranscriptResult>& pred, const std::vector<PageTruth>& truth);

}  // namespace transcriptor::pipeline

#endif  // TRANSCRIPTOR_PIPELINE_H_
