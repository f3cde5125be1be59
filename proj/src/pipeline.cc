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

#include "transcriptor/pipeline.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <iostream>

#include "transcriptor/ctc.h"
#include "transcriptor/error.h"
#include "transcriptor/parallel.h"
#include "transcriptor/preprocess.h"

namespace transcriptor::pipeline {
namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string trim_output(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b);
}

// Bounding box of dark pixels grown by `margin`; the whole image when blank.
GrayImage trim_to_ink(const GrayImage& img, int margin) {
  int x0 = img.width(), y0 = img.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y) < 128) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) return img;
  return crop(img, std::max(0, x0 - margin), std::max(0, y0 - margin),
              std::min(img.width(), x1 + 1 + margin), std::min(img.height(), y1 + 1 + margin));
}

struct CellJob {
  std::size_t record = 0;
  bool is_id = false;
  GrayImage image;
};

}  // namespace

double ink_fraction(const GrayImage& cell) {
  if (cell.empty()) return 0.0;
  const auto dark = std::count_if(cell.data().begin(), cell.data().end(),
                                  [](std::uint8_t p) { return p < 128; });
  return static_cast<double>(dark) / static_cast<double>(cell.size());
}

Recognition recognize_cell(const GrayImage& cell, const crnn::ModelWeights& weights,
                           int beam_width, double blank_ink_frac) {
  if (cell.empty()) throw Error(ErrorCode::kEmptyImage, "empty cell image");
  if (ink_fraction(cell) < blank_ink_frac) return {"", 1.0};
  const ctc::LogitsSequence lp = crnn::forward(weights, crnn::preprocess_cell(cell));
  const ctc::Decoded best =
      ctc::beam_decode(lp, ctc::Alphabet(), static_cast<std::size_t>(beam_width));
  return {best.text, ctc::confidence(best.log_prob, lp.steps())};
}

std::string run_external_ocr(const std::string& command_template, const GrayImage& crop_img) {
  char path_template[] = "/tmp/transcriptor-ocr-XXXXXX";
  const int fd = mkstemp(path_template);
  if (fd < 0) throw Error(ErrorCode::kIoFailure, "cannot create temporary file");
  close(fd);
  const std::filesystem::path tmp = std::string(path_template) + ".pgm";
  std::filesystem::rename(path_template, tmp);
  save_image(crop_img, tmp);

  std::string command = command_template;
  const std::string quoted = shell_quote(tmp.string());
  if (const auto pos = command.find("{}"); pos != std::string::npos) {
    command.replace(pos, 2, quoted);
  } else {
    command += " " + quoted;
  }

  std::string output;
  int status = -1;
  if (FILE* pipe = popen(command.c_str(), "r")) {
    std::array<char, 256> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) output += buf.data();
    status = pclose(pipe);
  }
  std::error_code ec;
  std::filesystem::remove(tmp, ec);

  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::kExternalCommandFailed, "OCR command failed: " + command_template);
  }
  output = trim_output(std::move(output));
  if (output.empty()) {
    throw Error(ErrorCode::kExternalCommandFailed, "OCR command printed nothing");
  }
  return output;
}

std::optional<std::string> recognize_class_id(const GrayImage& img, const PipelineConfig& config,
                                              const crnn::ModelWeights& weights,
                                              int search_bottom) {
  if (config.class_id_template.empty()) return std::nullopt;
  const GrayImage anchor = load_image(config.class_id_template);
  int bottom = search_bottom > 0 ? std::min(search_bottom, img.height()) : img.height();
  if (bottom < anchor.height()) bottom = img.height();
  if (anchor.width() > img.width() || anchor.height() > bottom) return std::nullopt;

  const GrayImage band = bottom == img.height() ? img : crop(img, 0, 0, img.width(), bottom);
  const grid::MatchResult match = grid::template_match_ncc(band, anchor);
  if (match.score < config.class_id_min_score) return std::nullopt;

  const int x0 = match.x + anchor.width();
  const int x1 = std::min(img.width(), x0 + config.class_id_region_width);
  if (x1 <= x0) return std::nullopt;
  const GrayImage region =
      trim_to_ink(crop(img, x0, match.y, x1, match.y + anchor.height()), 4);

  if (!config.ocr_command.empty()) {
    try {
      return run_external_ocr(config.ocr_command, region);
    } catch (const Error& e) {
      std::cerr << "class id: " << e.what() << "\n";
      return std::nullopt;
    }
  }
  const Recognition rec = recognize_cell(region, weights, config.beam_width, config.blank_ink_frac);
  if (rec.text.empty()) return std::nullopt;
  return rec.text;
}

void DebugSink::dump(std::string_view stage, const GrayImage& img) const {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  save_image(img, dir / (stem + "." + std::string(stage) + ".pgm"));
}

GridDetection detect_grid(const GrayImage& img, const PipelineConfig& config,
                          const DebugSink* debug) {
  if (img.empty()) throw Error(ErrorCode::kEmptyImage, "empty page image");
  const GrayImage blurred = preprocess::gaussian_blur(img, config.blur_sigma, config.blur_radius);
  const int threshold = preprocess::otsu_threshold(blurred);
  const BinaryImage ink = preprocess::binarize(blurred, threshold);

  const preprocess::DeskewResult straight = preprocess::deskew(
      ink, {config.deskew_max_angle, config.deskew_coarse_step, config.deskew_fine_step});
  const double angle = straight.report.applied_angle;

  const grid::LineMasks masks =
      grid::extract_line_masks(straight.image, config.h_min_len_frac, config.v_min_len_frac);
  grid::HoughOptions hough;
  hough.theta_window = config.hough_theta_window;
  hough.theta_step = config.hough_theta_step;
  hough.rho_step = config.hough_rho_step;
  hough.vote_frac = config.hough_vote_frac;

  hough.theta_center = 90.0;
  const auto h_lines = grid::hough_lines(masks.horizontal, hough);
  hough.theta_center = 0.0;
  const auto v_lines = grid::hough_lines(masks.vertical, hough);

  if (debug != nullptr) {
    debug->dump("blurred", blurred);
    debug->dump("binary", to_gray(ink));
    debug->dump("deskewed", to_gray(straight.image));
    debug->dump("hmask", to_gray(masks.horizontal));
    debug->dump("vmask", to_gray(masks.vertical));
  }

  // Keep only positions inside the frame; a peak can sit on the border.
  auto in_range = [](std::vector<int> pos, int limit) {
    std::erase_if(pos, [limit](int p) { return p < 0 || p >= limit; });
    return pos;
  };
  const int w = img.width();
  const int h = img.height();
  grid::GridModel model = grid::build_grid(
      in_range(grid::merge_lines(grid::centre_lines(h_lines, w, h), config.merge_rho_tol), h),
      in_range(grid::merge_lines(grid::centre_lines(v_lines, w, h), config.merge_rho_tol), w), w,
      h);
  return {angle, threshold, preprocess::rotate(img, angle, 255), std::move(model)};
}

TranscriptResult process_image(const GrayImage& img, std::string source,
                               const PipelineConfig& config, const crnn::ModelWeights& weights,
                               const DebugSink* debug) {
  config.validate();
  GridDetection det = detect_grid(img, config, debug);
  const grid::GridModel& g = det.grid;

  TranscriptResult result;
  result.source = std::move(source);
  result.deskew_angle = det.deskew_angle;
  result.header_rows = config.header_rows;
  result.grid = {g.rows(), g.cols(), g.h_positions(), g.v_positions()};
  result.class_id = recognize_class_id(det.deskewed, config, weights, g.h_positions().front());

  const bool external_ids = config.id_recognizer == "external";
  std::vector<CellJob> jobs;
  for (int r = config.header_rows; r < g.rows(); ++r) {
    ScoreRecord rec;
    rec.row = r;
    const std::size_t index = result.records.size();
    for (const bool is_id : {true, false}) {
      const int col = is_id ? config.id_column : config.score_column;
      try {
        jobs.push_back({index, is_id, grid::crop_cell(det.deskewed, g, r, col, config.inset)});
      } catch (const Error& e) {
        std::cerr << result.source << " row " << r << ": " << e.what() << "\n";
      }
    }
    result.records.push_back(std::move(rec));
  }

  std::vector<Recognition> outputs(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        try {
          if (jobs[i].is_id && external_ids) {
            outputs[i] = {run_external_ocr(config.ocr_command, jobs[i].image), 1.0};
          } else {
            outputs[i] = recognize_cell(jobs[i].image, weights, config.beam_width,
                                        config.blank_ink_frac);
          }
        } catch (const Error&) {
          outputs[i] = {"", 0.0};  // this cell only; the record stays
        }
      },
      config.threads);

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    ScoreRecord& rec = result.records[jobs[i].record];
    if (jobs[i].is_id) {
      rec.student_id = outputs[i].text;
      rec.id_confidence = outputs[i].confidence;
    } else {
      rec.score_text = outputs[i].text;
      rec.confidence = outputs[i].confidence;
    }
  }
  for (ScoreRecord& rec : result.records) {
    if (!rec.score_text.empty()) {
      try {
        rec.score_value = parse_score(rec.score_text).value;
      } catch (const Error&) {
        rec.score_value.reset();
      }
    }
    rec.flagged = rec.confidence < config.review_confidence ||
                  rec.id_confidence < config.review_confidence;
  }
  return result;
}

TranscriptResult process_transcript(const std::filesystem::path& path,
                                    const PipelineConfig& config,
                                    const crnn::ModelWeights& weights, const DebugSink* debug) {
  return process_image(load_image(path), path.string(), config, weights, debug);
}

}  // namespace transcriptor::pipeline
