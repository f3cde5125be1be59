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

#include "transcriptor/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "transcriptor/error.h"
#include "transcriptor/font.h"
#include "transcriptor/preprocess.h"

namespace transcriptor::synth {
namespace {

constexpr int kBaseWidths[kColumns] = {60, 190, 250, 150, 190, 150, 80};
constexpr int kLineHalf = 1;  // lines are 2 * kLineHalf + 1 pixels thick
constexpr int kAnchorScale = 4;
constexpr int kAnchorMargin = 4;
constexpr char kAnchorText[] = "LOP:";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  int uniform(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::string digits(Rng& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += static_cast<char>('0' + rng.uniform(0, 9));
  return s;
}

std::string student_id(Rng& rng) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "20%02d%04d", rng.uniform(14, 25), rng.uniform(1, 9999));
  return buf;
}

std::string score_text(Rng& rng) {
  if (rng.unit() < 0.06) return "";
  const int whole = rng.uniform(0, 10);
  std::string s = std::to_string(whole);
  if (whole == 10 || rng.unit() < 0.45) return s;
  s += rng.unit() < 0.7 ? '.' : ',';
  if (rng.unit() < 0.7) {
    s += static_cast<char>('0' + rng.uniform(0, 9));
  } else {
    static constexpr const char* kQuarters[] = {"25", "50", "75"};
    s += kQuarters[rng.uniform(0, 2)];
  }
  return s;
}

std::string date_text(Rng& rng) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d.%02d.%04d", rng.uniform(1, 28), rng.uniform(1, 12),
                rng.uniform(2014, 2025));
  return buf;
}

void fill(GrayImage& img, int x0, int y0, int x1, int y1) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width());
  y1 = std::min(y1, img.height());
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) img.at(x, y) = 0;
  }
}

// Draws text vertically centred in the cell starting 8 px right of its left line.
void draw_in_cell(GrayImage& img, int left, int top, int row_h, const std::string& text,
                  int scale, std::span<const font::GlyphPlacement> jitter = {}) {
  const int y = top + (row_h - font::kGlyphHeight * scale) / 2;
  font::draw_text(img, left + 8, y, text, scale, scale, jitter);
}

}  // namespace

GrayImage class_anchor() {
  const int w = font::text_width(kAnchorText, kAnchorScale, kAnchorScale) + 2 * kAnchorMargin;
  const int h = font::kGlyphHeight * kAnchorScale + 2 * kAnchorMargin;
  GrayImage img(w, h, 255);
  font::draw_text(img, kAnchorMargin, kAnchorMargin, kAnchorText, kAnchorScale, kAnchorScale);
  return img;
}

SynthPage synthesize(const SynthOptions& options) {
  if (options.rows < 1 || options.rows > 100) {
    throw Error(ErrorCode::kInvalidParam, "rows must be in [1, 100]");
  }
  if (!std::isfinite(options.skew_deg) || std::abs(options.skew_deg) > 10.0) {
    throw Error(ErrorCode::kInvalidParam, "skew must be within +/-10 degrees");
  }
  if (!std::isfinite(options.noise_sigma) || options.noise_sigma < 0.0 ||
      options.noise_sigma > 64.0) {
    throw Error(ErrorCode::kInvalidParam, "noise sigma must be in [0, 64]");
  }

  Rng rng(options.seed);
  const int row_h = rng.uniform(40, 48);
  const int left = rng.uniform(60, 99);
  const int top = rng.uniform(260, 289);
  std::vector<int> v = {left};
  for (int c = 0; c < kColumns; ++c) v.push_back(v.back() + kBaseWidths[c] + rng.uniform(-8, 8));
  std::vector<int> h;
  for (int r = 0; r <= options.rows; ++r) h.push_back(top + r * row_h);
  const int height = std::max(kMinPageHeight, h.back() + 120);

  SynthPage page;
  page.image = GrayImage(kPageWidth, height, 255);
  GrayImage& img = page.image;

  // Header band: class anchor followed by the class ID.
  const GrayImage anchor = class_anchor();
  const int anchor_x = left;
  const int anchor_y = top - 110 + rng.uniform(0, 20);
  for (int y = 0; y < anchor.height(); ++y) {
    for (int x = 0; x < anchor.width(); ++x) img.at(anchor_x + x, anchor_y + y) = anchor.at(x, y);
  }
  const std::string class_id = std::to_string(rng.uniform(1, 9)) + digits(rng, 5);
  font::draw_text(img, anchor_x + anchor.width() + 12, anchor_y + kAnchorMargin, class_id,
                  kAnchorScale, kAnchorScale);

  pipeline::PageTruth& truth = page.truth;
  truth.image = "page_" + std::to_string(options.seed) + ".pgm";
  truth.class_id = class_id;
  truth.h_positions = h;
  truth.v_positions = v;
  truth.header_rows = 0;
  truth.id_column = 1;
  truth.score_column = 5;

  for (int r = 0; r < options.rows; ++r) {
    const int y = h[r];
    draw_in_cell(img, v[0], y, row_h, std::to_string(r + 1), 2);
    const std::string id = student_id(rng);
    draw_in_cell(img, v[1], y, row_h, id, 3);
    draw_in_cell(img, v[4], y, row_h, date_text(rng), 2);
    const std::string score = score_text(rng);
    std::vector<font::GlyphPlacement> jitter;
    for (std::size_t i = 0; i < score.size(); ++i) {
      jitter.push_back({rng.uniform(-2, 2), rng.uniform(-3, 3)});
    }
    draw_in_cell(img, v[5], y, row_h, score, 3, jitter);
    truth.rows.emplace_back(id, score);

    for (const auto& [col, label] : {std::pair{1, id}, std::pair{5, score}}) {
      // Same rectangle crop_cell yields with inset 4.
      GrayImage patch = crop(img, v[col] + 4, y + 4, v[col + 1] - 4, y + row_h - 4);
      page.patches.push_back({r, col, label, std::move(patch)});
    }
  }

  for (int y : h) {
    fill(img, v.front() - kLineHalf, y - kLineHalf, v.back() + kLineHalf + 1, y + kLineHalf + 1);
  }
  for (int x : v) {
    fill(img, x - kLineHalf, h.front() - kLineHalf, x + kLineHalf + 1, h.back() + kLineHalf + 1);
  }

  if (options.skew_deg != 0.0) img = preprocess::rotate(img, options.skew_deg, 255);
  if (options.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, options.noise_sigma);
    for (std::uint8_t& p : img.data()) {
      const double value = std::round(p + noise(rng.engine()));
      p = static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0));
    }
  }
  return page;
}

SynthFiles synth_transcript(std::uint64_t seed, int rows, double skew_deg, double noise_sigma,
                            const std::filesystem::path& out_dir) {
  const SynthPage page = synthesize({seed, rows, skew_deg, noise_sigma});
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + out_dir.string(), out_dir.string());

  SynthFiles files{out_dir / page.truth.image,
                   out_dir / ("page_" + std::to_string(seed) + ".truth.json")};
  save_image(page.image, files.image);
  std::filesystem::create_directories(out_dir / "templates", ec);
  save_image(class_anchor(), out_dir / "templates" / "anchor.pgm");
  std::ofstream out(files.truth, std::ios::binary | std::ios::trunc);
  out << pipeline::truth_to_json(page.truth);
  if (!out)
    throw Error(ErrorCode::kIoFailure, "cannot write " + files.truth.string(),
                files.truth.string());
  return files;
}

}  // namespace transcriptor::synth
