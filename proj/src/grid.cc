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

#include "transcriptor/grid.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "transcriptor/error.h"

namespace transcriptor::grid {
namespace {

// (w+1) x (h+1) summed-area table of a mask.
class IntegralImage {
 public:
  explicit IntegralImage(const BinaryImage& img)
      : w_(img.width()), h_(img.height()),
        table_(static_cast<std::size_t>(w_ + 1) * (h_ + 1), 0) {
    for (int y = 0; y < h_; ++y) {
      std::int32_t row_sum = 0;
      const auto row = img.row(y);
      for (int x = 0; x < w_; ++x) {
        row_sum += row[x];
        table_[idx(x + 1, y + 1)] = table_[idx(x + 1, y)] + row_sum;
      }
    }
  }

  // Sum over [x0, x1) x [y0, y1) clipped to the image.
  std::int32_t sum(int x0, int y0, int x1, int y1) const {
    x0 = std::clamp(x0, 0, w_);
    x1 = std::clamp(x1, 0, w_);
    y0 = std::clamp(y0, 0, h_);
    y1 = std::clamp(y1, 0, h_);
    if (x1 <= x0 || y1 <= y0) return 0;
    return table_[idx(x1, y1)] - table_[idx(x0, y1)] - table_[idx(x1, y0)] +
           table_[idx(x0, y0)];
  }

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * (w_ + 1) + x;
  }
  int w_;
  int h_;
  std::vector<std::int32_t> table_;
};

void check_se(StructuringElement se) {
  if (se.width < 1 || se.height < 1) {
    throw Error(ErrorCode::kInvalidParam, "structuring element must be >= 1x1");
  }
}

}  // namespace

BinaryImage erode(const BinaryImage& img, StructuringElement se) {
  check_se(se);
  const IntegralImage sat(img);
  const int ox = se.width / 2;
  const int oy = se.height / 2;
  const std::int32_t full = se.width * se.height;
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const int y0 = y - oy;
    if (y0 < 0 || y0 + se.height > img.height()) continue;
    for (int x = 0; x < img.width(); ++x) {
      const int x0 = x - ox;
      if (x0 < 0 || x0 + se.width > img.width()) continue;
      out.at(x, y) = sat.sum(x0, y0, x0 + se.width, y0 + se.height) == full;
    }
  }
  return out;
}

BinaryImage dilate(const BinaryImage& img, StructuringElement se) {
  check_se(se);
  const IntegralImage sat(img);
  // Reflected window: q in [p - (dim-1-origin), p + origin].
  const int left = se.width - 1 - se.width / 2;
  const int top = se.height - 1 - se.height / 2;
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) =
          sat.sum(x - left, y - top, x - left + se.width, y - top + se.height) > 0;
    }
  }
  return out;
}

BinaryImage open(const BinaryImage& img, StructuringElement se) {
  return dilate(erode(img, se), se);
}

LineMasks extract_line_masks(const BinaryImage& img, double min_len_frac) {
  return extract_line_masks(img, min_len_frac, min_len_frac);
}

LineMasks extract_line_masks(const BinaryImage& img, double horizontal_frac,
                             double vertical_frac) {
  auto valid = [](double f) { return f > 0.0 && f < 1.0; };
  if (!valid(horizontal_frac) || !valid(vertical_frac)) {
    throw Error(ErrorCode::kInvalidParam, "min_len_frac must lie in (0, 1)");
  }
  const int lh = std::max(1, static_cast<int>(std::lround(horizontal_frac * img.width())));
  const int lv = std::max(1, static_cast<int>(std::lround(vertical_frac * img.height())));
  return {open(img, {lh, 1}), open(img, {1, lv})};
}

std::vector<PolarLine> hough_lines(const BinaryImage& mask, const HoughOptions& options) {
  if (!(options.theta_window >= 0.0) || options.theta_window >= 90.0) {
    throw Error(ErrorCode::kInvalidParam, "theta_window must lie in [0, 90)");
  }
  if (!(options.theta_step > 0.0) || !(options.rho_step > 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "hough steps must be positive");
  }
  if (!(options.vote_frac > 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "vote_frac must be positive");
  }

  const int n_half =
      static_cast<int>(std::floor(options.theta_window / options.theta_step + 1e-9));
  const int n_theta = 2 * n_half + 1;
  std::vector<double> thetas(n_theta), cosines(n_theta), sines(n_theta);
  for (int k = 0; k < n_theta; ++k) {
    thetas[k] = options.theta_center + (k - n_half) * options.theta_step;
    const double rad = thetas[k] * std::numbers::pi / 180.0;
    cosines[k] = std::cos(rad);
    sines[k] = std::sin(rad);
  }

  const double diag = std::hypot(mask.width(), mask.height());
  const int offset = static_cast<int>(std::ceil(diag / options.rho_step)) + 1;
  const int n_rho = 2 * offset + 1;
  std::vector<std::int32_t> acc(static_cast<std::size_t>(n_theta) * n_rho, 0);

  for (int y = 0; y < mask.height(); ++y) {
    const auto row = mask.row(y);
    for (int x = 0; x < mask.width(); ++x) {
      if (!row[x]) continue;
      for (int k = 0; k < n_theta; ++k) {
        const double rho = x * cosines[k] + y * sines[k];
        const int bin = static_cast<int>(std::floor(rho / options.rho_step + 0.5)) + offset;
        ++acc[static_cast<std::size_t>(k) * n_rho + bin];
      }
    }
  }

  const double center_rad = options.theta_center * std::numbers::pi / 180.0;
  const int extent = std::abs(std::sin(center_rad)) >= std::abs(std::cos(center_rad))
                         ? mask.width()
                         : mask.height();
  const double threshold = options.vote_frac * extent;

  auto at = [&](int k, int r) { return acc[static_cast<std::size_t>(k) * n_rho + r]; };
  std::vector<PolarLine> lines;
  for (int k = 0; k < n_theta; ++k) {
    for (int r = 0; r < n_rho; ++r) {
      const std::int32_t v = at(k, r);
      if (v == 0 || v < threshold) continue;
      bool peak = true;
      for (int dk = -1; dk <= 1 && peak; ++dk) {
        for (int dr = -1; dr <= 1; ++dr) {
          const int kk = k + dk;
          const int rr = r + dr;
          if ((dk == 0 && dr == 0) || kk < 0 || kk >= n_theta || rr < 0 || rr >= n_rho) {
            continue;
          }
          if (at(kk, rr) > v) {
            peak = false;
            break;
          }
        }
      }
      if (!peak) continue;
      double theta = thetas[k];
      double rho = (r - offset) * options.rho_step;
      if (theta < 0.0) {
        theta += 180.0;
        rho = -rho;
      } else if (theta >= 180.0) {
        theta -= 180.0;
        rho = -rho;
      }
      lines.push_back({rho, theta, v});
    }
  }
  std::sort(lines.begin(), lines.end(), [](const PolarLine& a, const PolarLine& b) {
    if (a.votes != b.votes) return a.votes > b.votes;
    if (a.theta != b.theta) return a.theta < b.theta;
    return a.rho < b.rho;
  });
  return lines;
}

double line_position(const PolarLine& line) {
  return line.theta > 135.0 ? -line.rho : line.rho;
}

std::vector<PolarLine> centre_lines(std::span<const PolarLine> lines, int width, int height) {
  const double xc = (width - 1) / 2.0;
  const double yc = (height - 1) / 2.0;
  std::vector<PolarLine> out;
  out.reserve(lines.size());
  for (const PolarLine& line : lines) {
    const double t = line.theta * std::numbers::pi / 180.0;
    if (line.theta >= 45.0 && line.theta < 135.0) {
      out.push_back({(line.rho - xc * std::cos(t)) / std::sin(t), 90.0, line.votes});
    } else {
      out.push_back({(line.rho - yc * std::sin(t)) / std::cos(t), 0.0, line.votes});
    }
  }
  return out;
}

std::vector<int> merge_lines(std::span<const PolarLine> lines, double rho_tol) {
  if (!(rho_tol >= 1.0)) throw Error(ErrorCode::kInvalidParam, "rho_tol must be >= 1");
  std::vector<std::pair<double, int>> keyed;
  keyed.reserve(lines.size());
  for (const PolarLine& line : lines) keyed.emplace_back(line_position(line), line.votes);
  std::sort(keyed.begin(), keyed.end());

  std::vector<int> positions;
  std::size_t i = 0;
  while (i < keyed.size()) {
    double weighted = 0.0;
    double votes = 0.0;
    std::size_t j = i;
    do {
      weighted += keyed[j].first * keyed[j].second;
      votes += keyed[j].second;
      ++j;
    } while (j < keyed.size() && keyed[j].first - keyed[j - 1].first <= rho_tol);
    const double mean = votes > 0 ? weighted / votes : keyed[i].first;
    const int pos = static_cast<int>(std::floor(mean + 0.5));
    if (positions.empty() || pos > positions.back()) positions.push_back(pos);
    i = j;
  }
  return positions;
}

GridModel::GridModel(std::vector<int> h_positions, std::vector<int> v_positions,
                     int image_width, int image_height)
    : h_positions_(std::move(h_positions)),
      v_positions_(std::move(v_positions)),
      image_width_(image_width),
      image_height_(image_height) {
  if (h_positions_.size() < 2 || v_positions_.size() < 2) {
    throw Error(ErrorCode::kInsufficientLines,
                "grid needs at least two horizontal and two vertical lines");
  }
  auto check = [](const std::vector<int>& pos, int limit, const char* what) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (pos[i] < 0 || pos[i] >= limit || (i > 0 && pos[i] <= pos[i - 1])) {
        throw Error(ErrorCode::kInvalidParam,
                    std::string(what) + " positions must be strictly increasing "
                                        "and inside the image");
      }
    }
  };
  check(h_positions_, image_height_, "horizontal");
  check(v_positions_, image_width_, "vertical");
}

GridModel build_grid(std::vector<int> h_positions, std::vector<int> v_positions,
                     int width, int height) {
  return GridModel(std::move(h_positions), std::move(v_positions), width, height);
}

GrayImage crop_cell(const GrayImage& img, const GridModel& grid, int row, int col,
                    int inset) {
  if (row < 0 || row >= grid.rows() || col < 0 || col >= grid.cols()) {
    throw Error(ErrorCode::kIndexOutOfRange, "cell index outside the grid");
  }
  if (inset < 0) throw Error(ErrorCode::kInvalidParam, "inset must be >= 0");
  const int x0 = grid.v_positions()[col] + inset;
  const int x1 = grid.v_positions()[col + 1] - inset;
  const int y0 = grid.h_positions()[row] + inset;
  const int y1 = grid.h_positions()[row + 1] - inset;
  if (x1 <= x0 || y1 <= y0) {
    throw Error(ErrorCode::kDegenerateCell, "inset leaves an empty cell");
  }
  return crop(img, x0, y0, std::min(x1, img.width()), std::min(y1, img.height()));
}

MatchResult template_match_ncc(const GrayImage& img, const GrayImage& templ) {
  if (templ.empty() || img.empty()) {
    throw Error(ErrorCode::kEmptyImage, "template matching needs nonempty images");
  }
  if (templ.width() > img.width() || templ.height() > img.height()) {
    throw Error(ErrorCode::kTemplateTooLarge, "template larger than image");
  }
  const int tw = templ.width();
  const int th = templ.height();
  const std::int64_t n = static_cast<std::int64_t>(tw) * th;

  std::int64_t t_sum = 0;
  std::int64_t t_sq = 0;
  for (std::uint8_t v : templ.data()) {
    t_sum += v;
    t_sq += static_cast<std::int64_t>(v) * v;
  }
  const double t_var_n = static_cast<double>(n * t_sq - t_sum * t_sum);

  // n * zero-mean template; every partial sum below is an integer well inside
  // the exact range of a double, so scores are reproducible.
  std::vector<double> centered(templ.size());
  for (std::size_t i = 0; i < templ.size(); ++i) {
    centered[i] = static_cast<double>(n * templ.data()[i] - t_sum);
  }
  const std::vector<double> pixels(img.data().begin(), img.data().end());

  const int W = img.width();
  const int H = img.height();
  std::vector<std::int64_t> s1(static_cast<std::size_t>(W + 1) * (H + 1), 0);
  std::vector<std::int64_t> s2(s1.size(), 0);
  auto idx = [W](int x, int y) { return static_cast<std::size_t>(y) * (W + 1) + x; };
  for (int y = 0; y < H; ++y) {
    std::int64_t r1 = 0;
    std::int64_t r2 = 0;
    for (int x = 0; x < W; ++x) {
      const std::int64_t v = img.at(x, y);
      r1 += v;
      r2 += v * v;
      s1[idx(x + 1, y + 1)] = s1[idx(x + 1, y)] + r1;
      s2[idx(x + 1, y + 1)] = s2[idx(x + 1, y)] + r2;
    }
  }
  auto box = [&](const std::vector<std::int64_t>& s, int x, int y) {
    return s[idx(x + tw, y + th)] - s[idx(x, y + th)] - s[idx(x + tw, y)] + s[idx(x, y)];
  };

  MatchResult best{0, 0, -2.0};
  for (int y = 0; y + th <= H; ++y) {
    for (int x = 0; x + tw <= W; ++x) {
      double score = 0.0;
      const std::int64_t w_sum = box(s1, x, y);
      const double w_var_n = static_cast<double>(n * box(s2, x, y) - w_sum * w_sum);
      if (t_var_n > 0.0 && w_var_n > 0.0) {
        double num = 0.0;
        for (int j = 0; j < th; ++j) {
          const double* a = &centered[static_cast<std::size_t>(j) * tw];
          const double* b = &pixels[static_cast<std::size_t>(y + j) * W + x];
          double row = 0.0;
          for (int i = 0; i < tw; ++i) row += a[i] * b[i];
          num += row;
        }
        score = std::clamp(num / (std::sqrt(t_var_n) * std::sqrt(w_var_n)), -1.0, 1.0);
      }
      if (score > best.score) best = {x, y, score};
    }
  }
  return best;
}

}  // namespace transcriptor::grid
