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

#ifndef TRANSCRIPTOR_GRID_H_
#define TRANSCRIPTOR_GRID_H_

#include <span>
#include <vector>

#include "transcriptor/image.h"

namespace transcriptor::grid {

// All-ones rectangle; origin at (floor(width/2), floor(height/2)).
struct StructuringElement {
  int width = 1;
  int height = 1;
};

// Out-of-bounds pixels count as background.
BinaryImage erode(const BinaryImage& img, StructuringElement se);
// Minkowski dilation: the SE window is reflected through its origin, which is
// the plain centered window for odd sizes.
BinaryImage dilate(const BinaryImage& img, StructuringElement se);
BinaryImage open(const BinaryImage& img, StructuringElement se);

struct LineMasks {
  BinaryImage horizontal;
  BinaryImage vertical;
};

// Openings with a round(frac*width) x 1 and a 1 x round(frac*height) element.
LineMasks extract_line_masks(const BinaryImage& img, double min_len_frac);
LineMasks extract_line_masks(const BinaryImage& img, double horizontal_frac,
                             double vertical_frac);

// rho = x cos(theta) + y sin(theta); theta in [0, 180).
struct PolarLine {
  double rho = 0.0;
  double theta = 0.0;
  int votes = 0;
};

struct HoughOptions {
  double theta_center = 90.0;  // 90 for horizontal rulings, 0 for vertical
  double theta_window = 2.0;
  double theta_step = 0.25;
  double rho_step = 1.0;
  double vote_frac = 0.4;
};

// Local maxima (8-neighbourhood, non-strict) of the accumulator whose votes
// reach vote_frac times the image extent along the line direction. Sorted by
// votes, descending.
std::vector<PolarLine> hough_lines(const BinaryImage& mask, const HoughOptions& options);

// Signed axis intercept of a near-axis-aligned line: rho, or -rho when theta
// wrapped past 135 degrees.
double line_position(const PolarLine& line);

// Re-expresses each line as an axis-aligned one (theta 90 or 0) whose rho is
// its crossing of the frame's centre column (near-horizontal) or centre row
// (near-vertical). Votes are kept. Neighbouring tilted peaks of one thick
// line then land on the same coordinate instead of drifting with the tilt.
std::vector<PolarLine> centre_lines(std::span<const PolarLine> lines, int width, int height);

// Greedy clustering of line positions: consecutive gaps <= rho_tol merge.
// Each cluster yields its vote-weighted mean, rounded half-up.
std::vector<int> merge_lines(std::span<const PolarLine> lines, double rho_tol = 8.0);

class GridModel {
 public:
  GridModel(std::vector<int> h_positions, std::vector<int> v_positions,
            int image_width, int image_height);

  const std::vector<int>& h_positions() const { return h_positions_; }
  const std::vector<int>& v_positions() const { return v_positions_; }
  int image_width() const { return image_width_; }
  int image_height() const { return image_height_; }
  int rows() const { return static_cast<int>(h_positions_.size()) - 1; }
  int cols() const { return static_cast<int>(v_positions_.size()) - 1; }

 private:
  std::vector<int> h_positions_;
  std::vector<int> v_positions_;
  int image_width_;
  int image_height_;
};

// Throws InsufficientLines when either direction has fewer than two lines.
GridModel build_grid(std::vector<int> h_positions, std::vector<int> v_positions,
                     int width, int height);

// Rectangle (v[col]+inset, h[row]+inset) .. (v[col+1]-inset, h[row+1]-inset),
// second corner exclusive.
GrayImage crop_cell(const GrayImage& img, const GridModel& grid, int row, int col,
                    int inset);

struct MatchResult {
  int x = 0;
  int y = 0;
  double score = 0.0;
};

// Exhaustive zero-mean normalized cross-correlation. Placements where the
// template or the window is flat score 0. Ties go to the smallest y, then x.
MatchResult template_match_ncc(const GrayImage& img, const GrayImage& templ);

}  // namespace transcriptor::grid

#endif  // TRANSCRIPTOR_GRID_H_
