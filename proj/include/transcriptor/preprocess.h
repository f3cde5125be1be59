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

#ifndef TRANSCRIPTOR_PREPROCESS_H_
#define TRANSCRIPTOR_PREPROCESS_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "transcriptor/image.h"

namespace transcriptor::preprocess {

// Global Otsu level: maximizes the between-class variance of the split
// {p <= t} / {p > t}; the smallest maximizing t wins.
int otsu_threshold(const GrayImage& img);

// 1 where img <= t (dark ink), 0 elsewhere.
BinaryImage binarize(const GrayImage& img, int t);

// Sampled (2r+1)x(2r+1) Gaussian normalized to unit sum, row-major.
std::vector<double> gaussian_kernel(double sigma, int radius);

// Convolution with gaussian_kernel under symmetric-reflect borders, rounded
// half-up back to 8 bits.
GrayImage gaussian_blur(const GrayImage& img, double sigma = 1.0, int radius = 2);

// Counterclockwise rotation (as displayed, y down) about the image center.
// Bilinear; samples falling outside the frame take `background`.
GrayImage rotate(const GrayImage& img, double angle_deg, std::uint8_t background);

// Nearest-neighbour rotation of a mask, same geometry as rotate().
BinaryImage rotate_nearest(const BinaryImage& mask, double angle_deg);

// Variance of the per-row ink counts of `mask` rotated by angle_deg. Each
// ink pixel is carried forward to the nearest destination row, so every
// pixel that stays in frame is counted exactly once.
double projection_score(const BinaryImage& mask, double angle_deg);

struct DeskewOptions {
  double max_angle = 5.0;
  double coarse_step = 0.5;
  double fine_step = 0.05;
};

struct DeskewReport {
  // Correction that was applied, degrees counterclockwise.
  double applied_angle = 0.0;
  // (angle, projection score) for every evaluated angle, sorted by angle.
  std::vector<std::pair<double, double>> score_curve;
};

struct DeskewResult {
  DeskewReport report;
  BinaryImage image;
};

// Coarse scan over [-max, +max], then a fine scan within one coarse step of the
// coarse winner. On equal scores the smaller |angle| wins.
DeskewResult deskew(const BinaryImage& mask, const DeskewOptions& options = {});

}  // namespace transcriptor::preprocess

#endif  // TRANSCRIPTOR_PREPROCESS_H_
