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

#include "transcriptor/preprocess.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "transcriptor/error.h"

namespace transcriptor::preprocess {

int otsu_threshold(const GrayImage& img) {
  if (img.empty()) {
    throw Error(ErrorCode::kEmptyImage, "otsu_threshold on empty image");
  }
  std::array<std::int64_t, 256> hist{};
  for (std::uint8_t p : img.data()) ++hist[p];

  const std::int64_t total = static_cast<std::int64_t>(img.size());
  std::int64_t total_sum = 0;
  for (int v = 0; v < 256; ++v) total_sum += v * hist[v];

  // sigma_b^2 * N^2 = (w1*S0 - w0*S1)^2 / (w0*w1); the integer numerator keeps
  // plateaus of the histogram exactly tied.
  int best_t = 0;
  double best = -1.0;
  std::int64_t w0 = 0;
  std::int64_t s0 = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[t];
    s0 += t * hist[t];
    const std::int64_t w1 = total - w0;
    const std::int64_t s1 = total_sum - s0;
    double score = 0.0;
    if (w0 > 0 && w1 > 0) {
      const double d = static_cast<double>(w1 * s0 - w0 * s1);
      score = d * d / (static_cast<double>(w0) * static_cast<double>(w1));
    }
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

BinaryImage binarize(const GrayImage& img, int t) {
  BinaryImage out(img.width(), img.height());
  std::transform(img.data().begin(), img.data().end(), out.data().begin(),
                 [t](std::uint8_t p) -> std::uint8_t { return p <= t ? 1 : 0; });
  return out;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidParam, "sigma must be > 0");
  if (radius < 1) throw Error(ErrorCode::kInvalidParam, "radius must be >= 1");
  const int n = 2 * radius + 1;
  std::vector<double> k(static_cast<std::size_t>(n) * n);
  double sum = 0.0;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k[(dy + radius) * n + (dx + radius)] = v;
      sum += v;
    }
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace {

// Symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1.
int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    i = i < 0 ? -i - 1 : 2 * n - i - 1;
  }
  return i;
}

std::uint8_t round_to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

struct Rotation {
  Rotation(int width, int height, double angle_deg)
      : cx((width - 1) / 2.0), cy((height - 1) / 2.0) {
    const double rad = angle_deg * std::numbers::pi / 180.0;
    c = std::cos(rad);
    s = std::sin(rad);
  }
  // Source coordinate sampled by destination pixel (x, y).
  double src_x(int x, int y) const { return cx + (x - cx) * c - (y - cy) * s; }
  double src_y(int x, int y) const { return cy + (x - cx) * s + (y - cy) * c; }

  double cx, cy, c, s;
};

// floor(v + 0.5) without a libm call.
inline int round_half_up(double v) {
  const double u = v + 0.5;
  const int t = static_cast<int>(u);
  return static_cast<double>(t) > u ? t - 1 : t;
}

// Nearest-neighbour inverse mapping of Rotation with the per-column terms
// hoisted out; evaluation order matches src_x/src_y exactly.
class NearestSampler {
 public:
  NearestSampler(int width, int height, double angle_deg)
      : rot_(width, height, angle_deg), w_(width), h_(height), ax_(width), ay_(width) {
    for (int x = 0; x < width; ++x) {
      ax_[x] = rot_.cx + (x - rot_.cx) * rot_.c;
      ay_[x] = rot_.cy + (x - rot_.cx) * rot_.s;
    }
  }

  // Calls fn(x, sx, sy) for each pixel of row y whose source is in frame.
  template <typename Fn>
  void row(int y, Fn&& fn) const {
    const double ry_s = (y - rot_.cy) * rot_.s;
    const double ry_c = (y - rot_.cy) * rot_.c;
    for (int x = 0; x < w_; ++x) {
      const int sx = round_half_up(ax_[x] - ry_s);
      const int sy = round_half_up(ay_[x] + ry_c);
      if (sx >= 0 && sy >= 0 && sx < w_ && sy < h_) fn(x, sx, sy);
    }
  }

 private:
  Rotation rot_;
  int w_, h_;
  std::vector<double> ax_, ay_;
};

}  // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma, int radius) {
  const std::vector<double> k = gaussian_kernel(sigma, radius);
  const int n = 2 * radius + 1;
  const int w = img.width();
  const int h = img.height();

  std::vector<int> xs(w + 2 * radius);
  std::vector<int> ys(h + 2 * radius);
  for (int i = 0; i < w + 2 * radius; ++i) xs[i] = reflect(i - radius, w);
  for (int i = 0; i < h + 2 * radius; ++i) ys[i] = reflect(i - radius, h);

  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const auto src = img.row(ys[y + j]);
        const double* krow = &k[j * n];
        for (int i = 0; i < n; ++i) acc += krow[i] * src[xs[x + i]];
      }
      out.at(x, y) = round_to_u8(acc);
    }
  }
  return out;
}

GrayImage rotate(const GrayImage& img, double angle_deg, std::uint8_t background) {
  if (angle_deg == 0.0) return img;
  const Rotation rot(img.width(), img.height(), angle_deg);
  GrayImage out(img.width(), img.height(), background);
  auto sample = [&](int x, int y) -> double {
    return img.contains(x, y) ? img.at(x, y) : background;
  };
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double sx = rot.src_x(x, y);
      const double sy = rot.src_y(x, y);
      if (sx <= -1.0 || sy <= -1.0 || sx >= img.width() || sy >= img.height()) {
        continue;
      }
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0;
      const double fy = sy - y0;
      const double top = sample(x0, y0) * (1 - fx) + sample(x0 + 1, y0) * fx;
      const double bottom =
          sample(x0, y0 + 1) * (1 - fx) + sample(x0 + 1, y0 + 1) * fx;
      out.at(x, y) = round_to_u8(top * (1 - fy) + bottom * fy);
    }
  }
  return out;
}

BinaryImage rotate_nearest(const BinaryImage& mask, double angle_deg) {
  if (angle_deg == 0.0) return mask;
  const NearestSampler sampler(mask.width(), mask.height(), angle_deg);
  BinaryImage out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    sampler.row(y, [&](int x, int sx, int sy) { out.at(x, y) = mask.at(sx, sy); });
  }
  return out;
}

namespace {

struct InkPoints {
  int width = 0;
  int height = 0;
  std::vector<int> xs, ys;
};

InkPoints ink_points(const BinaryImage& mask) {
  InkPoints ink{mask.width(), mask.height(), {}, {}};
  for (int y = 0; y < mask.height(); ++y) {
    const auto row = mask.row(y);
    for (int x = 0; x < mask.width(); ++x) {
      if (row[x] != 0) {
        ink.xs.push_back(x);
        ink.ys.push_back(y);
      }
    }
  }
  return ink;
}

// Forward image of each ink pixel under rotate(): the inverse of
// Rotation::src_x/src_y.
double profile_variance(const InkPoints& ink, double angle_deg) {
  const int w = ink.width;
  const int h = ink.height;
  if (w == 0 || h == 0) return 0.0;
  const Rotation rot(w, h, angle_deg);
  std::vector<double> counts(h, 0.0);
  for (std::size_t i = 0; i < ink.xs.size(); ++i) {
    const double dx = ink.xs[i] - rot.cx;
    const double dy = ink.ys[i] - rot.cy;
    const int x = round_half_up(rot.cx + dx * rot.c + dy * rot.s);
    const int y = round_half_up(rot.cy - dx * rot.s + dy * rot.c);
    if (x >= 0 && y >= 0 && x < w && y < h) counts[y] += 1.0;
  }
  double mean = 0.0;
  for (double v : counts) mean += v;
  mean /= h;
  double var = 0.0;
  for (double v : counts) var += (v - mean) * (v - mean);
  return var / h;
}

}  // namespace

double projection_score(const BinaryImage& mask, double angle_deg) {
  return profile_variance(ink_points(mask), angle_deg);
}

namespace {

bool better(double score, double angle, double best_score, double best_angle) {
  if (score != best_score) return score > best_score;
  if (std::abs(angle) != std::abs(best_angle)) {
    return std::abs(angle) < std::abs(best_angle);
  }
  return angle < best_angle;
}

}  // namespace

DeskewResult deskew(const BinaryImage& mask, const DeskewOptions& options) {
  const double max_angle = options.max_angle;
  if (!(options.coarse_step > 0.0) || !(options.fine_step > 0.0) ||
      options.coarse_step > max_angle || options.fine_step > max_angle) {
    throw Error(ErrorCode::kInvalidParam,
                "deskew steps must lie in (0, max_angle]");
  }

  const InkPoints ink = ink_points(mask);
  DeskewReport report;
  double best_angle = 0.0;
  double best_score = -1.0;
  auto evaluate = [&](double angle) {
    const double score = profile_variance(ink, angle);
    report.score_curve.emplace_back(angle, score);
    if (better(score, angle, best_score, best_angle)) {
      best_score = score;
      best_angle = angle;
    }
  };

  const int coarse_n = static_cast<int>(std::floor(max_angle / options.coarse_step + 1e-9));
  for (int k = -coarse_n; k <= coarse_n; ++k) evaluate(k * options.coarse_step);

  const double center = best_angle;
  const int fine_n = static_cast<int>(std::floor(options.coarse_step / options.fine_step + 1e-9));
  for (int k = -fine_n; k <= fine_n; ++k) {
    if (k == 0) continue;
    const double angle = center + k * options.fine_step;
    if (std::abs(angle) > max_angle + 1e-9) continue;
    evaluate(angle);
  }

  std::sort(report.score_curve.begin(), report.score_curve.end());
  report.applied_angle = best_angle;
  return {std::move(report), rotate_nearest(mask, best_angle)};
}

}  // namespace transcriptor::preprocess
