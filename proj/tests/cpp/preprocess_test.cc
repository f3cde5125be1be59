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
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "transcriptor/error.h"
#include "transcriptor/preprocess.h"

namespace transcriptor::preprocess {
namespace {

// Between-class variance of the split {p <= t} / {p > t}, straight from the
// pixels: w0 * w1 * (mu0 - mu1)^2.
double between_class_variance(const GrayImage& img, int t) {
  double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (std::uint8_t p : img.data()) {
    if (p <= t) {
      n0 += 1;
      s0 += p;
    } else {
      n1 += 1;
      s1 += p;
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  const double n = n0 + n1;
  const double d = s0 / n0 - s1 / n1;
  return (n0 / n) * (n1 / n) * d * d;
}

int otsu_oracle(const GrayImage& img) {
  std::vector<double> var(256);
  for (int t = 0; t < 256; ++t) var[t] = between_class_variance(img, t);
  const double best = *std::max_element(var.begin(), var.end());
  for (int t = 0; t < 256; ++t) {
    if (var[t] >= best - 1e-12 * std::max(1.0, best)) return t;
  }
  return 0;
}

// Ruled page: horizontal lines every `pitch` rows plus two vertical borders.
GrayImage ruled_page(int w, int h, int pitch) {
  GrayImage img(w, h, 255);
  for (int y = pitch; y < h - pitch / 2; y += pitch) {
    for (int x = w / 10; x < w - w / 10; ++x) {
      img.at(x, y) = 0;
      img.at(x, y + 1) = 0;
    }
  }
  for (int y = pitch; y < h - pitch; ++y) {
    img.at(w / 10, y) = 0;
    img.at(w - w / 10 - 1, y) = 0;
  }
  return img;
}

TEST(Otsu, BimodalTieTakesSmallestLevel) {
  GrayImage img(10, 10, 10);
  for (int i = 50; i < 100; ++i) img.data()[i] = 200;
  EXPECT_EQ(otsu_threshold(img), 10);
}

TEST(Otsu, ConstantImage) { EXPECT_EQ(otsu_threshold(GrayImage(8, 8, 128)), 0); }

TEST(Otsu, MatchesExhaustiveScan) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 40; ++i) {
    const GrayImage img = testing::random_image(rng, 64, 64);
    ASSERT_EQ(otsu_threshold(img), otsu_oracle(img)) << "case " << i;
  }
  // Narrow histograms produce many exact ties.
  for (int i = 0; i < 40; ++i) {
    const GrayImage img = testing::random_image(rng, 7, 5, 100, 104);
    ASSERT_EQ(otsu_threshold(img), otsu_oracle(img)) << "narrow case " << i;
  }
}

TEST(Binarize, Extremes) {
  EXPECT_EQ(binarize(GrayImage(5, 4, 255), 128), BinaryImage(5, 4, 0));
  EXPECT_EQ(binarize(GrayImage(5, 4, 0), 128), BinaryImage(5, 4, 1));
}

TEST(Binarize, OtsuRecoversDarkSet) {
  std::mt19937_64 rng(3);
  const BinaryImage truth = testing::random_mask(rng, 40, 30, 0.2);
  GrayImage img(40, 30);
  std::uniform_int_distribution<int> dark(0, 60), light(190, 255);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.data()[i] = static_cast<std::uint8_t>(truth.data()[i] ? dark(rng) : light(rng));
  }
  EXPECT_EQ(binarize(img, otsu_threshold(img)), truth);
}

TEST(Binarize, MonotoneInThreshold) {
  std::mt19937_64 rng(4);
  const GrayImage img = testing::random_image(rng, 20, 20);
  BinaryImage prev = binarize(img, 0);
  for (int t = 1; t < 256; t += 7) {
    const BinaryImage cur = binarize(img, t);
    for (std::size_t i = 0; i < cur.size(); ++i) ASSERT_LE(prev.data()[i], cur.data()[i]);
    prev = cur;
  }
}

TEST(Gaussian, KernelIsNormalized) {
  for (double sigma : {0.3, 1.0, 2.5, 7.0}) {
    for (int radius : {1, 2, 5}) {
      const auto k = gaussian_kernel(sigma, radius);
      ASSERT_EQ(k.size(), static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
      double sum = 0;
      for (double v : k) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(Gaussian, ImpulseResponseIsKernel) {
  GrayImage img(9, 9, 0);
  img.at(4, 4) = 255;
  const GrayImage out = gaussian_blur(img, 1.0, 2);
  double total = 0;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) total += std::exp(-(dx * dx + dy * dy) / 2.0);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      const int dx = x - 4, dy = y - 4;
      int expected = 0;
      if (std::abs(dx) <= 2 && std::abs(dy) <= 2) {
        const double k = std::exp(-(dx * dx + dy * dy) / 2.0) / total;
        expected = static_cast<int>(std::floor(255.0 * k + 0.5));
      }
      ASSERT_EQ(out.at(x, y), expected) << x << "," << y;
    }
  }
}

TEST(Gaussian, ConstantAndRange) {
  EXPECT_EQ(gaussian_blur(GrayImage(7, 3, 77), 1.5, 3), GrayImage(7, 3, 77));
  EXPECT_EQ(gaussian_blur(GrayImage(1, 1, 9)), GrayImage(1, 1, 9));
  std::mt19937_64 rng(8);
  const GrayImage img = testing::random_image(rng, 30, 20, 40, 180);
  const GrayImage out = gaussian_blur(img, 1.0, 2);
  for (std::uint8_t p : out.data()) {
    ASSERT_GE(p, 40);
    ASSERT_LE(p, 180);
  }
}

TEST(Gaussian, RejectsBadParameters) {
  EXPECT_THROW(gaussian_blur(GrayImage(3, 3), 0.0, 2), Error);
  EXPECT_THROW(gaussian_blur(GrayImage(3, 3), 1.0, 0), Error);
}

TEST(Rotate, ZeroIsIdentity) {
  std::mt19937_64 rng(9);
  const GrayImage img = testing::random_image(rng, 33, 21);
  EXPECT_EQ(rotate(img, 0.0, 255), img);
}

TEST(Rotate, ConstantStaysConstant) {
  for (double a : {-7.0, 1.3, 45.0})
    EXPECT_EQ(rotate(GrayImage(20, 15, 90), a, 90), GrayImage(20, 15, 90));
}

TEST(Rotate, QuarterTurnIsCounterclockwise) {
  GrayImage img(11, 11, 255);
  img.at(7, 5) = 0;  // two pixels right of the centre
  const GrayImage out = rotate(img, 90.0, 255);
  EXPECT_EQ(out.at(5, 3), 0);  // now two pixels above it
  int dark = 0;
  for (std::uint8_t p : out.data()) dark += p < 128;
  EXPECT_EQ(dark, 1);
}

// Square table grid with 3 px rulings every `pitch` pixels.
GrayImage table_grid(int size, int pitch) {
  GrayImage img(size, size, 255);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (y % pitch < 3 || x % pitch < 3) img.at(x, y) = 0;
    }
  }
  return img;
}

double central_mae(const GrayImage& a, const GrayImage& b) {
  double err = 0;
  int n = 0;
  for (int y = a.height() / 4; y < 3 * a.height() / 4; ++y) {
    for (int x = a.width() / 4; x < 3 * a.width() / 4; ++x) {
      err += std::abs(a.at(x, y) - b.at(x, y));
      ++n;
    }
  }
  return err / n;
}

TEST(Rotate, ForwardBackRoundTrip) {
  const GrayImage img = table_grid(800, 200);
  EXPECT_LT(central_mae(img, rotate(rotate(img, 3.0, 255), -3.0, 255)), 2.0);
}

TEST(Rotate, ForwardBackErrorComesFromEdgesOnly) {
  // Bilinear resampling is exact on affine intensity ramps, so a double
  // rotation only loses accuracy at sharp edges.
  GrayImage ramp(200, 160);
  for (int y = 0; y < 160; ++y)
    for (int x = 0; x < 200; ++x) ramp.at(x, y) = static_cast<std::uint8_t>(x / 2 + y / 2 + 20);
  EXPECT_LT(central_mae(ramp, rotate(rotate(ramp, 3.0, 255), -3.0, 255)), 0.75);
  // Each ruling edge smears by about 255/3 levels per crossing pixel column:
  // the error falls off as 1/pitch.
  for (int pitch : {50, 100, 200}) {
    const GrayImage img = table_grid(800, pitch);
    const double bound = 4.0 * 255.0 / 3.0 / pitch + 0.5;
    EXPECT_LT(central_mae(img, rotate(rotate(img, 3.0, 255), -3.0, 255)), bound) << pitch;
  }
}

TEST(Deskew, StraightPageStaysStraight) {
  const BinaryImage mask = binarize(ruled_page(400, 300, 20), 128);
  const DeskewResult r = deskew(mask);
  EXPECT_LE(std::abs(r.report.applied_angle), 0.05 + 1e-9);
}

TEST(Deskew, RecoversKnownSkew) {
  const GrayImage page = ruled_page(600, 500, 24);
  for (double skew : {3.0, -4.5, 1.7}) {
    const BinaryImage mask = binarize(rotate(page, skew, 255), 128);
    const DeskewResult r = deskew(mask);
    EXPECT_NEAR(r.report.applied_angle, -skew, 0.25) << "skew " << skew;
  }
}

TEST(Deskew, ReportInvariants) {
  const BinaryImage mask = binarize(rotate(ruled_page(300, 240, 15), 2.2, 255), 128);
  const DeskewResult r = deskew(mask);
  const auto& curve = r.report.score_curve;
  ASSERT_EQ(curve.size(), 41u);  // 21 coarse + 20 fine
  EXPECT_TRUE(std::is_sorted(curve.begin(), curve.end()));
  double at_best = -1;
  for (const auto& [angle, score] : curve) {
    EXPECT_LE(std::abs(angle), 5.0 + 1e-9);
    if (angle == r.report.applied_angle) at_best = score;
  }
  for (const auto& [angle, score] : curve) EXPECT_GE(at_best, score);
  EXPECT_EQ(r.image, rotate_nearest(mask, r.report.applied_angle));
  EXPECT_DOUBLE_EQ(at_best, projection_score(mask, r.report.applied_angle));
}

TEST(Deskew, TieGoesToSmallestMagnitude) {
  // An empty mask scores 0 everywhere.
  EXPECT_EQ(deskew(BinaryImage(30, 30, 0)).report.applied_angle, 0.0);
}

TEST(Deskew, RejectsBadSteps) {
  const BinaryImage mask(10, 10, 0);
  EXPECT_THROW(deskew(mask, {5.0, 0.0, 0.05}), Error);
  EXPECT_THROW(deskew(mask, {5.0, 0.5, -1.0}), Error);
  EXPECT_THROW(deskew(mask, {5.0, 6.0, 0.05}), Error);
}

}  // namespace
}  // namespace transcriptor::preprocess
