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

#ifndef TRANSCRIPTOR_IMAGE_H_
#define TRANSCRIPTOR_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace transcriptor {

// Row-major raster with a top-left origin; y grows downward.
template <typename Pixel>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Pixel fill = Pixel{});
  Raster(int width, int height, std::vector<Pixel> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Pixel at(int x, int y) const { return data_[index(x, y)]; }
  Pixel& at(int x, int y) { return data_[index(x, y)]; }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const Pixel> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }
  std::span<Pixel> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }

  const std::vector<Pixel>& data() const { return data_; }
  std::vector<Pixel>& data() { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> data_;
};

// 8-bit intensities, 0 = black, 255 = white.
using GrayImage = Raster<std::uint8_t>;
// Values in {0,1}; 1 = ink.
using BinaryImage = Raster<std::uint8_t>;

// Reads binary PGM (P5, maxval 255), binary PPM (P6, converted by luma) or PNG.
GrayImage load_image(const std::filesystem::path& path);
// Writes binary PGM with the header "P5\n<w> <h>\n255\n".
void save_image(const GrayImage& img, const std::filesystem::path& path);

GrayImage decode_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

// Luma 0.299R + 0.587G + 0.114B rounded half-up.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Ink (1) becomes black (0), background (0) becomes white (255).
GrayImage to_gray(const BinaryImage& mask);

// Sub-rectangle [x0, x1) x [y0, y1); bounds must lie inside the image.
GrayImage crop(const GrayImage& img, int x0, int y0, int x1, int y1);

}  // namespace transcriptor

#endif  // TRANSCRIPTOR_IMAGE_H_
