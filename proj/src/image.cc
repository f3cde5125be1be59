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

#include "transcriptor/image.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "transcriptor/error.h"

namespace transcriptor {

template <typename Pixel>
Raster<Pixel>::Raster(int width, int height, Pixel fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidParam, "negative raster dimensions");
  }
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

template <typename Pixel>
Raster<Pixel>::Raster(int width, int height, std::vector<Pixel> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0 ||
      data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kShapeMismatch, "raster data length != width*height");
  }
}

template class Raster<std::uint8_t>;

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // Integer form of floor(0.299R + 0.587G + 0.114B + 0.5).
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then parses one decimal field.
  long next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::kCorruptHeader, "expected a number in PNM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1L << 30)) {
        throw Error(ErrorCode::kCorruptHeader, "PNM header field too large");
      }
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t data_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::kCorruptHeader, "missing separator before raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kMissingFile, "no such file: " + path.string(),
                path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "cannot open: " + path.string(),
                path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kCorruptHeader,
                std::string("PNG header: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::kCorruptHeader,
                std::string("PNG data: ") + image.message);
  }
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
  return GrayImage(width, height, std::move(data));
}

}  // namespace

GrayImage decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::kUnsupportedFormat, "not a binary PGM/PPM file");
  }
  const bool color = bytes[1] == '6';
  HeaderReader header(bytes);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kCorruptHeader, "image dimensions must be positive");
  }
  if (maxval != 255) {
    throw Error(ErrorCode::kUnsupportedFormat, "only maxval 255 is supported");
  }
  const std::size_t offset = header.data_offset();
  const std::size_t pixels = static_cast<std::size_t>(width) * height;
  const std::size_t needed = pixels * (color ? 3 : 1);
  if (bytes.size() < offset || bytes.size() - offset < needed) {
    throw Error(ErrorCode::kCorruptHeader, "raster shorter than width*height");
  }
  std::vector<std::uint8_t> data(pixels);
  const std::uint8_t* src = bytes.data() + offset;
  if (color) {
    for (std::size_t i = 0; i < pixels; ++i) {
      data[i] = luma(src[3 * i], src[3 * i + 1], src[3 * i + 2]);
    }
  } else {
    std::copy_n(src, pixels, data.begin());
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height),
                   std::move(data));
}

GrayImage load_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (is_png(bytes)) return decode_png(bytes);
  return decode_pnm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data().begin(), img.data().end());
  return out;
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  if (img.empty()) {
    throw Error(ErrorCode::kEmptyImage, "cannot save an empty image");
  }
  const std::vector<std::uint8_t> bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "cannot write " + path.string(),
                path.string());
  }
}

GrayImage to_gray(const BinaryImage& mask) {
  GrayImage out(mask.width(), mask.height());
  std::transform(mask.data().begin(), mask.data().end(), out.data().begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 0 : 255; });
  return out;
}

GrayImage crop(const GrayImage& img, int x0, int y0, int x1, int y1) {
  if (x0 < 0 || y0 < 0 || x1 > img.width() || y1 > img.height() || x1 <= x0 ||
      y1 <= y0) {
    throw Error(ErrorCode::kIndexOutOfRange, "crop rectangle outside image");
  }
  GrayImage out(x1 - x0, y1 - y0);
  for (int y = y0; y < y1; ++y) {
    const auto src = img.row(y).subspan(x0, x1 - x0);
    std::copy(src.begin(), src.end(), out.row(y - y0).begin());
  }
  return out;
}

}  // namespace transcriptor
