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

#include "transcriptor/font.h"

#include "transcriptor/error.h"

namespace transcriptor::font {
namespace {

using Bitmap = std::array<std::uint8_t, kGlyphHeight>;

struct Entry {
  char ch;
  Bitmap rows;
};

constexpr Entry kGlyphs[] = {
    {'0', {0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110}},
    {'1', {0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}},
    {'2', {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111}},
    {'3', {0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110}},
    {'4', {0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010}},
    {'5', {0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110}},
    {'6', {0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110}},
    {'7', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000}},
    {'8', {0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110}},
    {'9', {0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100}},
    {'.', {0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b01100, 0b01100}},
    {',', {0b00000, 0b00000, 0b00000, 0b00000, 0b01100, 0b00100, 0b01000}},
    {':', {0b00000, 0b01100, 0b01100, 0b00000, 0b01100, 0b01100, 0b00000}},
    {'L', {0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111}},
    {'O', {0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110}},
    {'P', {0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000}},
};

}  // namespace

bool has_glyph(char ch) {
  for (const Entry& e : kGlyphs) {
    if (e.ch == ch) return true;
  }
  return false;
}

const Bitmap& glyph(char ch) {
  for (const Entry& e : kGlyphs) {
    if (e.ch == ch) return e.rows;
  }
  throw Error(ErrorCode::kInvalidParam, std::string("no glyph for '") + ch + "'");
}

int text_width(std::string_view text, int scale, int spacing) {
  if (text.empty()) return 0;
  const int n = static_cast<int>(text.size());
  return n * kGlyphWidth * scale + (n - 1) * spacing;
}

void draw_text(GrayImage& img, int x, int y, std::string_view text, int scale, int spacing,
               std::span<const GlyphPlacement> jitter) {
  if (scale < 1) throw Error(ErrorCode::kInvalidParam, "glyph scale must be >= 1");
  int pen = x;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const Bitmap& rows = glyph(text[i]);
    const GlyphPlacement offset = i < jitter.size() ? jitter[i] : GlyphPlacement{};
    const int gx = pen + offset.dx;
    const int gy = y + offset.dy;
    for (int r = 0; r < kGlyphHeight; ++r) {
      for (int c = 0; c < kGlyphWidth; ++c) {
        if (!(rows[r] & (1 << (kGlyphWidth - 1 - c)))) continue;
        for (int sy = 0; sy < scale; ++sy) {
          for (int sx = 0; sx < scale; ++sx) {
            const int px = gx + c * scale + sx;
            const int py = gy + r * scale + sy;
            if (img.contains(px, py)) img.at(px, py) = 0;
          }
        }
      }
    }
    pen += kGlyphWidth * scale + spacing;
  }
}

}  // namespace transcriptor::font
