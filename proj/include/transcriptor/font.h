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

#ifndef TRANSCRIPTOR_FONT_H_
#define TRANSCRIPTOR_FONT_H_

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "transcriptor/image.h"

namespace transcriptor::font {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

// 5x7 bitmap rows, most significant of the low five bits is the left column.
// Covers '0'-'9', '.', ',', ':', 'L', 'O', 'P'.
bool has_glyph(char ch);
const std::array<std::uint8_t, kGlyphHeight>& glyph(char ch);

struct GlyphPlacement {
  int dx = 0;  // extra horizontal offset
  int dy = 0;  // extra vertical offset
};

// Width of `text` at `scale` with `spacing` pixels between glyphs.
int text_width(std::string_view text, int scale, int spacing);

// Draws black glyphs with their top-left corner at (x, y); pixels outside the
// image are clipped. `jitter`, when non-empty, offsets glyph i by jitter[i].
void draw_text(GrayImage& img, int x, int y, std::string_view text, int scale, int spacing,
               std::span<const GlyphPlacement> jitter = {});

}  // namespace transcriptor::font

#endif  // TRANSCRIPTOR_FONT_H_
