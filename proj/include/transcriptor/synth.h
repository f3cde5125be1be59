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

#ifndef TRANSCRIPTOR_SYNTH_H_
#define TRANSCRIPTOR_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "transcriptor/image.h"
#include "transcriptor/pipeline.h"

namespace transcriptor::synth {

struct SynthOptions {
  std::uint64_t seed = 1;
  int rows = 30;
  double skew_deg = 0.0;
  double noise_sigma = 0.0;
};

// A cell rendered on the page, cropped before ruling, skew and noise.
struct CellPatch {
  int row = 0;
  int col = 0;
  std::string label;
  GrayImage image;
};

struct SynthPage {
  GrayImage image;
  pipeline::PageTruth truth;
  std::vector<CellPatch> patches;  // ID and score cells in row order
};

inline constexpr int kPageWidth = 1240;
inline constexpr int kMinPageHeight = 1754;
inline constexpr int kColumns = 7;

// Image the class-ID anchor is matched against: "LOP:" at scale 4 with a
// 4 pixel white margin, exactly as drawn on every page.
GrayImage class_anchor();

// Renders a transcript page. Deterministic in the options.
SynthPage synthesize(const SynthOptions& options);

struct SynthFiles {
  std::filesystem::path image;
  std::filesystem::path truth;
};

// Writes page_<seed>.pgm and page_<seed>.truth.json to out_dir, and the class
// anchor to out_dir/templates/anchor.pgm.
SynthFiles synth_transcript(std::uint64_t seed, int rows, double skew_deg, double noise_sigma,
                            const std::filesystem::path& out_dir);

}  // namespace transcriptor::synth

#endif  // TRANSCRIPTOR_SYNTH_H_
