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

#ifndef TRANSCRIPTOR_CRNN_H_
#define TRANSCRIPTOR_CRNN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transcriptor/ctc.h"
#include "transcriptor/image.h"
#include "transcriptor/tensor.h"

namespace transcriptor::crnn {

inline constexpr std::size_t kInputHeight = 40;
inline constexpr std::size_t kInputWidth = 100;
inline constexpr std::size_t kSteps = 25;
inline constexpr std::size_t kClasses = 13;
inline constexpr std::uint32_t kFormatVersion = 1;

enum class LayerKind {
  kConv,            // conv + batch norm + ReLU
  kResidualBlock,   // two convs, identity or 1x1 projection shortcut
  kMaxPool,
  kSequenceFold,    // H x W x C -> W steps of H*C features
  kBiLstm,
  kDense,           // followed by per-step log-softmax
};

struct TensorSpec {
  std::string name;
  nn::Shape shape;
};

struct LayerSpec {
  std::string name;
  LayerKind kind;
  // Convolutions inside this layer counted toward the network depth; 1x1
  // projection shortcuts are not counted.
  int conv_layers = 0;
  bool projection = false;
  nn::Window pool{};
  nn::Stride pool_stride{};
  std::vector<TensorSpec> tensors;
};

struct ArchitectureManifest {
  nn::Shape input;           // 40 x 100 x 1
  std::size_t steps = 0;     // 25
  std::size_t classes = 0;   // 13
  std::vector<LayerSpec> layers;

  int conv_layer_count() const;
  int bilstm_count() const;
  bool has_global_pooling() const;
  // Every tensor in serialization order.
  std::vector<TensorSpec> tensor_specs() const;
};

const ArchitectureManifest& manifest();

// Named tensors validated against the manifest on every insertion.
class ModelWeights {
 public:
  ModelWeights() = default;

  // Throws ExtraTensor for names outside the manifest, ShapeMismatch for
  // wrong shapes.
  void set(const std::string& name, nn::Tensor tensor);
  const nn::Tensor& at(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t size() const { return tensors_.size(); }
  std::vector<std::string> missing() const;
  bool complete() const { return missing().empty(); }
  // Throws IncompleteWeights naming the first missing tensor.
  void require_complete() const;
  std::uint32_t version() const { return version_; }

  // Shape and payload equal bit for bit.
  bool identical(const ModelWeights& other) const;

 private:
  std::map<std::string, nn::Tensor, std::less<>> tensors_;
  std::uint32_t version_ = kFormatVersion;
};

// CRNW1 container (little-endian): "CRNW", u32 version, u32 count, then per
// tensor in manifest order: u16 name length, name, u8 rank, rank x u32 dims,
// f32 payload.
std::vector<std::uint8_t> serialize_weights(const ModelWeights& weights);
ModelWeights parse_weights(std::span<const std::uint8_t> bytes);
ModelWeights load_weights(const std::filesystem::path& path);
void save_weights(const ModelWeights& weights, const std::filesystem::path& path);

// Size the canonical serialization must have, derived from the manifest.
std::size_t serialized_size();

// Structurally valid untrained weights drawn from a seeded generator, scaled so
// activations stay well-conditioned through the full stack.
ModelWeights random_weights(std::uint64_t seed);

// Aspect-preserving bilinear fit into 40 x 100 (height or width binds),
// centered vertically, left-aligned, padded with white, then v = (255-p)/255.
nn::Tensor preprocess_cell(const GrayImage& cell);

// Building blocks addressed by manifest layer name.
nn::Tensor conv_bn(const ModelWeights& w, std::string_view prefix, const nn::Tensor& x);
nn::Tensor residual_block(const ModelWeights& w, const LayerSpec& layer, const nn::Tensor& x);
nn::LstmParams lstm_params(const ModelWeights& w, std::string_view prefix);

// 40 x 100 x 1 input -> 25 x 13 log-probabilities.
ctc::LogitsSequence forward(const ModelWeights& w, const nn::Tensor& x);

std::vector<ctc::LogitsSequence> forward_batch(const ModelWeights& w,
                                               std::span<const nn::Tensor> inputs,
                                               unsigned threads = 0);

}  // namespace transcriptor::crnn

#endif  // TRANSCRIPTOR_CRNN_H_
