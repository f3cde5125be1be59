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

#include "transcriptor/crnn.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <tuple>

#include "transcriptor/error.h"
#include "transcriptor/parallel.h"

namespace transcriptor::crnn {
namespace {

std::vector<TensorSpec> conv_tensors(const std::string& prefix, std::size_t k,
                                     std::size_t cin, std::size_t cout) {
  return {
      {prefix + ".kernel", {k, k, cin, cout}},
      {prefix + ".bias", {cout}},
      {prefix + ".bn.gamma", {cout}},
      {prefix + ".bn.beta", {cout}},
      {prefix + ".bn.mean", {cout}},
      {prefix + ".bn.var", {cout}},
  };
}

std::vector<TensorSpec> lstm_tensors(const std::string& prefix, std::size_t input,
                                     std::size_t hidden) {
  std::vector<TensorSpec> out;
  for (const char* gate : {"i", "f", "g", "o"}) {
    out.push_back({prefix + ".w_" + gate, {hidden, input}});
  }
  for (const char* gate : {"i", "f", "g", "o"}) {
    out.push_back({prefix + ".u_" + gate, {hidden, hidden}});
  }
  for (const char* gate : {"i", "f", "g", "o"}) {
    out.push_back({prefix + ".b_" + gate, {hidden}});
  }
  return out;
}

LayerSpec make_layer(const std::string& name, LayerKind kind) {
  LayerSpec layer;
  layer.name = name;
  layer.kind = kind;
  return layer;
}

template <typename... Parts>
std::vector<TensorSpec> concat(Parts&&... parts) {
  std::vector<TensorSpec> out;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

LayerSpec conv_layer(const std::string& name, std::size_t cin, std::size_t cout) {
  LayerSpec layer = make_layer(name, LayerKind::kConv);
  layer.conv_layers = 1;
  layer.tensors = conv_tensors(name, 3, cin, cout);
  return layer;
}

LayerSpec residual_layer(const std::string& name, std::size_t cin, std::size_t cout) {
  LayerSpec layer = make_layer(name, LayerKind::kResidualBlock);
  layer.conv_layers = 2;
  layer.projection = cin != cout;
  layer.tensors = concat(conv_tensors(name + ".conv_a", 3, cin, cout),
                         conv_tensors(name + ".conv_b", 3, cout, cout));
  if (layer.projection) {
    const auto proj = conv_tensors(name + ".proj", 1, cin, cout);
    layer.tensors.insert(layer.tensors.end(), proj.begin(), proj.end());
  }
  return layer;
}

LayerSpec pool_layer(const std::string& name, nn::Window window, nn::Stride stride) {
  LayerSpec layer = make_layer(name, LayerKind::kMaxPool);
  layer.pool = window;
  layer.pool_stride = stride;
  return layer;
}

LayerSpec bilstm_layer_spec(const std::string& name, std::size_t input, std::size_t hidden) {
  LayerSpec layer = make_layer(name, LayerKind::kBiLstm);
  layer.tensors = concat(lstm_tensors(name + ".fwd", input, hidden),
                         lstm_tensors(name + ".bwd", input, hidden));
  return layer;
}

ArchitectureManifest build_manifest() {
  ArchitectureManifest m;
  m.input = {kInputHeight, kInputWidth, 1};
  m.steps = kSteps;
  m.classes = kClasses;
  m.layers.push_back(conv_layer("conv0", 1, 32));
  m.layers.push_back(residual_layer("res1", 32, 32));
  m.layers.push_back(pool_layer("pool1", {2, 2}, {2, 2}));      // 20 x 50
  m.layers.push_back(residual_layer("res2", 32, 64));
  m.layers.push_back(pool_layer("pool2", {2, 2}, {2, 2}));      // 10 x 25
  m.layers.push_back(residual_layer("res3", 64, 128));
  m.layers.push_back(pool_layer("pool3", {2, 1}, {2, 1}));      // 5 x 25
  m.layers.push_back(residual_layer("res4", 128, 128));
  m.layers.push_back(conv_layer("conv9", 128, 128));
  m.layers.push_back(make_layer("fold", LayerKind::kSequenceFold));
  m.layers.push_back(bilstm_layer_spec("bilstm1", 5 * 128, 128));
  m.layers.push_back(bilstm_layer_spec("bilstm2", 256, 128));
  LayerSpec dense = make_layer("dense", LayerKind::kDense);
  dense.tensors = {{"dense.weight", {kClasses, 256}}, {"dense.bias", {kClasses}}};
  m.layers.push_back(std::move(dense));
  return m;
}

const TensorSpec* find_spec(std::string_view name) {
  static const std::vector<TensorSpec> specs = manifest().tensor_specs();
  for (const TensorSpec& s : specs) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

// Little-endian primitives.
class ByteWriter {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncatedFile, "weight file ends unexpectedly");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    auto b = take(4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[4] = {'C', 'R', 'N', 'W'};

}  // namespace

int ArchitectureManifest::conv_layer_count() const {
  int n = 0;
  for (const LayerSpec& l : layers) n += l.conv_layers;
  return n;
}

int ArchitectureManifest::bilstm_count() const {
  return static_cast<int>(std::count_if(layers.begin(), layers.end(), [](const LayerSpec& l) {
    return l.kind == LayerKind::kBiLstm;
  }));
}

bool ArchitectureManifest::has_global_pooling() const {
  // A pooling layer is global when its window spans the whole feature map.
  nn::Shape shape = input;
  for (const LayerSpec& l : layers) {
    if (l.kind != LayerKind::kMaxPool) continue;
    if (l.pool.h >= shape[0] && l.pool.w >= shape[1]) return true;
    shape[0] = (shape[0] - l.pool.h) / l.pool_stride.y + 1;
    shape[1] = (shape[1] - l.pool.w) / l.pool_stride.x + 1;
  }
  return false;
}

std::vector<TensorSpec> ArchitectureManifest::tensor_specs() const {
  std::vector<TensorSpec> out;
  for (const LayerSpec& l : layers) out.insert(out.end(), l.tensors.begin(), l.tensors.end());
  return out;
}

const ArchitectureManifest& manifest() {
  static const ArchitectureManifest m = build_manifest();
  return m;
}

void ModelWeights::set(const std::string& name, nn::Tensor tensor) {
  const TensorSpec* spec = find_spec(name);
  if (spec == nullptr) {
    throw Error(ErrorCode::kExtraTensor, "tensor not in manifest: " + name, name);
  }
  if (tensor.shape() != spec->shape) {
    throw Error(ErrorCode::kShapeMismatch,
                name + " has shape " + nn::shape_string(tensor.shape()) + ", expected " +
                    nn::shape_string(spec->shape),
                name);
  }
  tensors_.insert_or_assign(name, std::move(tensor));
}

const nn::Tensor& ModelWeights::at(std::string_view name) const {
  const auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw Error(ErrorCode::kMissingTensor, "missing tensor " + std::string(name),
                std::string(name));
  }
  return it->second;
}

bool ModelWeights::contains(std::string_view name) const {
  return tensors_.find(name) != tensors_.end();
}

std::vector<std::string> ModelWeights::missing() const {
  std::vector<std::string> out;
  for (const TensorSpec& s : manifest().tensor_specs()) {
    if (!contains(s.name)) out.push_back(s.name);
  }
  return out;
}

void ModelWeights::require_complete() const {
  const auto absent = missing();
  if (!absent.empty()) {
    throw Error(ErrorCode::kIncompleteWeights,
                std::to_string(absent.size()) + " tensors missing, first: " + absent.front(),
                absent.front());
  }
}

bool ModelWeights::identical(const ModelWeights& other) const {
  if (version_ != other.version_ || tensors_.size() != other.tensors_.size()) return false;
  for (const auto& [name, tensor] : tensors_) {
    const auto it = other.tensors_.find(name);
    if (it == other.tensors_.end() || !tensor.identical(it->second)) return false;
  }
  return true;
}

std::vector<std::uint8_t> serialize_weights(const ModelWeights& weights) {
  weights.require_complete();
  const auto specs = manifest().tensor_specs();
  ByteWriter out;
  out.bytes(kMagic, 4);
  out.u32(weights.version());
  out.u32(static_cast<std::uint32_t>(specs.size()));
  for (const TensorSpec& s : specs) {
    const nn::Tensor& t = weights.at(s.name);
    out.u16(static_cast<std::uint16_t>(s.name.size()));
    out.bytes(s.name.data(), s.name.size());
    out.u8(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d : t.shape()) out.u32(static_cast<std::uint32_t>(d));
    for (float v : t.values()) out.f32(v);
  }
  return out.take();
}

std::size_t serialized_size() {
  std::size_t size = 4 + 4 + 4;
  for (const TensorSpec& s : manifest().tensor_specs()) {
    size += 2 + s.name.size() + 1 + 4 * s.shape.size() + 4 * nn::element_count(s.shape);
  }
  return size;
}

ModelWeights parse_weights(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto magic = in.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a CRNW weight file");
  }
  const std::uint32_t version = in.u32();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported weight format version " + std::to_string(version));
  }
  const std::uint32_t count = in.u32();
  ModelWeights weights;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t name_len = in.u16();
    const auto name_bytes = in.take(name_len);
    const std::string name(name_bytes.begin(), name_bytes.end());
    const std::uint8_t rank = in.u8();
    nn::Shape shape(rank);
    for (auto& d : shape) d = in.u32();
    const TensorSpec* spec = find_spec(name);
    if (spec == nullptr) {
      throw Error(ErrorCode::kExtraTensor, "tensor not in manifest: " + name, name);
    }
    if (weights.contains(name)) {
      throw Error(ErrorCode::kExtraTensor, "duplicate tensor " + name, name);
    }
    if (shape != spec->shape) {
      throw Error(ErrorCode::kShapeMismatch,
                  name + " has shape " + nn::shape_string(shape) + ", expected " +
                      nn::shape_string(spec->shape),
                  name);
    }
    const std::size_t n = nn::element_count(shape);
    const auto payload = in.take(4 * n);
    std::vector<float> data(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint32_t bits = static_cast<std::uint32_t>(payload[4 * k]) |
                                 (static_cast<std::uint32_t>(payload[4 * k + 1]) << 8) |
                                 (static_cast<std::uint32_t>(payload[4 * k + 2]) << 16) |
                                 (static_cast<std::uint32_t>(payload[4 * k + 3]) << 24);
      data[k] = std::bit_cast<float>(bits);
    }
    weights.set(name, nn::Tensor(std::move(shape), std::move(data)));
  }
  if (in.remaining() != 0) {
    throw Error(ErrorCode::kExtraData,
                std::to_string(in.remaining()) + " trailing bytes after the last tensor");
  }
  const auto absent = weights.missing();
  if (!absent.empty()) {
    throw Error(ErrorCode::kMissingTensor, "missing tensor " + absent.front(), absent.front());
  }
  return weights;
}

ModelWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "cannot open weights " + path.string(), path.string());
  }
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return parse_weights(bytes);
}

void save_weights(const ModelWeights& weights, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_weights(weights);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "cannot write " + path.string(), path.string());
  }
}

ModelWeights random_weights(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // 53 random bits -> [0, 1); mt19937_64 output is fixed by the standard.
  auto uniform = [&rng](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return static_cast<float>(lo + (hi - lo) * u);
  };
  auto ends_with = [](const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };

  ModelWeights w;
  for (const TensorSpec& s : manifest().tensor_specs()) {
    double lo = -0.05, hi = 0.05;
    if (ends_with(s.name, ".kernel")) {
      const double fan = static_cast<double>(s.shape[0] * s.shape[1]) * (s.shape[2] + s.shape[3]);
      hi = std::sqrt(6.0 / fan);
      lo = -hi;
    } else if (ends_with(s.name, ".bn.gamma")) {
      lo = 0.8, hi = 1.2;
    } else if (ends_with(s.name, ".bn.var")) {
      lo = 0.5, hi = 1.5;
    } else if (ends_with(s.name, ".bn.beta") || ends_with(s.name, ".bn.mean")) {
      lo = -0.1, hi = 0.1;
    } else if (s.name.starts_with("bilstm")) {
      hi = 1.0 / std::sqrt(static_cast<double>(s.shape[0]));
      lo = -hi;
    } else if (s.name == "dense.weight") {
      hi = std::sqrt(6.0 / static_cast<double>(s.shape[0] + s.shape[1]));
      lo = -hi;
    }
    nn::Tensor t(s.shape);
    for (float& v : t.values()) v = uniform(lo, hi);
    w.set(s.name, std::move(t));
  }
  return w;
}

nn::Tensor preprocess_cell(const GrayImage& cell) {
  if (cell.empty()) throw Error(ErrorCode::kEmptyImage, "empty cell image");
  const double H = static_cast<double>(kInputHeight);
  const double W = static_cast<double>(kInputWidth);
  const double scale = std::min(H / cell.height(), W / cell.width());
  const int nh = std::clamp(static_cast<int>(std::lround(cell.height() * scale)), 1,
                            static_cast<int>(kInputHeight));
  const int nw = std::clamp(static_cast<int>(std::lround(cell.width() * scale)), 1,
                            static_cast<int>(kInputWidth));
  const int top = (static_cast<int>(kInputHeight) - nh) / 2;

  // Half-pixel-centre bilinear resampling, edge-clamped.
  const double sy = static_cast<double>(cell.height()) / nh;
  const double sx = static_cast<double>(cell.width()) / nw;
  auto source = [](double dst, double ratio, int n) {
    const double s = std::clamp((dst + 0.5) * ratio - 0.5, 0.0, static_cast<double>(n - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, n - 1);
    return std::tuple{i0, i1, s - i0};
  };

  nn::Tensor out({kInputHeight, kInputWidth, 1}, 0.0f);
  for (int y = 0; y < nh; ++y) {
    const auto [y0, y1, fy] = source(y, sy, cell.height());
    for (int x = 0; x < nw; ++x) {
      const auto [x0, x1, fx] = source(x, sx, cell.width());
      const double top_row = cell.at(x0, y0) * (1 - fx) + cell.at(x1, y0) * fx;
      const double bottom_row = cell.at(x0, y1) * (1 - fx) + cell.at(x1, y1) * fx;
      const double p = top_row * (1 - fy) + bottom_row * fy;
      out[(static_cast<std::size_t>(top + y) * kInputWidth + x)] =
          static_cast<float>((255.0 - p) / 255.0);
    }
  }
  return out;
}

nn::Tensor conv_bn(const ModelWeights& w, std::string_view prefix, const nn::Tensor& x) {
  const std::string p(prefix);
  const nn::Tensor y = nn::conv2d(x, w.at(p + ".kernel"), w.at(p + ".bias"), {1, 1}, true);
  return nn::batchnorm_infer(y, w.at(p + ".bn.gamma"), w.at(p + ".bn.beta"),
                             w.at(p + ".bn.mean"), w.at(p + ".bn.var"));
}

nn::Tensor residual_block(const ModelWeights& w, const LayerSpec& layer, const nn::Tensor& x) {
  nn::Tensor a = conv_bn(w, layer.name + ".conv_a", x);
  nn::activation_inplace(a.values(), nn::Activation::kRelu);
  const nn::Tensor b = conv_bn(w, layer.name + ".conv_b", a);
  nn::Tensor out = layer.projection ? nn::add(b, conv_bn(w, layer.name + ".proj", x))
                                    : nn::add(b, x);
  nn::activation_inplace(out.values(), nn::Activation::kRelu);
  return out;
}

nn::LstmParams lstm_params(const ModelWeights& w, std::string_view prefix) {
  const std::string p(prefix);
  return {w.at(p + ".w_i"), w.at(p + ".w_f"), w.at(p + ".w_g"), w.at(p + ".w_o"),
          w.at(p + ".u_i"), w.at(p + ".u_f"), w.at(p + ".u_g"), w.at(p + ".u_o"),
          w.at(p + ".b_i"), w.at(p + ".b_f"), w.at(p + ".b_g"), w.at(p + ".b_o")};
}

ctc::LogitsSequence forward(const ModelWeights& w, const nn::Tensor& x) {
  const ArchitectureManifest& m = manifest();
  if (x.shape() != m.input) {
    throw Error(ErrorCode::kShapeMismatch,
                "network input must be " + nn::shape_string(m.input) + ", got " +
                    nn::shape_string(x.shape()));
  }
  nn::Tensor feature = x;
  nn::Sequence seq;
  std::vector<double> logits;
  logits.reserve(m.steps * m.classes);
  for (const LayerSpec& layer : m.layers) {
    switch (layer.kind) {
      case LayerKind::kConv:
        feature = conv_bn(w, layer.name, feature);
        nn::activation_inplace(feature.values(), nn::Activation::kRelu);
        break;
      case LayerKind::kResidualBlock:
        feature = residual_block(w, layer, feature);
        break;
      case LayerKind::kMaxPool:
        feature = nn::maxpool2d(feature, layer.pool, layer.pool_stride);
        break;
      case LayerKind::kSequenceFold: {
        // Column w becomes step w; features ordered (row, channel).
        const std::size_t H = feature.dim(0), W = feature.dim(1), C = feature.dim(2);
        seq.assign(W, std::vector<float>(H * C));
        for (std::size_t y = 0; y < H; ++y) {
          for (std::size_t col = 0; col < W; ++col) {
            const float* src = feature.data() + (y * W + col) * C;
            std::copy_n(src, C, seq[col].begin() + static_cast<std::ptrdiff_t>(y * C));
          }
        }
        break;
      }
      case LayerKind::kBiLstm:
        seq = nn::bilstm_layer(seq, lstm_params(w, layer.name + ".fwd"),
                               lstm_params(w, layer.name + ".bwd"));
        break;
      case LayerKind::kDense:
        for (const auto& step : seq) {
          const auto y = nn::dense(step, w.at("dense.weight"), w.at("dense.bias"));
          const auto row = nn::log_softmax(std::span<const float>(y));
          logits.insert(logits.end(), row.begin(), row.end());
        }
        break;
    }
  }
  return ctc::LogitsSequence(seq.size(), m.classes, std::move(logits));
}

std::vector<ctc::LogitsSequence> forward_batch(const ModelWeights& w,
                                               std::span<const nn::Tensor> inputs,
                                               unsigned threads) {
  std::vector<ctc::LogitsSequence> out(inputs.size());
  parallel_for(inputs.size(), [&](std::size_t i) { out[i] = forward(w, inputs[i]); }, threads);
  return out;
}

}  // namespace transcriptor::crnn
