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

#ifndef TRANSCRIPTOR_TENSOR_H_
#define TRANSCRIPTOR_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace transcriptor::nn {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense float32 array, row-major (last index fastest).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }

  std::span<const float> values() const { return data_; }
  std::span<float> values() { return data_; }
  const float* data() const { return data_.data(); }
  float* data() { return data_.data(); }
  float operator[](std::size_t i) const { return data_[i]; }
  float& operator[](std::size_t i) { return data_[i]; }

  // Bitwise comparison of shape and payload.
  bool identical(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<float> data_;
};

struct Stride {
  std::size_t y = 1;
  std::size_t x = 1;
};

struct Window {
  std::size_t h = 2;
  std::size_t w = 2;
};

// x: H x W x C, kernel: Kh x Kw x C x F, bias: F. SAME padding puts the odd
// padding pixel at the bottom/right.
Tensor conv2d(const Tensor& x, const Tensor& kernel, const Tensor& bias,
              Stride stride = {}, bool same_pad = true);

// Normalizes the last axis with stored statistics.
Tensor batchnorm_infer(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       const Tensor& mean, const Tensor& var, float eps = 1e-5f);

// Valid (unpadded) max pooling over H x W x C.
Tensor maxpool2d(const Tensor& x, Window window, Stride stride);

enum class Activation { kRelu, kSigmoid, kTanh };

Tensor activation(const Tensor& x, Activation kind);
void activation_inplace(std::span<float> x, Activation kind);

Tensor add(const Tensor& a, const Tensor& b);

// y = W x + b with W of shape M x N.
std::vector<float> dense(std::span<const float> x, const Tensor& weight,
                         const Tensor& bias);

// v - max(v) - log(sum(exp(v - max(v)))).
std::vector<double> log_softmax(std::span<const double> v);
std::vector<double> log_softmax(std::span<const float> v);

// Per-gate parameters of a peephole-free LSTM. W_*: hidden x input,
// U_*: hidden x hidden, b_*: hidden. Gates are i, f, g (candidate), o.
struct LstmParams {
  Tensor w_i, w_f, w_g, w_o;
  Tensor u_i, u_f, u_g, u_o;
  Tensor b_i, b_f, b_g, b_o;

  std::size_t hidden() const { return b_i.size(); }
  std::size_t input() const { return w_i.rank() == 2 ? w_i.dim(1) : 0; }
  // Throws ShapeMismatch unless every gate agrees on (hidden, input).
  void validate() const;
};

struct LstmState {
  std::vector<float> h;
  std::vector<float> c;
};

LstmState lstm_cell(std::span<const float> x, std::span<const float> h_prev,
                    std::span<const float> c_prev, const LstmParams& p);

using Sequence = std::vector<std::vector<float>>;

// Unidirectional rollout from zero state.
Sequence lstm_layer(const Sequence& seq, const LstmParams& p, bool reverse = false);

// Concatenates forward and (re-reversed) backward hidden states per step.
Sequence bilstm_layer(const Sequence& seq, const LstmParams& fwd, const LstmParams& bwd);

}  // namespace transcriptor::nn

#endif  // TRANSCRIPTOR_TENSOR_H_
