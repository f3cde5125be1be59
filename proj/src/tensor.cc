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

#include "transcriptor/tensor.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>

#include "transcriptor/error.h"

namespace transcriptor::nn {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

Tensor::Tensor(Shape shape, float fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != element_count(shape_)) {
    throw Error(ErrorCode::kShapeMismatch,
                "data length does not match shape " + shape_string(shape_));
  }
}

bool Tensor::identical(const Tensor& other) const {
  return shape_ == other.shape_ &&
         std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

// Leading padding for SAME mode; the remainder goes to the trailing edge.
std::size_t same_padding(std::size_t in, std::size_t out, std::size_t k, std::size_t s) {
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>((out - 1) * s + k) -
                               static_cast<std::ptrdiff_t>(in);
  return total > 0 ? static_cast<std::size_t>(total / 2) : 0;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& kernel, const Tensor& bias, Stride stride,
              bool same_pad) {
  require(x.rank() == 3, "conv2d input must be H x W x C");
  require(kernel.rank() == 4, "conv2d kernel must be Kh x Kw x C x F");
  require(stride.y > 0 && stride.x > 0, "conv2d stride must be positive");
  const std::size_t H = x.dim(0), W = x.dim(1), C = x.dim(2);
  const std::size_t Kh = kernel.dim(0), Kw = kernel.dim(1), F = kernel.dim(3);
  require(kernel.dim(2) == C, "conv2d channel mismatch: input " + shape_string(x.shape()) +
                                  " kernel " + shape_string(kernel.shape()));
  require(bias.rank() == 1 && bias.dim(0) == F, "conv2d bias must have F entries");

  std::size_t Ho, Wo, pad_top = 0, pad_left = 0;
  if (same_pad) {
    Ho = (H + stride.y - 1) / stride.y;
    Wo = (W + stride.x - 1) / stride.x;
    pad_top = same_padding(H, Ho, Kh, stride.y);
    pad_left = same_padding(W, Wo, Kw, stride.x);
  } else {
    require(Kh <= H && Kw <= W, "conv2d kernel larger than input");
    Ho = (H - Kh) / stride.y + 1;
    Wo = (W - Kw) / stride.x + 1;
  }

  Tensor out({Ho, Wo, F});
  const float* in = x.data();
  const float* k = kernel.data();
  float* o = out.data();
  for (std::size_t oy = 0; oy < Ho; ++oy) {
    for (std::size_t ox = 0; ox < Wo; ++ox) {
      float* acc = o + (oy * Wo + ox) * F;
      std::copy_n(bias.data(), F, acc);
      for (std::size_t ky = 0; ky < Kh; ++ky) {
        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride.y + ky) -
                                  static_cast<std::ptrdiff_t>(pad_top);
        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
        for (std::size_t kx = 0; kx < Kw; ++kx) {
          const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride.x + kx) -
                                    static_cast<std::ptrdiff_t>(pad_left);
          if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
          const float* px = in + (static_cast<std::size_t>(iy) * W + ix) * C;
          const float* kc = k + (ky * Kw + kx) * C * F;
          for (std::size_t c = 0; c < C; ++c) {
            const float v = px[c];
            // Zero inputs add nothing; post-ReLU maps are mostly zero.
            if (v == 0.0f) continue;
            const float* kf = kc + c * F;
            for (std::size_t f = 0; f < F; ++f) acc[f] += v * kf[f];
          }
        }
      }
    }
  }
  return out;
}

Tensor batchnorm_infer(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       const Tensor& mean, const Tensor& var, float eps) {
  require(x.rank() >= 1, "batchnorm input must have a channel axis");
  const std::size_t F = x.shape().back();
  for (const Tensor* t : {&gamma, &beta, &mean, &var}) {
    require(t->rank() == 1 && t->dim(0) == F, "batchnorm parameters must have F entries");
  }
  if (!(eps > 0.0f)) throw Error(ErrorCode::kInvalidParam, "batchnorm eps must be > 0");
  std::vector<float> inv_std(F);
  for (std::size_t f = 0; f < F; ++f) inv_std[f] = 1.0f / std::sqrt(var[f] + eps);
  Tensor out(x.shape());
  const std::size_t n = x.size() / std::max<std::size_t>(F, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const float* src = x.data() + i * F;
    float* dst = out.data() + i * F;
    for (std::size_t f = 0; f < F; ++f) {
      dst[f] = gamma[f] * ((src[f] - mean[f]) * inv_std[f]) + beta[f];
    }
  }
  return out;
}

Tensor maxpool2d(const Tensor& x, Window window, Stride stride) {
  require(x.rank() == 3, "maxpool input must be H x W x C");
  require(window.h > 0 && window.w > 0 && stride.y > 0 && stride.x > 0,
          "maxpool window and stride must be positive");
  const std::size_t H = x.dim(0), W = x.dim(1), C = x.dim(2);
  require(window.h <= H && window.w <= W, "maxpool window larger than input");
  const std::size_t Ho = (H - window.h) / stride.y + 1;
  const std::size_t Wo = (W - window.w) / stride.x + 1;
  Tensor out({Ho, Wo, C});
  for (std::size_t oy = 0; oy < Ho; ++oy) {
    for (std::size_t ox = 0; ox < Wo; ++ox) {
      float* dst = out.data() + (oy * Wo + ox) * C;
      const float* first = x.data() + ((oy * stride.y) * W + ox * stride.x) * C;
      std::copy_n(first, C, dst);
      for (std::size_t wy = 0; wy < window.h; ++wy) {
        for (std::size_t wx = 0; wx < window.w; ++wx) {
          const float* src =
              x.data() + ((oy * stride.y + wy) * W + (ox * stride.x + wx)) * C;
          for (std::size_t c = 0; c < C; ++c) dst[c] = std::max(dst[c], src[c]);
        }
      }
    }
  }
  return out;
}

void activation_inplace(std::span<float> x, Activation kind) {
  switch (kind) {
    case Activation::kRelu:
      for (float& v : x) v = v > 0.0f ? v : 0.0f;
      break;
    case Activation::kSigmoid:
      for (float& v : x) v = 1.0f / (1.0f + std::exp(-v));
      break;
    case Activation::kTanh:
      for (float& v : x) v = std::tanh(v);
      break;
  }
}

Tensor activation(const Tensor& x, Activation kind) {
  Tensor out = x;
  activation_inplace(out.values(), kind);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "add: shapes differ " + shape_string(a.shape()) +
                                      " vs " + shape_string(b.shape()));
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

std::vector<float> dense(std::span<const float> x, const Tensor& weight, const Tensor& bias) {
  require(weight.rank() == 2, "dense weight must be M x N");
  const std::size_t M = weight.dim(0), N = weight.dim(1);
  require(x.size() == N, "dense input length " + std::to_string(x.size()) +
                             " != " + std::to_string(N));
  require(bias.rank() == 1 && bias.dim(0) == M, "dense bias must have M entries");
  std::vector<float> y(M);
  for (std::size_t m = 0; m < M; ++m) {
    const float* row = weight.data() + m * N;
    float acc = 0.0f;
    for (std::size_t n = 0; n < N; ++n) acc += row[n] * x[n];
    y[m] = acc + bias[m];
  }
  return y;
}

std::vector<double> log_softmax(std::span<const double> v) {
  if (v.empty()) return {};
  const double max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double e : v) sum += std::exp(e - max);
  const double log_sum = std::log(sum);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - max - log_sum;
  return out;
}

std::vector<double> log_softmax(std::span<const float> v) {
  const std::vector<double> wide(v.begin(), v.end());
  return log_softmax(std::span<const double>(wide));
}

void LstmParams::validate() const {
  const std::size_t H = hidden();
  const std::size_t I = input();
  require(H > 0 && I > 0, "LSTM parameters are empty");
  for (const Tensor* w : {&w_i, &w_f, &w_g, &w_o}) {
    require(w->rank() == 2 && w->dim(0) == H && w->dim(1) == I,
            "LSTM input weights must be hidden x input");
  }
  for (const Tensor* u : {&u_i, &u_f, &u_g, &u_o}) {
    require(u->rank() == 2 && u->dim(0) == H && u->dim(1) == H,
            "LSTM recurrent weights must be hidden x hidden");
  }
  for (const Tensor* b : {&b_i, &b_f, &b_g, &b_o}) {
    require(b->rank() == 1 && b->dim(0) == H, "LSTM biases must have hidden entries");
  }
}

namespace {

// W x + U h + b for one gate.
void gate_preactivation(const Tensor& w, const Tensor& u, const Tensor& b,
                        std::span<const float> x, std::span<const float> h,
                        std::span<float> out) {
  const std::size_t H = out.size();
  const std::size_t I = x.size();
  for (std::size_t j = 0; j < H; ++j) {
    const float* wr = w.data() + j * I;
    const float* ur = u.data() + j * H;
    float acc = 0.0f;
    for (std::size_t k = 0; k < I; ++k) acc += wr[k] * x[k];
    float rec = 0.0f;
    for (std::size_t k = 0; k < H; ++k) rec += ur[k] * h[k];
    out[j] = acc + rec + b[j];
  }
}

}  // namespace

LstmState lstm_cell(std::span<const float> x, std::span<const float> h_prev,
                    std::span<const float> c_prev, const LstmParams& p) {
  p.validate();
  const std::size_t H = p.hidden();
  require(x.size() == p.input(), "LSTM input length mismatch");
  require(h_prev.size() == H && c_prev.size() == H, "LSTM state length mismatch");

  std::vector<float> i(H), f(H), g(H), o(H);
  gate_preactivation(p.w_i, p.u_i, p.b_i, x, h_prev, i);
  gate_preactivation(p.w_f, p.u_f, p.b_f, x, h_prev, f);
  gate_preactivation(p.w_g, p.u_g, p.b_g, x, h_prev, g);
  gate_preactivation(p.w_o, p.u_o, p.b_o, x, h_prev, o);
  activation_inplace(i, Activation::kSigmoid);
  activation_inplace(f, Activation::kSigmoid);
  activation_inplace(g, Activation::kTanh);
  activation_inplace(o, Activation::kSigmoid);

  LstmState next{std::vector<float>(H), std::vector<float>(H)};
  for (std::size_t j = 0; j < H; ++j) {
    next.c[j] = f[j] * c_prev[j] + i[j] * g[j];
    next.h[j] = o[j] * std::tanh(next.c[j]);
  }
  return next;
}

Sequence lstm_layer(const Sequence& seq, const LstmParams& p, bool reverse) {
  p.validate();
  const std::size_t T = seq.size();
  Sequence out(T);
  LstmState state{std::vector<float>(p.hidden(), 0.0f),
                  std::vector<float>(p.hidden(), 0.0f)};
  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reverse ? T - 1 - step : step;
    state = lstm_cell(seq[t], state.h, state.c, p);
    out[t] = state.h;
  }
  return out;
}

Sequence bilstm_layer(const Sequence& seq, const LstmParams& fwd, const LstmParams& bwd) {
  require(fwd.input() == bwd.input(), "BiLSTM directions disagree on input size");
  const Sequence f = lstm_layer(seq, fwd, false);
  const Sequence b = lstm_layer(seq, bwd, true);
  Sequence out(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    out[t].reserve(f[t].size() + b[t].size());
    out[t].insert(out[t].end(), f[t].begin(), f[t].end());
    out[t].insert(out[t].end(), b[t].begin(), b[t].end());
  }
  return out;
}

}  // namespace transcriptor::nn
