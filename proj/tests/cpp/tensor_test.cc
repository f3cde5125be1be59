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
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "transcriptor/error.h"
#include "transcriptor/tensor.h"

namespace transcriptor::nn {
namespace {

constexpr double kRelTol = 1e-5;

bool close(double got, double want, double tol = kRelTol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

Tensor random_tensor(std::mt19937_64& rng, Shape shape, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  Tensor t(shape);
  for (float& v : t.values()) v = dist(rng);
  return t;
}

std::size_t randint(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Direct summation in double. SAME padding puts the odd pixel bottom/right.
std::vector<double> conv_oracle(const Tensor& x, const Tensor& k, const Tensor& b, Stride s,
                                bool same, std::size_t& oh, std::size_t& ow) {
  const long H = x.dim(0), W = x.dim(1), C = x.dim(2);
  const long KH = k.dim(0), KW = k.dim(1), F = k.dim(3);
  long pt = 0, pl = 0;
  if (same) {
    oh = (H + s.y - 1) / s.y;
    ow = (W + s.x - 1) / s.x;
    pt = std::max<long>((oh - 1) * s.y + KH - H, 0) / 2;
    pl = std::max<long>((ow - 1) * s.x + KW - W, 0) / 2;
  } else {
    oh = (H - KH) / s.y + 1;
    ow = (W - KW) / s.x + 1;
  }
  std::vector<double> out(oh * ow * F);
  for (long oy = 0; oy < static_cast<long>(oh); ++oy)
    for (long ox = 0; ox < static_cast<long>(ow); ++ox)
      for (long f = 0; f < F; ++f) {
        double acc = b[f];
        for (long i = 0; i < KH; ++i)
          for (long j = 0; j < KW; ++j)
            for (long c = 0; c < C; ++c) {
              const long yy = oy * static_cast<long>(s.y) - pt + i;
              const long xx = ox * static_cast<long>(s.x) - pl + j;
              if (yy < 0 || xx < 0 || yy >= H || xx >= W) continue;
              acc +=
                  static_cast<double>(x[(yy * W + xx) * C + c]) * k[((i * KW + j) * C + c) * F + f];
            }
        out[(oy * ow + ox) * F + f] = acc;
      }
  return out;
}

TEST(Conv2d, IdentityKernel) {
  std::mt19937_64 rng(1);
  const Tensor x = random_tensor(rng, {4, 6, 1});
  const Tensor y = conv2d(x, Tensor({1, 1, 1, 1}, 1.0f), Tensor({1}, 0.0f));
  EXPECT_TRUE(y.identical(x));
}

TEST(Conv2d, ZeroKernelGivesBias) {
  std::mt19937_64 rng(2);
  const Tensor x = random_tensor(rng, {5, 5, 2});
  const Tensor y = conv2d(x, Tensor({3, 3, 2, 3}, 0.0f), Tensor({3}, std::vector<float>{1, 2, 3}));
  ASSERT_EQ(y.shape(), (Shape{5, 5, 3}));
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y[i], static_cast<float>(i % 3 + 1));
}

TEST(Conv2d, MatchesDirectSummation) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = randint(rng, 1, 9), w = randint(rng, 1, 9), c = randint(rng, 1, 4);
    const std::size_t kh = randint(rng, 1, 3) * 2 - 1, kw = randint(rng, 1, 4);
    const std::size_t f = randint(rng, 1, 4);
    const Stride s{randint(rng, 1, 2), randint(rng, 1, 2)};
    const bool same = trial % 3 != 0 || kh > h || kw > w;
    const Tensor x = random_tensor(rng, {h, w, c});
    const Tensor k = random_tensor(rng, {kh, kw, c, f});
    const Tensor b = random_tensor(rng, {f});
    std::size_t oh = 0, ow = 0;
    const auto want = conv_oracle(x, k, b, s, same, oh, ow);
    const Tensor got = conv2d(x, k, b, s, same);
    ASSERT_EQ(got.shape(), (Shape{oh, ow, f})) << trial;
    for (std::size_t i = 0; i < got.size(); ++i) ASSERT_TRUE(close(got[i], want[i])) << trial;
  }
}

TEST(Conv2d, LinearWithoutBias) {
  std::mt19937_64 rng(4);
  const Tensor a = random_tensor(rng, {6, 7, 3}), b = random_tensor(rng, {6, 7, 3});
  const Tensor k = random_tensor(rng, {3, 3, 3, 2});
  const Tensor zero({2}, 0.0f);
  Tensor mix({6, 7, 3});
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.0f * a[i] - 0.5f * b[i];
  const Tensor ya = conv2d(a, k, zero), yb = conv2d(b, k, zero), ym = conv2d(mix, k, zero);
  for (std::size_t i = 0; i < ym.size(); ++i) EXPECT_TRUE(close(ym[i], 2.0 * ya[i] - 0.5 * yb[i]));
}

TEST(Conv2d, ShapeErrors) {
  const Tensor x({4, 4, 2});
  EXPECT_THROW(conv2d(x, Tensor({3, 3, 3, 1}), Tensor({1})), Error);
  EXPECT_THROW(conv2d(x, Tensor({5, 5, 2, 1}), Tensor({1}), {}, false), Error);
  EXPECT_THROW(conv2d(x, Tensor({3, 3, 2, 2}), Tensor({1})), Error);
}

TEST(BatchNorm, Examples) {
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor(rng, {3, 4, 2});
  const Tensor y = batchnorm_infer(x, Tensor({2}, 1.0f), Tensor({2}, 0.0f), Tensor({2}, 0.0f),
                                   Tensor({2}, 1.0f));
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_TRUE(close(y[i], x[i] / std::sqrt(1.0 + 1e-5), 1e-6));
  const Tensor mean({2}, std::vector<float>{0.25f, -3.0f});
  Tensor at_mean({2, 2, 2});
  for (std::size_t i = 0; i < at_mean.size(); ++i) at_mean[i] = mean[i % 2];
  const Tensor beta({2}, std::vector<float>{7.0f, -1.5f});
  const Tensor z = batchnorm_infer(at_mean, random_tensor(rng, {2}), beta, mean, Tensor({2}, 2.0f));
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_EQ(z[i], beta[i % 2]);
}

TEST(BatchNorm, MatchesFormula) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = randint(rng, 1, 8);
    const Tensor x = random_tensor(rng, {randint(rng, 1, 5), randint(rng, 1, 5), c}, -5, 5);
    const Tensor g = random_tensor(rng, {c}), b = random_tensor(rng, {c});
    const Tensor m = random_tensor(rng, {c}), v = random_tensor(rng, {c}, 0.01f, 3.0f);
    const Tensor y = batchnorm_infer(x, g, b, m, v);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t ch = i % c;
      const double want =
          g[ch] * (x[i] - static_cast<double>(m[ch])) / std::sqrt(v[ch] + 1e-5) + b[ch];
      ASSERT_TRUE(close(y[i], want, 1e-6)) << trial;
    }
  }
  EXPECT_THROW(batchnorm_infer(Tensor({2, 3}), Tensor({2}), Tensor({2}), Tensor({2}), Tensor({2})),
               Error);
}

TEST(MaxPool, Examples) {
  const Tensor y = maxpool2d(Tensor({4, 6, 2}, 3.0f), {2, 2}, {2, 2});
  EXPECT_EQ(y.shape(), (Shape{2, 3, 2}));
  for (float v : y.values()) EXPECT_EQ(v, 3.0f);
  Tensor x({4, 4, 1}, 0.0f);
  x[(2 * 4 + 3)] = 9.0f;
  const Tensor z = maxpool2d(x, {2, 2}, {2, 2});
  EXPECT_EQ(std::count(z.values().begin(), z.values().end(), 9.0f), 1);
  EXPECT_EQ(z[1 * 2 + 1], 9.0f);
  EXPECT_THROW(maxpool2d(Tensor({1, 4, 1}), {2, 2}, {2, 2}), Error);
}

TEST(MaxPool, MatchesDirectScan) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = randint(rng, 2, 10), w = randint(rng, 2, 10), c = randint(rng, 1, 3);
    const Window win{randint(rng, 1, 2), randint(rng, 1, 2)};
    const Stride s{randint(rng, 1, 2), randint(rng, 1, 2)};
    const Tensor x = random_tensor(rng, {h, w, c});
    const Tensor y = maxpool2d(x, win, s);
    const std::size_t oh = (h - win.h) / s.y + 1, ow = (w - win.w) / s.x + 1;
    ASSERT_EQ(y.shape(), (Shape{oh, ow, c}));
    for (std::size_t oy = 0; oy < oh; ++oy)
      for (std::size_t ox = 0; ox < ow; ++ox)
        for (std::size_t ch = 0; ch < c; ++ch) {
          float m = -INFINITY;
          for (std::size_t i = 0; i < win.h; ++i)
            for (std::size_t j = 0; j < win.w; ++j)
              m = std::max(m, x[((oy * s.y + i) * w + ox * s.x + j) * c + ch]);
          ASSERT_EQ(y[(oy * ow + ox) * c + ch], m);
        }
  }
}

TEST(Activation, Examples) {
  const Tensor x({3}, std::vector<float>{-1.0f, 0.0f, 2.0f});
  const Tensor r = activation(x, Activation::kRelu);
  EXPECT_EQ(r[0], 0.0f);
  EXPECT_EQ(r[2], 2.0f);
  EXPECT_EQ(activation(x, Activation::kSigmoid)[1], 0.5f);
  EXPECT_EQ(activation(x, Activation::kTanh)[1], 0.0f);
  EXPECT_TRUE(close(activation(x, Activation::kSigmoid)[2], 1.0 / (1.0 + std::exp(-2.0)), 1e-6));
  const Tensor big({2}, std::vector<float>{-1000.0f, 1000.0f});
  const Tensor s = activation(big, Activation::kSigmoid);
  EXPECT_TRUE(std::isfinite(s[0]) && std::isfinite(s[1]));
}

TEST(Dense, Examples) {
  Tensor eye({3, 3}, 0.0f);
  for (int i = 0; i < 3; ++i) eye[i * 3 + i] = 1.0f;
  const std::vector<float> x = {1.5f, -2.0f, 0.25f};
  EXPECT_EQ(dense(x, eye, Tensor({3}, 0.0f)), x);
  const Tensor b({2}, std::vector<float>{4.0f, 5.0f});
  EXPECT_EQ(dense(x, Tensor({2, 3}, 0.0f), b), (std::vector<float>{4.0f, 5.0f}));
  EXPECT_THROW(dense(x, Tensor({2, 4}), b), Error);
}

TEST(Dense, MatchesLoop) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = randint(rng, 1, 20), n = randint(rng, 1, 40);
    const Tensor w = random_tensor(rng, {m, n}), b = random_tensor(rng, {m});
    const Tensor xt = random_tensor(rng, {n});
    const auto y = dense(xt.values(), w, b);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = b[i];
      for (std::size_t j = 0; j < n; ++j) acc += static_cast<double>(w[i * n + j]) * xt[j];
      ASSERT_TRUE(close(y[i], acc, 1e-6)) << trial;
    }
  }
}

TEST(LogSoftmax, Properties) {
  const std::vector<double> uniform(13, 0.7);
  for (double v : log_softmax(std::span<const double>(uniform)))
    EXPECT_NEAR(v, -std::log(13.0), 1e-12);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-30, 30);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(13);
    for (double& e : v) e = dist(rng);
    const auto out = log_softmax(std::span<const double>(v));
    std::vector<double> shifted = v;
    for (double& e : shifted) e += 123.0;
    const auto out2 = log_softmax(std::span<const double>(shifted));
    double sum = 0, z = 0;
    for (double e : v) z += std::exp(e);
    for (std::size_t i = 0; i < v.size(); ++i) {
      sum += std::exp(out[i]);
      EXPECT_NEAR(out[i], out2[i], 1e-6);
      EXPECT_NEAR(out[i], v[i] - std::log(z), 1e-9);  // naive two-pass formula
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
    EXPECT_EQ(std::max_element(out.begin(), out.end()) - out.begin(),
              std::max_element(v.begin(), v.end()) - v.begin());
  }
}

LstmParams random_lstm(std::mt19937_64& rng, std::size_t input, std::size_t hidden) {
  LstmParams p;
  for (Tensor* w : {&p.w_i, &p.w_f, &p.w_g, &p.w_o}) *w = random_tensor(rng, {hidden, input});
  for (Tensor* u : {&p.u_i, &p.u_f, &p.u_g, &p.u_o}) *u = random_tensor(rng, {hidden, hidden});
  for (Tensor* b : {&p.b_i, &p.b_f, &p.b_g, &p.b_o}) *b = random_tensor(rng, {hidden});
  return p;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Scalar gate-by-gate evaluation in double.
void cell_oracle(const std::vector<double>& x, std::vector<double>& h, std::vector<double>& c,
                 const LstmParams& p) {
  const std::size_t H = p.hidden(), N = x.size();
  auto gate = [&](const Tensor& w, const Tensor& u, const Tensor& b, std::size_t j) {
    double a = b[j];
    for (std::size_t k = 0; k < N; ++k) a += w[j * N + k] * x[k];
    for (std::size_t k = 0; k < H; ++k) a += u[j * H + k] * h[k];
    return a;
  };
  std::vector<double> nh(H), nc(H);
  for (std::size_t j = 0; j < H; ++j) {
    const double i = sigmoid(gate(p.w_i, p.u_i, p.b_i, j));
    const double f = sigmoid(gate(p.w_f, p.u_f, p.b_f, j));
    const double g = std::tanh(gate(p.w_g, p.u_g, p.b_g, j));
    const double o = sigmoid(gate(p.w_o, p.u_o, p.b_o, j));
    nc[j] = f * c[j] + i * g;
    nh[j] = o * std::tanh(nc[j]);
  }
  h = nh;
  c = nc;
}

std::vector<std::vector<double>> rollout_oracle(const Sequence& seq, const LstmParams& p,
                                                bool reverse) {
  const std::size_t T = seq.size();
  std::vector<double> h(p.hidden(), 0.0), c(p.hidden(), 0.0);
  std::vector<std::vector<double>> out(T);
  for (std::size_t s = 0; s < T; ++s) {
    const std::size_t t = reverse ? T - 1 - s : s;
    cell_oracle(std::vector<double>(seq[t].begin(), seq[t].end()), h, c, p);
    out[t] = h;
  }
  return out;
}

TEST(Lstm, ZeroParamsGiveZeroState) {
  LstmParams p;
  for (Tensor* w : {&p.w_i, &p.w_f, &p.w_g, &p.w_o}) *w = Tensor({4, 3}, 0.0f);
  for (Tensor* u : {&p.u_i, &p.u_f, &p.u_g, &p.u_o}) *u = Tensor({4, 4}, 0.0f);
  for (Tensor* b : {&p.b_i, &p.b_f, &p.b_g, &p.b_o}) *b = Tensor({4}, 0.0f);
  const std::vector<float> zero3(3, 0.0f), zero4(4, 0.0f);
  const LstmState s = lstm_cell(zero3, zero4, zero4, p);
  EXPECT_EQ(s.h, zero4);
  EXPECT_EQ(s.c, zero4);
}

TEST(Lstm, CellMatchesScalarFormula) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = randint(rng, 1, 12), hdim = randint(rng, 1, 10);
    const LstmParams p = random_lstm(rng, n, hdim);
    const Tensor x = random_tensor(rng, {n}), h0 = random_tensor(rng, {hdim}),
                 c0 = random_tensor(rng, {hdim});
    const LstmState s = lstm_cell(x.values(), h0.values(), c0.values(), p);
    std::vector<double> h(h0.values().begin(), h0.values().end()),
        c(c0.values().begin(), c0.values().end());
    cell_oracle(std::vector<double>(x.values().begin(), x.values().end()), h, c, p);
    for (std::size_t j = 0; j < hdim; ++j) {
      ASSERT_TRUE(close(s.h[j], h[j], 1e-6)) << trial;
      ASSERT_TRUE(close(s.c[j], c[j], 1e-6)) << trial;
    }
  }
}

TEST(Lstm, ThreeStepRollout) {
  std::mt19937_64 rng(11);
  const LstmParams p = random_lstm(rng, 5, 6);
  Sequence seq;
  for (int t = 0; t < 3; ++t) {
    const Tensor x = random_tensor(rng, {5});
    seq.emplace_back(x.values().begin(), x.values().end());
  }
  const Sequence got = lstm_layer(seq, p);
  const auto want = rollout_oracle(seq, p, false);
  for (int t = 0; t < 3; ++t)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_TRUE(close(got[t][j], want[t][j]));
}

TEST(Lstm, SaturatedForgetGateCarriesCell) {
  std::mt19937_64 rng(12);
  LstmParams p = random_lstm(rng, 4, 5);
  for (float& v : p.b_f.values()) v = 50.0f;
  for (float& v : p.b_i.values()) v = -50.0f;
  const Tensor x = random_tensor(rng, {4}), h0 = random_tensor(rng, {5}),
               c0 = random_tensor(rng, {5});
  const LstmState s = lstm_cell(x.values(), h0.values(), c0.values(), p);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(s.c[j], c0[j], 1e-3);
}

TEST(Lstm, ShapeMismatch) {
  std::mt19937_64 rng(13);
  LstmParams p = random_lstm(rng, 4, 5);
  const std::vector<float> x(3), h(5), c(5);
  EXPECT_THROW(lstm_cell(x, h, c, p), Error);
  p.u_g = Tensor({5, 4});
  EXPECT_THROW(p.validate(), Error);
}

TEST(BiLstm, MatchesTwoRolloutsAndShape) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = randint(rng, 1, 8), hdim = randint(rng, 1, 8), T = randint(rng, 1, 7);
    const LstmParams fwd = random_lstm(rng, n, hdim), bwd = random_lstm(rng, n, hdim);
    Sequence seq;
    for (std::size_t t = 0; t < T; ++t) {
      const Tensor x = random_tensor(rng, {n});
      seq.emplace_back(x.values().begin(), x.values().end());
    }
    const Sequence got = bilstm_layer(seq, fwd, bwd);
    const auto f = rollout_oracle(seq, fwd, false), b = rollout_oracle(seq, bwd, true);
    ASSERT_EQ(got.size(), T);
    for (std::size_t t = 0; t < T; ++t) {
      ASSERT_EQ(got[t].size(), 2 * hdim);
      for (std::size_t j = 0; j < hdim; ++j) {
        ASSERT_TRUE(close(got[t][j], f[t][j])) << trial;
        ASSERT_TRUE(close(got[t][hdim + j], b[t][j])) << trial;
      }
    }
  }
}

TEST(BiLstm, PalindromeSymmetry) {
  std::mt19937_64 rng(15);
  const LstmParams p = random_lstm(rng, 3, 4);
  Sequence seq(5);
  for (int t = 0; t < 3; ++t) {
    const Tensor x = random_tensor(rng, {3});
    seq[t] = seq[4 - t] = std::vector<float>(x.values().begin(), x.values().end());
  }
  const Sequence out = bilstm_layer(seq, p, p);
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(out[t][j], out[4 - t][4 + j]);
      EXPECT_EQ(out[t][4 + j], out[4 - t][j]);
    }
}

TEST(Kernels, Deterministic) {
  std::mt19937_64 rng(16);
  const Tensor x = random_tensor(rng, {10, 12, 8}), k = random_tensor(rng, {3, 3, 8, 16});
  const Tensor b = random_tensor(rng, {16});
  EXPECT_TRUE(conv2d(x, k, b).identical(conv2d(x, k, b)));
}

}  // namespace
}  // namespace transcriptor::nn
