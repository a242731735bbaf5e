#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "yolo_assist/error.hpp"
#include "yolo_assist/tensor.hpp"

namespace yolo_assist {

inline constexpr float kLeakySlope = 0.1f;
inline constexpr float kBatchNormEpsilon = 1e-6f;

// Row-major dense matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(int r, int c, float fill = 0.0f)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
  Matrix(int r, int c, std::vector<float> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != static_cast<std::size_t>(r) * c) {
      throw ShapeError("matrix data length mismatch");
    }
  }

  float& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  float operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// C[m x n] += A[m x k] * B[k x n]. Each output element is reduced in
// ascending k order, so results do not depend on blocking.
inline void gemm_accumulate(int m, int n, int k, std::span<const float> a,
                            std::span<const float> b, std::span<float> c) {
  constexpr int kBlock = 256;
  for (int k0 = 0; k0 < k; k0 += kBlock) {
    const int k1 = std::min(k, k0 + kBlock);
    for (int i = 0; i < m; ++i) {
      const float* arow = a.data() + static_cast<std::size_t>(i) * k;
      float* crow = c.data() + static_cast<std::size_t>(i) * n;
      for (int p = k0; p < k1; ++p) {
        const float av = arow[p];
        const float* brow = b.data() + static_cast<std::size_t>(p) * n;
        for (int j = 0; j < n; ++j) {
          crow[j] += av * brow[j];
        }
      }
    }
  }
}

inline Matrix gemm(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("gemm: inner dims differ (" + std::to_string(a.cols) +
                     " vs " + std::to_string(b.rows) + ")");
  }
  Matrix out(a.rows, b.cols);
  gemm_accumulate(a.rows, b.cols, a.cols, a.data, b.data, out.data);
  return out;
}

// Output side length of a convolution; floor division as darknet does.
inline int conv_output_dim(int in, int size, int stride, int pad) {
  if (stride < 1) throw ShapeError("conv stride must be >= 1");
  const int span = in + 2 * pad - size;
  if (span < 0) return 0;
  return span / stride + 1;
}

// Unfolds one batch item into a (C*kh*kw) x (oh*ow) column matrix.
inline void im2col(const float* image, int channels, int height, int width,
                   int kh, int kw, int stride, int pad, int out_h, int out_w,
                   float* col) {
  const std::size_t out_plane = static_cast<std::size_t>(out_h) * out_w;
  for (int c = 0; c < channels; ++c) {
    const float* src = image + static_cast<std::size_t>(c) * height * width;
    for (int ki = 0; ki < kh; ++ki) {
      for (int kj = 0; kj < kw; ++kj) {
        float* dst = col + ((static_cast<std::size_t>(c) * kh + ki) * kw + kj) *
                               out_plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride + ki - pad;
          float* drow = dst + static_cast<std::size_t>(oy) * out_w;
          if (iy < 0 || iy >= height) {
            std::fill(drow, drow + out_w, 0.0f);
            continue;
          }
          const float* srow = src + static_cast<std::size_t>(iy) * width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride + kj - pad;
            drow[ox] = (ix >= 0 && ix < width) ? srow[ix] : 0.0f;
          }
        }
      }
    }
  }
}

// Cross-correlation with zero padding. kernel is (out, in, kh, kw).
inline Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride,
                     int pad) {
  const Shape& in = input.shape();
  const Shape& ks = kernel.shape();
  if (ks.c != in.c) {
    throw ShapeError("conv2d: input has " + std::to_string(in.c) +
                     " channels, kernel expects " + std::to_string(ks.c));
  }
  const int out_h = conv_output_dim(in.h, ks.h, stride, pad);
  const int out_w = conv_output_dim(in.w, ks.w, stride, pad);
  if (out_h < 1 || out_w < 1) {
    throw ShapeError("conv2d: zero-size output for input " + in.str());
  }
  const int k = in.c * ks.h * ks.w;
  const int n = out_h * out_w;
  Tensor out(Shape{in.n, ks.n, out_h, out_w});
  std::vector<float> col(static_cast<std::size_t>(k) * n);
  for (int b = 0; b < in.n; ++b) {
    im2col(input.plane(b, 0), in.c, in.h, in.w, ks.h, ks.w, stride, pad, out_h,
           out_w, col.data());
    std::span<float> dst(out.plane(b, 0), static_cast<std::size_t>(ks.n) * n);
    gemm_accumulate(ks.n, n, k, kernel.data(), col, dst);
  }
  return out;
}

inline Tensor add_channel_bias(Tensor input, std::span<const float> bias) {
  const Shape s = input.shape();
  if (bias.size() != static_cast<std::size_t>(s.c)) {
    throw ShapeError("bias length " + std::to_string(bias.size()) +
                     " != channels " + std::to_string(s.c));
  }
  for (int b = 0; b < s.n; ++b) {
    for (int c = 0; c < s.c; ++c) {
      float* p = input.plane(b, c);
      for (std::size_t i = 0; i < s.plane(); ++i) p[i] += bias[c];
    }
  }
  return input;
}

// out = scale * (x - mean) / sqrt(var + eps) + bias, per channel.
inline Tensor batchnorm(Tensor input, std::span<const float> scale,
                        std::span<const float> bias,
                        std::span<const float> mean,
                        std::span<const float> var,
                        float eps = kBatchNormEpsilon) {
  const Shape s = input.shape();
  const auto channels = static_cast<std::size_t>(s.c);
  if (scale.size() != channels || bias.size() != channels ||
      mean.size() != channels || var.size() != channels) {
    throw ShapeError("batchnorm: parameter vectors must have length " +
                     std::to_string(channels));
  }
  for (int b = 0; b < s.n; ++b) {
    for (int c = 0; c < s.c; ++c) {
      const float denom = std::sqrt(var[c] + eps);
      float* p = input.plane(b, c);
      for (std::size_t i = 0; i < s.plane(); ++i) {
        p[i] = scale[c] * ((p[i] - mean[c]) / denom) + bias[c];
      }
    }
  }
  return input;
}

inline Tensor leaky_relu(Tensor input, float slope = kLeakySlope) {
  for (float& v : input.data()) {
    if (!(v > 0.0f)) v *= slope;
  }
  return input;
}

inline Tensor upsample_nearest(const Tensor& input, int factor) {
  if (factor < 1) throw ShapeError("upsample factor must be >= 1");
  const Shape& s = input.shape();
  Tensor out(Shape{s.n, s.c, s.h * factor, s.w * factor});
  for (int b = 0; b < s.n; ++b) {
    for (int c = 0; c < s.c; ++c) {
      const float* src = input.plane(b, c);
      float* dst = out.plane(b, c);
      const int ow = s.w * factor;
      for (int y = 0; y < s.h * factor; ++y) {
        const float* srow = src + static_cast<std::size_t>(y / factor) * s.w;
        float* drow = dst + static_cast<std::size_t>(y) * ow;
        for (int x = 0; x < ow; ++x) drow[x] = srow[x / factor];
      }
    }
  }
  return out;
}

// Concatenates along the channel axis in the given order.
inline Tensor concat_channels(std::span<const Tensor* const> inputs) {
  if (inputs.empty()) throw ShapeError("concat_channels: no inputs");
  const Shape& first = inputs.front()->shape();
  int channels = 0;
  for (const Tensor* t : inputs) {
    const Shape& s = t->shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      throw ShapeError("concat_channels: " + s.str() + " does not match " +
                       first.str());
    }
    channels += s.c;
  }
  Tensor out(Shape{first.n, channels, first.h, first.w});
  for (int b = 0; b < first.n; ++b) {
    float* dst = out.plane(b, 0);
    for (const Tensor* t : inputs) {
      const std::size_t len = static_cast<std::size_t>(t->shape().c) *
                              first.plane();
      std::copy_n(t->plane(b, 0), len, dst);
      dst += len;
    }
  }
  return out;
}

inline Tensor concat_channels(const std::vector<Tensor>& inputs) {
  std::vector<const Tensor*> ptrs;
  ptrs.reserve(inputs.size());
  for (const auto& t : inputs) ptrs.push_back(&t);
  return concat_channels(std::span<const Tensor* const>(ptrs));
}

inline Tensor add_elementwise(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("add_elementwise: " + a.shape().str() + " vs " +
                     b.shape().str());
  }
  Tensor out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

inline void require_finite(const Tensor& t, const std::string& where) {
  if (!t.all_finite()) {
    throw NumericError("non-finite value in " + where);
  }
}

}  // namespace yolo_assist
