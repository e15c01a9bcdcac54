// Copyright 2026 The stylemix Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "stylemix/common.hpp"

namespace stylemix {

namespace detail {

// Allocator that default-initializes, so resize() leaves floats unwritten.
template <typename T>
struct DefaultInitAllocator : std::allocator<T> {
  template <typename U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  using std::allocator<T>::allocator;
  template <typename U>
  void construct(U* p) noexcept(std::is_nothrow_default_constructible_v<U>) {
    ::new (static_cast<void*>(p)) U;
  }
  template <typename U, typename... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};

}  // namespace detail

struct Shape {
  std::size_t n = 0, c = 0, h = 0, w = 0;

  constexpr std::size_t numel() const noexcept { return n * c * h * w; }
  constexpr std::size_t plane() const noexcept { return h * w; }
  friend constexpr bool operator==(const Shape&, const Shape&) = default;

  std::string str() const {
    return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
  }
};

/// Dense NCHW float tensor. Row-major: batch, channel, row, column.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f) : shape_(shape), data_(shape.numel(), fill) {}
  Tensor(Shape shape, const std::vector<float>& data)
      : shape_(shape), data_(data.begin(), data.end()) {
    if (data_.size() != shape_.numel())
      throw ValidationError("tensor data length " + std::to_string(data_.size()) +
                            " does not match shape " + shape_.str());
  }

  /// Tensor whose contents are left unspecified; callers overwrite every
  /// element.
  static Tensor uninitialized(Shape shape) {
    Tensor t;
    t.shape_ = shape;
    t.data_.resize(shape.numel());
    return t;
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t numel() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  std::size_t index(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  float at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return data_[index(n, c, y, x)];
  }
  float& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) noexcept {
    return data_[index(n, c, y, x)];
  }

  /// One H×W plane.
  std::span<const float> plane(std::size_t n, std::size_t c) const noexcept {
    return {data_.data() + (n * shape_.c + c) * shape_.plane(), shape_.plane()};
  }
  std::span<float> plane(std::size_t n, std::size_t c) noexcept {
    return {data_.data() + (n * shape_.c + c) * shape_.plane(), shape_.plane()};
  }

 private:
  Shape shape_;
  std::vector<float, detail::DefaultInitAllocator<float>> data_;
};

/// One convolution layer: unpadded, stride 1, square kernel of size 1 or 3.
struct ConvSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::vector<float> weight;  // (out, in, k, k)
  std::vector<float> bias;    // (out)

  void validate() const {
    if (in_channels == 0 || out_channels == 0)
      throw ValidationError("conv: channel counts must be positive");
    if (kernel != 1 && kernel != 3)
      throw ValidationError("conv: kernel must be 1 or 3, got " + std::to_string(kernel));
    if (weight.size() != out_channels * in_channels * kernel * kernel)
      throw ValidationError("conv: weight has " + std::to_string(weight.size()) +
                            " values, expected " +
                            std::to_string(out_channels * in_channels * kernel * kernel));
    if (bias.size() != out_channels)
      throw ValidationError("conv: bias has " + std::to_string(bias.size()) +
                            " values, expected " + std::to_string(out_channels));
  }
};

namespace detail {

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using StridedMap = Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;

// Target number of floats in one im2col / Winograd scratch slice.
inline constexpr std::size_t kScratchFloats = std::size_t{1} << 19;

// Source index for position `i` of a reflection-padded axis of length
// `size + 2 * pad`, or -1 for positions past the padded extent.
inline std::vector<std::ptrdiff_t> reflect_map(std::size_t size, std::size_t pad,
                                               std::size_t extent) {
  std::vector<std::ptrdiff_t> map(extent, -1);
  const auto n = static_cast<std::ptrdiff_t>(size);
  const auto p = static_cast<std::ptrdiff_t>(pad);
  for (std::size_t i = 0; i < extent && i < size + 2 * pad; ++i) {
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - p;
    if (j < 0) j = -j;
    if (j >= n) j = 2 * (n - 1) - j;
    map[i] = j;
  }
  return map;
}

}  // namespace detail

/// Execution options for a prepared convolution. `reflect_pad` and `relu`
/// fuse the neighbouring network ops into the kernel; the result equals
/// relu(conv2d(reflection_pad(x, reflect_pad))).
struct ConvOptions {
  enum class Path { Auto, Direct, Im2col, Winograd };
  std::size_t reflect_pad = 0;
  bool relu = false;
  Path path = Path::Auto;
};

/// A convolution layer prepared for repeated execution. For 3×3 kernels it
/// also holds the Winograd F(4×4, 3×3) transformed filters. Immutable after
/// construction and safe to share between threads.
class ConvKernel {
 public:
  using Path = ConvOptions::Path;

  ConvKernel() = default;
  explicit ConvKernel(ConvSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.kernel == 3) prepare_winograd();
  }

  const ConvSpec& spec() const noexcept { return spec_; }

  Tensor operator()(const Tensor& input, ConvOptions opts = {}) const {
    const Shape& s = input.shape();
    if (s.n == 0 || s.c == 0 || s.h == 0 || s.w == 0)
      throw ValidationError("conv: empty input " + s.str());
    if (s.c != spec_.in_channels)
      throw ValidationError("conv: input has " + std::to_string(s.c) +
                            " channels, layer expects " + std::to_string(spec_.in_channels));
    if (opts.reflect_pad > 0 && (opts.reflect_pad >= s.h || opts.reflect_pad >= s.w))
      throw ValidationError("conv: pad " + std::to_string(opts.reflect_pad) + " too large for " +
                            s.str());
    if (s.h + 2 * opts.reflect_pad < spec_.kernel || s.w + 2 * opts.reflect_pad < spec_.kernel)
      throw ValidationError("conv: input " + s.str() + " smaller than kernel " +
                            std::to_string(spec_.kernel));
    Path path = opts.path;
    if (path == Path::Auto) {
      if (spec_.kernel == 3 && spec_.in_channels >= 16 && spec_.out_channels >= 16)
        path = Path::Winograd;
      else if (spec_.out_channels <= 4)
        path = Path::Direct;
      else
        path = Path::Im2col;
    }
    switch (path) {
      case Path::Winograd:
        if (spec_.kernel != 3) throw ValidationError("conv: Winograd path requires a 3x3 kernel");
        return run_winograd(input, opts);
      case Path::Direct: return run_direct(input, opts);
      default: return run_im2col(input, opts);
    }
  }

  Tensor operator()(const Tensor& input, Path path) const {
    ConvOptions opts;
    opts.path = path;
    return (*this)(input, opts);
  }

 private:
  ConvSpec spec_;
  std::vector<float> wino_;  // 36 matrices of (out × in)

  void prepare_winograd() {
    // G = [1/4 0 0; -1/6 -1/6 -1/6; -1/6 1/6 -1/6; 1/24 1/12 1/6; 1/24 -1/12 1/6; 0 0 1]
    static constexpr double G[6][3] = {{1.0 / 4, 0, 0},
                                       {-1.0 / 6, -1.0 / 6, -1.0 / 6},
                                       {-1.0 / 6, 1.0 / 6, -1.0 / 6},
                                       {1.0 / 24, 1.0 / 12, 1.0 / 6},
                                       {1.0 / 24, -1.0 / 12, 1.0 / 6},
                                       {0, 0, 1}};
    const std::size_t co = spec_.out_channels, ci = spec_.in_channels;
    wino_.assign(36 * co * ci, 0.0f);
    for (std::size_t o = 0; o < co; ++o)
      for (std::size_t i = 0; i < ci; ++i) {
        const float* g = &spec_.weight[(o * ci + i) * 9];
        double gg[6][3] = {};
        for (int r = 0; r < 6; ++r)
          for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 3; ++k) gg[r][c] += G[r][k] * g[k * 3 + c];
        for (int r = 0; r < 6; ++r)
          for (int c = 0; c < 6; ++c) {
            double u = 0.0;
            for (int k = 0; k < 3; ++k) u += gg[r][k] * G[c][k];
            wino_[(std::size_t(r * 6 + c) * co + o) * ci + i] = static_cast<float>(u);
          }
      }
  }

  // Row-wise accumulation; suited to layers with very few output channels,
  // where a GEMM would be almost all packing overhead.
  Tensor run_direct(const Tensor& input, const ConvOptions& opts) const {
    const Shape& s = input.shape();
    const std::size_t k = spec_.kernel, pad = opts.reflect_pad;
    const std::size_t ci = spec_.in_channels, co = spec_.out_channels;
    const std::size_t oh = s.h + 2 * pad - k + 1, ow = s.w + 2 * pad - k + 1;
    const std::size_t rw = s.w + 2 * pad;
    Tensor out = Tensor::uninitialized({s.n, co, oh, ow});
    const auto ymap = detail::reflect_map(s.h, pad, s.h + 2 * pad);
    const auto xmap = detail::reflect_map(s.w, pad, rw);
    std::vector<float> acc(co * ow), row(rw);

    for (std::size_t n = 0; n < s.n; ++n)
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t o = 0; o < co; ++o)
          std::fill_n(acc.data() + o * ow, ow, spec_.bias[o]);
        for (std::size_t c = 0; c < ci; ++c) {
          const float* p = input.plane(n, c).data();
          for (std::size_t ky = 0; ky < k; ++ky) {
            const float* src = p + std::size_t(ymap[y + ky]) * s.w;
            for (std::size_t x = 0; x < pad; ++x) row[x] = src[xmap[x]];
            std::copy_n(src, s.w, row.data() + pad);
            for (std::size_t x = pad + s.w; x < rw; ++x) row[x] = src[xmap[x]];
            for (std::size_t kx = 0; kx < k; ++kx) {
              const float* r = row.data() + kx;
              for (std::size_t o = 0; o < co; ++o) {
                const float w = spec_.weight[((o * ci + c) * k + ky) * k + kx];
                float* a = acc.data() + o * ow;
                for (std::size_t x = 0; x < ow; ++x) a[x] += w * r[x];
              }
            }
          }
        }
        for (std::size_t o = 0; o < co; ++o) {
          float* dst = out.plane(n, o).data() + y * ow;
          const float* a = acc.data() + o * ow;
          if (opts.relu) {
            for (std::size_t x = 0; x < ow; ++x) dst[x] = std::max(a[x], 0.0f);
          } else {
            std::copy_n(a, ow, dst);
          }
        }
      }
    return out;
  }

  Tensor run_im2col(const Tensor& input, const ConvOptions& opts) const {
    const Shape& s = input.shape();
    const std::size_t k = spec_.kernel, pad = opts.reflect_pad;
    const std::size_t ci = spec_.in_channels, co = spec_.out_channels;
    const std::size_t oh = s.h + 2 * pad - k + 1, ow = s.w + 2 * pad - k + 1;
    Tensor out = Tensor::uninitialized({s.n, co, oh, ow});
    const std::size_t rows_k = ci * k * k;
    const detail::ConstRowMap weight(spec_.weight.data(), Eigen::Index(co), Eigen::Index(rows_k));
    const auto ymap = detail::reflect_map(s.h, pad, s.h + 2 * pad);
    const auto xmap = detail::reflect_map(s.w, pad, s.w + 2 * pad);

    const std::size_t rows_per_chunk =
        std::max<std::size_t>(1, (detail::kScratchFloats * 4) / std::max<std::size_t>(1, rows_k * ow));
    std::vector<float> cols;
    detail::RowMatrix res;

    for (std::size_t n = 0; n < s.n; ++n) {
      for (std::size_t y0 = 0; y0 < oh; y0 += rows_per_chunk) {
        const std::size_t ny = std::min(rows_per_chunk, oh - y0);
        const std::size_t npix = ny * ow;
        cols.resize(rows_k * npix);
        for (std::size_t c = 0; c < ci; ++c) {
          const float* p = input.plane(n, c).data();
          for (std::size_t ky = 0; ky < k; ++ky)
            for (std::size_t kx = 0; kx < k; ++kx) {
              float* dst = cols.data() + ((c * k + ky) * k + kx) * npix;
              for (std::size_t y = 0; y < ny; ++y) {
                const float* row = p + std::size_t(ymap[y0 + y + ky]) * s.w;
                float* d = dst + y * ow;
                if (pad == 0) {
                  std::copy_n(row + kx, ow, d);
                } else {
                  for (std::size_t x = 0; x < ow; ++x) d[x] = row[xmap[x + kx]];
                }
              }
            }
        }
        const detail::ConstRowMap colmat(cols.data(), Eigen::Index(rows_k), Eigen::Index(npix));
        res.resize(Eigen::Index(co), Eigen::Index(npix));
        res.noalias() = weight * colmat;
        for (std::size_t o = 0; o < co; ++o) {
          float* dst = out.plane(n, o).data() + y0 * ow;
          const float b = spec_.bias[o];
          const float* r = res.data() + o * npix;
          if (opts.relu) {
            for (std::size_t i = 0; i < npix; ++i) dst[i] = std::max(r[i] + b, 0.0f);
          } else {
            for (std::size_t i = 0; i < npix; ++i) dst[i] = r[i] + b;
          }
        }
      }
    }
    return out;
  }

  // Winograd F(4x4, 3x3). Tiles are processed one band of tile rows at a
  // time; inside a band they are laid out row-major so both transforms walk
  // contiguous memory.
  Tensor run_winograd(const Tensor& input, const ConvOptions& opts) const {
    const Shape& s = input.shape();
    const std::size_t pad = opts.reflect_pad;
    const std::size_t ci = spec_.in_channels, co = spec_.out_channels;
    const std::size_t ph = s.h + 2 * pad, pw = s.w + 2 * pad;
    const std::size_t oh = ph - 2, ow = pw - 2;
    const std::size_t th = (oh + 3) / 4, tw = (ow + 3) / 4;
    const std::size_t wp = 4 * tw + 2;  // padded row width covering every tile
    Tensor out = Tensor::uninitialized({s.n, co, oh, ow});

    const std::size_t band = std::clamp<std::size_t>(
        detail::kScratchFloats / (36 * std::max(ci, co) * tw), 1, th);
    const std::size_t chunk = band * tw;
    std::vector<float> v(36 * ci * chunk);
    std::vector<float> m(36 * co * chunk);
    std::vector<float> rows(6 * wp), bt(6 * wp);
    std::vector<float> at(24 * tw);

    const auto ymap = detail::reflect_map(s.h, pad, 4 * th + 2);
    const auto xmap = detail::reflect_map(s.w, pad, wp);
    const std::size_t copy_from = pad, copy_len = s.w;  // contiguous interior of each row

    for (std::size_t n = 0; n < s.n; ++n) {
      for (std::size_t ty0 = 0; ty0 < th; ty0 += band) {
        const std::size_t nty = std::min(band, th - ty0);
        const std::size_t nt = nty * tw;

        // Input transform: V = B^T d B.
        for (std::size_t c = 0; c < ci; ++c) {
          const float* p = input.plane(n, c).data();
          for (std::size_t ty = 0; ty < nty; ++ty) {
            const std::size_t y = (ty0 + ty) * 4;
            for (std::size_t r = 0; r < 6; ++r) {
              float* row = rows.data() + r * wp;
              const std::ptrdiff_t sy = ymap[y + r];
              if (sy < 0) {
                std::fill(row, row + wp, 0.0f);
                continue;
              }
              const float* src = p + std::size_t(sy) * s.w;
              for (std::size_t x = 0; x < copy_from; ++x) row[x] = src[xmap[x]];
              std::copy_n(src, copy_len, row + copy_from);
              for (std::size_t x = copy_from + copy_len; x < wp; ++x)
                row[x] = xmap[x] < 0 ? 0.0f : src[xmap[x]];
            }
            const float* d0 = rows.data();
            const float* d1 = d0 + wp;
            const float* d2 = d1 + wp;
            const float* d3 = d2 + wp;
            const float* d4 = d3 + wp;
            const float* d5 = d4 + wp;
            float* b0 = bt.data();
            float* b1 = b0 + wp;
            float* b2 = b1 + wp;
            float* b3 = b2 + wp;
            float* b4 = b3 + wp;
            float* b5 = b4 + wp;
            for (std::size_t x = 0; x < wp; ++x) {
              b0[x] = 4.0f * d0[x] - 5.0f * d2[x] + d4[x];
              b1[x] = -4.0f * (d1[x] + d2[x]) + d3[x] + d4[x];
              b2[x] = 4.0f * (d1[x] - d2[x]) - d3[x] + d4[x];
              b3[x] = -2.0f * (d1[x] - d3[x]) - d2[x] + d4[x];
              b4[x] = 2.0f * (d1[x] - d3[x]) - d2[x] + d4[x];
              b5[x] = 4.0f * d1[x] - 5.0f * d3[x] + d5[x];
            }
            const std::size_t base = ty * tw;
            for (std::size_t r = 0; r < 6; ++r) {
              const float* br = bt.data() + r * wp;
              float* v0 = v.data() + ((r * 6 + 0) * ci + c) * chunk + base;
              float* v1 = v0 + ci * chunk;
              float* v2 = v1 + ci * chunk;
              float* v3 = v2 + ci * chunk;
              float* v4 = v3 + ci * chunk;
              float* v5 = v4 + ci * chunk;
              for (std::size_t tx = 0; tx < tw; ++tx) {
                const float* e = br + 4 * tx;
                v0[tx] = 4.0f * e[0] - 5.0f * e[2] + e[4];
                v1[tx] = -4.0f * (e[1] + e[2]) + e[3] + e[4];
                v2[tx] = 4.0f * (e[1] - e[2]) - e[3] + e[4];
                v3[tx] = -2.0f * (e[1] - e[3]) - e[2] + e[4];
                v4[tx] = 2.0f * (e[1] - e[3]) - e[2] + e[4];
                v5[tx] = 4.0f * e[1] - 5.0f * e[3] + e[5];
              }
            }
          }
        }

        // 36 independent GEMMs: M_k = U_k V_k.
        for (std::size_t k = 0; k < 36; ++k) {
          const detail::ConstRowMap u(wino_.data() + k * co * ci, Eigen::Index(co), Eigen::Index(ci));
          const detail::ConstStridedMap vk(v.data() + k * ci * chunk, Eigen::Index(ci),
                                           Eigen::Index(nt), Eigen::OuterStride<>(Eigen::Index(chunk)));
          detail::StridedMap mk(m.data() + k * co * chunk, Eigen::Index(co), Eigen::Index(nt),
                                Eigen::OuterStride<>(Eigen::Index(chunk)));
          mk.noalias() = u * vk;
        }

        // Output transform: Y = A^T M A, plus bias (and ReLU).
        for (std::size_t o = 0; o < co; ++o) {
          float* dst = out.plane(n, o).data();
          const float bias = spec_.bias[o];
          for (std::size_t ty = 0; ty < nty; ++ty) {
            const std::size_t base = ty * tw;
            // Vertical A^T: 6 rows of M → 4 rows, for each of the 6 columns.
            for (std::size_t q = 0; q < 6; ++q) {
              const float* m0 = m.data() + ((0 * 6 + q) * co + o) * chunk + base;
              const float* m1 = m.data() + ((1 * 6 + q) * co + o) * chunk + base;
              const float* m2 = m.data() + ((2 * 6 + q) * co + o) * chunk + base;
              const float* m3 = m.data() + ((3 * 6 + q) * co + o) * chunk + base;
              const float* m4 = m.data() + ((4 * 6 + q) * co + o) * chunk + base;
              const float* m5 = m.data() + ((5 * 6 + q) * co + o) * chunk + base;
              float* a0 = at.data() + (0 * 6 + q) * tw;
              float* a1 = at.data() + (1 * 6 + q) * tw;
              float* a2 = at.data() + (2 * 6 + q) * tw;
              float* a3 = at.data() + (3 * 6 + q) * tw;
              for (std::size_t tx = 0; tx < tw; ++tx) {
                const float s12 = m1[tx] + m2[tx], d12 = m1[tx] - m2[tx];
                const float s34 = m3[tx] + m4[tx], d34 = m3[tx] - m4[tx];
                a0[tx] = m0[tx] + s12 + s34;
                a1[tx] = d12 + 2.0f * d34;
                a2[tx] = s12 + 4.0f * s34;
                a3[tx] = d12 + 8.0f * d34 + m5[tx];
              }
            }
            const std::size_t y = (ty0 + ty) * 4;
            const std::size_t full = ow / 4, rem = ow % 4;
            for (std::size_t r = 0; r < 4 && y + r < oh; ++r) {
              const float* q0 = at.data() + (r * 6 + 0) * tw;
              const float* q1 = at.data() + (r * 6 + 1) * tw;
              const float* q2 = at.data() + (r * 6 + 2) * tw;
              const float* q3 = at.data() + (r * 6 + 3) * tw;
              const float* q4 = at.data() + (r * 6 + 4) * tw;
              const float* q5 = at.data() + (r * 6 + 5) * tw;
              float* drow = dst + (y + r) * ow;
              auto emit = [&](std::size_t tx, float* out4) {
                const float s12 = q1[tx] + q2[tx], d12 = q1[tx] - q2[tx];
                const float s34 = q3[tx] + q4[tx], d34 = q3[tx] - q4[tx];
                out4[0] = q0[tx] + s12 + s34 + bias;
                out4[1] = d12 + 2.0f * d34 + bias;
                out4[2] = s12 + 4.0f * s34 + bias;
                out4[3] = d12 + 8.0f * d34 + q5[tx] + bias;
              };
              for (std::size_t tx = 0; tx < full; ++tx) emit(tx, drow + 4 * tx);
              if (rem != 0) {
                float tmp[4];
                emit(full, tmp);
                std::copy_n(tmp, rem, drow + 4 * full);
              }
              if (opts.relu)
                for (std::size_t x = 0; x < ow; ++x) drow[x] = std::max(drow[x], 0.0f);
            }
          }
        }
      }
    }
    return out;
  }
};

/// Unpadded stride-1 convolution.
inline Tensor conv2d(const Tensor& input, const ConvSpec& spec) {
  return ConvKernel(spec)(input);
}

/// Mirror padding without repeating the edge pixel: row [1,2,3] with pad 1
/// becomes [2,1,2,3,2].
inline Tensor reflection_pad(const Tensor& input, std::size_t pad) {
  const Shape& s = input.shape();
  if (pad == 0) return input;
  if (pad >= s.h || pad >= s.w)
    throw ValidationError("reflection_pad: pad " + std::to_string(pad) + " too large for " +
                          s.str());
  const std::size_t oh = s.h + 2 * pad, ow = s.w + 2 * pad;
  Tensor out = Tensor::uninitialized({s.n, s.c, oh, ow});
  auto reflect = [pad](std::size_t i, std::size_t size) -> std::size_t {
    const auto j = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(pad);
    if (j < 0) return static_cast<std::size_t>(-j);
    if (j >= static_cast<std::ptrdiff_t>(size)) return 2 * (size - 1) - static_cast<std::size_t>(j);
    return static_cast<std::size_t>(j);
  };
  std::vector<std::size_t> xmap(ow);
  for (std::size_t x = 0; x < ow; ++x) xmap[x] = reflect(x, s.w);
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const float* src = input.plane(n, c).data();
      float* dst = out.plane(n, c).data();
      for (std::size_t y = 0; y < oh; ++y) {
        const float* row = src + reflect(y, s.h) * s.w;
        float* drow = dst + y * ow;
        for (std::size_t x = 0; x < pad; ++x) drow[x] = row[xmap[x]];
        std::copy_n(row, s.w, drow + pad);
        for (std::size_t x = pad + s.w; x < ow; ++x) drow[x] = row[xmap[x]];
      }
    }
  return out;
}

inline Tensor relu(Tensor input) {
  for (float& v : input.data()) v = v > 0.0f ? v : 0.0f;
  return input;
}

/// 2×2 max pooling, stride 2, ceiling mode: output side is ceil(side / 2).
inline Tensor maxpool2(const Tensor& input) {
  const Shape& s = input.shape();
  const std::size_t oh = (s.h + 1) / 2, ow = (s.w + 1) / 2;
  Tensor out = Tensor::uninitialized({s.n, s.c, oh, ow});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const float* src = input.plane(n, c).data();
      float* dst = out.plane(n, c).data();
      for (std::size_t y = 0; y < oh; ++y) {
        const float* r0 = src + (2 * y) * s.w;
        const float* r1 = (2 * y + 1 < s.h) ? r0 + s.w : r0;
        for (std::size_t x = 0; x < ow; ++x) {
          const std::size_t x0 = 2 * x, x1 = std::min(2 * x + 1, s.w - 1);
          dst[y * ow + x] = std::max(std::max(r0[x0], r0[x1]), std::max(r1[x0], r1[x1]));
        }
      }
    }
  return out;
}

/// Nearest-neighbour 2× upsampling; every pixel becomes a 2×2 block.
inline Tensor upsample_nearest2(const Tensor& input) {
  const Shape& s = input.shape();
  const std::size_t oh = s.h * 2, ow = s.w * 2;
  Tensor out = Tensor::uninitialized({s.n, s.c, oh, ow});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const float* src = input.plane(n, c).data();
      float* dst = out.plane(n, c).data();
      for (std::size_t y = 0; y < s.h; ++y) {
        float* d0 = dst + (2 * y) * ow;
        for (std::size_t x = 0; x < s.w; ++x) d0[2 * x] = d0[2 * x + 1] = src[y * s.w + x];
        std::copy_n(d0, ow, d0 + ow);
      }
    }
  return out;
}

}  // namespace stylemix
