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

// Reference implementations written as plain index loops. They share no code
// with the library beyond the data containers.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "stylemix/image.hpp"
#include "stylemix/segeval.hpp"
#include "stylemix/tensor.hpp"

namespace oracle {

using stylemix::Image;
using stylemix::LabelImage;
using stylemix::Shape;
using stylemix::Tensor;

inline std::vector<float> random_floats(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  stylemix::Rng rng(seed);
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(rng.uniform(lo, hi));
  return v;
}

inline Tensor random_tensor(Shape s, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  return Tensor(s, random_floats(s.numel(), seed, lo, hi));
}

/// Mirror index without edge repetition, computed by walking.
inline long mirror_index(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

inline Tensor pad(const Tensor& in, std::size_t p) {
  const Shape s = in.shape();
  Tensor out({s.n, s.c, s.h + 2 * p, s.w + 2 * p});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t y = 0; y < s.h + 2 * p; ++y)
        for (std::size_t x = 0; x < s.w + 2 * p; ++x)
          out.at(n, c, y, x) = in.at(n, c, std::size_t(mirror_index(long(y) - long(p), long(s.h))),
                                     std::size_t(mirror_index(long(x) - long(p), long(s.w))));
  return out;
}

/// Valid convolution accumulated in double.
inline Tensor conv(const Tensor& in, const stylemix::ConvSpec& spec) {
  const Shape s = in.shape();
  const std::size_t k = spec.kernel, oh = s.h - k + 1, ow = s.w - k + 1;
  Tensor out({s.n, spec.out_channels, oh, ow});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t o = 0; o < spec.out_channels; ++o)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
          double acc = spec.bias[o];
          for (std::size_t i = 0; i < spec.in_channels; ++i)
            for (std::size_t dy = 0; dy < k; ++dy)
              for (std::size_t dx = 0; dx < k; ++dx)
                acc += double(spec.weight[((o * spec.in_channels + i) * k + dy) * k + dx]) *
                       double(in.at(n, i, y + dy, x + dx));
          out.at(n, o, y, x) = static_cast<float>(acc);
        }
  return out;
}

inline Tensor relu(const Tensor& in) {
  Tensor out = in;
  for (float& v : out.data()) v = std::max(v, 0.0f);
  return out;
}

/// 2×2/2 max pooling; windows hanging off the edge use only in-bounds pixels.
inline Tensor maxpool_ceil(const Tensor& in) {
  const Shape s = in.shape();
  const std::size_t oh = (s.h + 1) / 2, ow = (s.w + 1) / 2;
  Tensor out({s.n, s.c, oh, ow});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
          float m = -INFINITY;
          for (std::size_t dy = 0; dy < 2; ++dy)
            for (std::size_t dx = 0; dx < 2; ++dx)
              if (2 * y + dy < s.h && 2 * x + dx < s.w) m = std::max(m, in.at(n, c, 2 * y + dy, 2 * x + dx));
          out.at(n, c, y, x) = m;
        }
  return out;
}

inline Tensor upsample2(const Tensor& in) {
  const Shape s = in.shape();
  Tensor out({s.n, s.c, 2 * s.h, 2 * s.w});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t y = 0; y < 2 * s.h; ++y)
        for (std::size_t x = 0; x < 2 * s.w; ++x) out.at(n, c, y, x) = in.at(n, c, y / 2, x / 2);
  return out;
}

/// max|a - b| / max|b|.
inline double relative_error(const Tensor& a, const Tensor& b) {
  double num = 0.0, den = 0.0;
  const auto da = a.data(), db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    num = std::max(num, std::fabs(double(da[i]) - double(db[i])));
    den = std::max(den, std::fabs(double(db[i])));
  }
  return den == 0.0 ? num : num / den;
}

// ---------------------------------------------------------------------------
// Texture complexity, recomputed pixel by pixel.
// ---------------------------------------------------------------------------

/// Bilinear sample position along one axis (half-pixel centres, clamped).
inline void source_position(std::size_t i, std::size_t src, std::size_t dst, std::size_t& i0,
                            std::size_t& i1, float& frac) {
  double s = (double(i) + 0.5) * (double(src) / double(dst)) - 0.5;
  if (s < 0.0) s = 0.0;
  if (s > double(src - 1)) s = double(src - 1);
  i0 = std::size_t(std::floor(s));
  i1 = i0 + 1 < src ? i0 + 1 : src - 1;
  frac = float(s - double(i0));
}

inline double complexity_score(const Image& img, double epsilon = 20.0, std::size_t size = 512) {
  const std::size_t side = std::min(img.width, img.height);
  const std::size_t ox = (img.width - side) / 2, oy = (img.height - side) / 2;
  // gray[y][x] of the square crop resized to size×size
  std::vector<std::vector<float>> gray(size, std::vector<float>(size));
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      float ch[3];
      for (std::size_t c = 0; c < 3; ++c) {
        if (side == size) {
          ch[c] = img.at(c, oy + y, ox + x);
          continue;
        }
        std::size_t y0, y1, x0, x1;
        float fy, fx;
        source_position(y, side, size, y0, y1, fy);
        source_position(x, side, size, x0, x1, fx);
        const float top = (1.0f - fx) * img.at(c, oy + y0, ox + x0) + fx * img.at(c, oy + y0, ox + x1);
        const float bot = (1.0f - fx) * img.at(c, oy + y1, ox + x0) + fx * img.at(c, oy + y1, ox + x1);
        ch[c] = (1.0f - fy) * top + fy * bot;
      }
      gray[y][x] = 0.299f * ch[0] + 0.587f * ch[1] + 0.114f * ch[2];
    }
  std::size_t smooth = 0;
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) {
      const float gx = i + 1 < size ? gray[i + 1][j] - gray[i][j] : 0.0f;
      const float gy = j + 1 < size ? gray[i][j + 1] - gray[i][j] : 0.0f;
      if (gx * gx + gy * gy < float(epsilon)) ++smooth;
    }
  return double(smooth) / double(size * size);
}

// ---------------------------------------------------------------------------
// IoU by counting, class by class.
// ---------------------------------------------------------------------------

struct IouOracle {
  std::array<std::optional<double>, stylemix::kNumClasses> per_class;
  double mean = 0.0;
};

inline IouOracle iou(const std::vector<LabelImage>& gts, const std::vector<LabelImage>& preds) {
  IouOracle r;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < stylemix::kNumClasses; ++c) {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t k = 0; k < gts.size(); ++k)
      for (std::size_t i = 0; i < gts[k].data.size(); ++i) {
        const auto g = gts[k].data[i], p = preds[k].data[i];
        if (g == stylemix::kIgnoreLabel) continue;
        if (g == c && p == c) ++tp;
        else if (g == c) ++fn;
        else if (p == c) ++fp;
      }
    if (tp + fp + fn == 0) continue;
    r.per_class[c] = double(tp) / double(tp + fp + fn);
    sum += *r.per_class[c];
    ++count;
  }
  r.mean = sum / double(count);
  return r;
}

}  // namespace oracle
