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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stylemix/common.hpp"
#include "stylemix/tensor.hpp"

namespace stylemix {

/// Planar (channel-major) image. Color images are RGB; float images use the
/// 0..255 range unless stated otherwise.
template <typename T>
struct ImageT {
  std::size_t width = 0, height = 0, channels = 0;
  std::vector<T> data;

  ImageT() = default;
  ImageT(std::size_t w, std::size_t h, std::size_t c, T fill = T{})
      : width(w), height(h), channels(c), data(w * h * c, fill) {}

  bool empty() const noexcept { return data.empty(); }
  std::size_t plane_size() const noexcept { return width * height; }

  T& at(std::size_t c, std::size_t y, std::size_t x) noexcept {
    return data[(c * height + y) * width + x];
  }
  const T& at(std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return data[(c * height + y) * width + x];
  }
  std::span<T> plane(std::size_t c) noexcept { return {data.data() + c * plane_size(), plane_size()}; }
  std::span<const T> plane(std::size_t c) const noexcept {
    return {data.data() + c * plane_size(), plane_size()};
  }

  friend bool operator==(const ImageT&, const ImageT&) = default;
};

using Image = ImageT<float>;
using LabelImage = ImageT<std::uint16_t>;
using Mask = ImageT<std::uint8_t>;

struct Rect {
  std::size_t x = 0, y = 0, width = 0, height = 0;
  friend bool operator==(const Rect&, const Rect&) = default;
};

template <typename T>
ImageT<T> crop(const ImageT<T>& src, const Rect& r) {
  if (r.x + r.width > src.width || r.y + r.height > src.height)
    throw ValidationError("crop rectangle exceeds image bounds");
  ImageT<T> out(r.width, r.height, src.channels);
  for (std::size_t c = 0; c < src.channels; ++c)
    for (std::size_t y = 0; y < r.height; ++y)
      std::copy_n(&src.at(c, r.y + y, r.x), r.width, &out.at(c, y, 0));
  return out;
}

/// Largest centered square.
inline Rect center_square(std::size_t width, std::size_t height) {
  const std::size_t side = std::min(width, height);
  return {(width - side) / 2, (height - side) / 2, side, side};
}

namespace detail {

struct LinearTap {
  std::size_t i0, i1;
  float f;
};

// Half-pixel-centre sampling positions, clamped at the borders.
inline std::vector<LinearTap> linear_taps(std::size_t src, std::size_t dst) {
  std::vector<LinearTap> taps(dst);
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (std::size_t i = 0; i < dst; ++i) {
    double s = (static_cast<double>(i) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(s));
    const std::size_t i1 = std::min(i0 + 1, src - 1);
    taps[i] = {i0, i1, static_cast<float>(s - static_cast<double>(i0))};
  }
  return taps;
}

}  // namespace detail

/// Bilinear resize of one plane (half-pixel centres, no antialiasing).
inline void resize_plane_bilinear(std::span<const float> src, std::size_t sw, std::size_t sh,
                                  std::span<float> dst, std::size_t dw, std::size_t dh) {
  const auto xt = detail::linear_taps(sw, dw);
  const auto yt = detail::linear_taps(sh, dh);
  for (std::size_t y = 0; y < dh; ++y) {
    const float* r0 = src.data() + yt[y].i0 * sw;
    const float* r1 = src.data() + yt[y].i1 * sw;
    const float fy = yt[y].f;
    float* out = dst.data() + y * dw;
    for (std::size_t x = 0; x < dw; ++x) {
      const auto& t = xt[x];
      const float top = (1.0f - t.f) * r0[t.i0] + t.f * r0[t.i1];
      const float bottom = (1.0f - t.f) * r1[t.i0] + t.f * r1[t.i1];
      out[x] = (1.0f - fy) * top + fy * bottom;
    }
  }
}

inline Image resize_bilinear(const Image& src, std::size_t width, std::size_t height) {
  if (src.empty() || width == 0 || height == 0) throw ValidationError("resize of empty image");
  if (src.width == width && src.height == height) return src;
  Image out(width, height, src.channels);
  for (std::size_t c = 0; c < src.channels; ++c)
    resize_plane_bilinear(src.plane(c), src.width, src.height, out.plane(c), width, height);
  return out;
}

/// Nearest-neighbour resize for label maps.
template <typename T>
ImageT<T> resize_nearest(const ImageT<T>& src, std::size_t width, std::size_t height) {
  if (src.width == width && src.height == height) return src;
  ImageT<T> out(width, height, src.channels);
  for (std::size_t c = 0; c < src.channels; ++c)
    for (std::size_t y = 0; y < height; ++y) {
      const std::size_t sy = std::min(src.height - 1, y * src.height / height);
      for (std::size_t x = 0; x < width; ++x) {
        const std::size_t sx = std::min(src.width - 1, x * src.width / width);
        out.at(c, y, x) = src.at(c, sy, sx);
      }
    }
  return out;
}

/// Rec. 601 luma. Single-channel input is returned unchanged.
inline Image to_grayscale(const Image& src) {
  if (src.channels == 1) return src;
  if (src.channels != 3) throw ValidationError("grayscale conversion needs 1 or 3 channels");
  Image out(src.width, src.height, 1);
  const auto r = src.plane(0), g = src.plane(1), b = src.plane(2);
  auto dst = out.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
  return out;
}

/// 0..255 image → 1×C×H×W tensor in [0, 1].
inline Tensor to_tensor(const Image& img) {
  Tensor t({1, img.channels, img.height, img.width});
  auto d = t.data();
  for (std::size_t i = 0; i < img.data.size(); ++i) d[i] = img.data[i] / 255.0f;
  return t;
}

/// 1×C×H×W tensor in [0, 1] → 0..255 image.
inline Image from_tensor(const Tensor& t) {
  const Shape& s = t.shape();
  if (s.n != 1) throw ValidationError("from_tensor expects batch size 1");
  Image img(s.w, s.h, s.c);
  auto d = t.data();
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = d[i] * 255.0f;
  return img;
}

/// Round and clamp to the 8-bit grid.
inline Image quantize8(Image img) {
  for (float& v : img.data) v = std::clamp(std::nearbyint(v), 0.0f, 255.0f);
  return img;
}

}  // namespace stylemix
