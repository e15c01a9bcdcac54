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
#include <vector>

#include "stylemix/common.hpp"
#include "stylemix/image.hpp"
#include "stylemix/network.hpp"
#include "stylemix/tensor.hpp"
#include "stylemix/weights.hpp"

namespace stylemix {

struct StylizeConfig {
  double alpha = 1.0;         // 1 = full stylization, 0 = content reconstruction
  double epsilon_std = 1e-5;  // added to the content std

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    if (!(epsilon_std > 0.0)) throw ValidationError("epsilon_std must be positive");
  }
};

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> std;  // population standard deviation
};

/// Per-channel spatial mean and population std of the first batch item.
inline ChannelStats channel_stats(const Tensor& t) {
  const Shape& s = t.shape();
  ChannelStats st{std::vector<double>(s.c), std::vector<double>(s.c)};
  for (std::size_t c = 0; c < s.c; ++c) {
    const auto p = t.plane(0, c);
    double sum = 0.0;
    for (float v : p) sum += v;
    const double mean = sum / double(p.size());
    double sq = 0.0;
    for (float v : p) sq += (v - mean) * (v - mean);
    st.mean[c] = mean;
    st.std[c] = std::sqrt(sq / double(p.size()));
  }
  return st;
}

/// Adaptive instance normalization: moves each content channel to the style
/// channel's mean and std, then blends with the content by `alpha`.
inline Tensor adain(const Tensor& content, const Tensor& style, const StylizeConfig& cfg = {}) {
  cfg.validate();
  if (content.shape().c != style.shape().c)
    throw ValidationError("adain: content has " + std::to_string(content.shape().c) +
                          " channels, style has " + std::to_string(style.shape().c));
  if (content.shape().n != 1 || style.shape().n != 1)
    throw ValidationError("adain: batch size must be 1");
  const ChannelStats cs = channel_stats(content);
  const ChannelStats ss = channel_stats(style);
  Tensor out = content;
  if (cfg.alpha == 0.0) return out;
  for (std::size_t c = 0; c < content.shape().c; ++c) {
    // alpha * (scale * (x - mu_c) + mu_s) + (1 - alpha) * x  ==  a * x + b
    const double scale = ss.std[c] / (cs.std[c] + cfg.epsilon_std);
    const double a = cfg.alpha * scale + (1.0 - cfg.alpha);
    const double b = cfg.alpha * (ss.mean[c] - scale * cs.mean[c]);
    const auto fa = static_cast<float>(a), fb = static_cast<float>(b);
    for (float& v : out.plane(0, c)) v = fa * v + fb;
  }
  return out;
}

/// Encoder + decoder bound to one weight archive.
class StyleTransfer {
 public:
  explicit StyleTransfer(const WeightArchive& weights)
      : encoder_(encoder_description(), weights), decoder_(decoder_description(), weights) {}

  /// 1×3×H×W image in [0,1] → 1×512×ceil(H/8)×ceil(W/8) relu4_1 features.
  Tensor encode(const Tensor& image) const {
    const Shape& s = image.shape();
    if (s.n != 1 || s.c != 3) throw ValidationError("encode: expected 1x3xHxW, got " + s.str());
    if (s.h < 8 || s.w < 8) throw ValidationError("encode: image must be at least 8x8");
    return encoder_.forward(image);
  }

  /// 512-channel features → image clamped to [0,1], spatial ×8.
  Tensor decode(const Tensor& features) const {
    if (features.shape().c != 512)
      throw ValidationError("decode: expected 512 channels, got " +
                            std::to_string(features.shape().c));
    Tensor out = decoder_.forward(features);
    for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
    return out;
  }

  /// Content image at processing size + preprocessed style image → stylized
  /// image resized back to the content size. Both images in 0..255.
  Image stylize(const Image& content, const Image& style, const StylizeConfig& cfg = {}) const {
    cfg.validate();
    return stylize_with_features(content, encode(to_tensor(style)), cfg);
  }

  Image stylize_with_features(const Image& content, const Tensor& style_features,
                              const StylizeConfig& cfg = {}) const {
    if (content.channels != 3) throw ValidationError("stylize: content must have 3 channels");
    const Tensor cf = encode(to_tensor(content));
    const Tensor decoded = decode(adain(cf, style_features, cfg));
    return resize_bilinear(from_tensor(decoded), content.width, content.height);
  }

 private:
  Network encoder_;
  Network decoder_;
};

inline Tensor encode(const Tensor& image, const WeightArchive& weights) {
  const Shape& s = image.shape();
  if (s.n != 1 || s.c != 3) throw ValidationError("encode: expected 1x3xHxW, got " + s.str());
  if (s.h < 8 || s.w < 8) throw ValidationError("encode: image must be at least 8x8");
  return Network(encoder_description(), weights).forward(image);
}

inline Tensor decode(const Tensor& features, const WeightArchive& weights) {
  if (features.shape().c != 512)
    throw ValidationError("decode: expected 512 channels, got " + std::to_string(features.shape().c));
  Tensor out = Network(decoder_description(), weights).forward(features);
  for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

inline Image stylize(const Image& content, const Image& style, const WeightArchive& weights,
                     const StylizeConfig& cfg = {}) {
  return StyleTransfer(weights).stylize(content, style, cfg);
}

}  // namespace stylemix
