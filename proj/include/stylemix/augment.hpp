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

// Training-time side: stylized/original sampling and the online transforms
// (mirror, Gaussian blur, photometric distortion).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "stylemix/common.hpp"
#include "stylemix/image.hpp"
#include "stylemix/pipeline.hpp"

namespace stylemix {

// ---------------------------------------------------------------------------
// Sampler
// ---------------------------------------------------------------------------

struct SamplerConfig {
  double p_aug = 0.8;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(p_aug >= 0.0 && p_aug <= 1.0)) throw ValidationError("sampler.p_aug must lie in [0, 1]");
  }
};

struct SamplerState {
  std::uint64_t epoch = 0;
  std::size_t position = 0;
};

struct SampleItem {
  std::uint64_t epoch = 0;
  std::size_t position = 0;
  std::size_t entry = 0;               // index into manifest.entries
  std::optional<std::size_t> variant;  // nullopt: the original image
  std::uint64_t transform_seed = 0;

  bool stylized() const noexcept { return variant.has_value(); }
  friend bool operator==(const SampleItem&, const SampleItem&) = default;
};

/// Visiting order of manifest entries in one epoch.
inline std::vector<std::uint32_t> epoch_order(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  Rng rng(derive_seed(seed, "epoch", epoch));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

/// Item at (epoch, position) given that epoch's order.
inline SampleItem sample_at(const AugmentationManifest& manifest, const SamplerConfig& cfg,
                            std::uint64_t epoch, std::size_t position,
                            const std::vector<std::uint32_t>& order) {
  if (manifest.entries.empty()) throw ValidationError("sampler: manifest has no entries");
  if (position >= order.size()) throw ValidationError("sampler: position beyond epoch length");
  SampleItem item;
  item.epoch = epoch;
  item.position = position;
  item.entry = order[position];
  const auto& variants = manifest.entries[item.entry].stylized;
  Rng coin(derive_seed(cfg.seed, "choice", epoch, static_cast<std::uint64_t>(position)));
  const bool stylized = coin.uniform() < cfg.p_aug;
  const std::size_t pick = static_cast<std::size_t>(coin.below(std::max<std::size_t>(1, variants.size())));
  if (stylized && !variants.empty()) item.variant = pick;
  item.transform_seed = derive_seed(cfg.seed, "transform", epoch, static_cast<std::uint64_t>(position));
  return item;
}

/// Stateless-step form: returns the current item and the advanced state.
inline std::pair<SampleItem, SamplerState> sample_next(const AugmentationManifest& manifest,
                                                       const SamplerConfig& cfg, SamplerState state) {
  cfg.validate();
  if (manifest.entries.empty()) throw ValidationError("sampler: manifest has no entries");
  const auto order = epoch_order(manifest.entries.size(), cfg.seed, state.epoch);
  SampleItem item = sample_at(manifest, cfg, state.epoch, state.position, order);
  if (++state.position == manifest.entries.size()) {
    state.position = 0;
    ++state.epoch;
  }
  return {item, state};
}

/// Random-access sampler with a per-epoch order cache. Safe to share between
/// threads; every item depends only on (seed, epoch, position).
class Sampler {
 public:
  Sampler(const AugmentationManifest& manifest, SamplerConfig cfg) : manifest_(&manifest), cfg_(cfg) {
    cfg_.validate();
    if (manifest.entries.empty()) throw ValidationError("sampler: manifest has no entries");
  }

  std::size_t epoch_length() const noexcept { return manifest_->entries.size(); }

  SampleItem at(std::uint64_t epoch, std::size_t position) const {
    return sample_at(*manifest_, cfg_, epoch, position, *order(epoch));
  }

  /// Global index g = epoch * epoch_length + position.
  SampleItem at_index(std::uint64_t g) const { return at(g / epoch_length(), g % epoch_length()); }

  SampleItem next(SamplerState& state) const {
    SampleItem item = at(state.epoch, state.position);
    if (++state.position == epoch_length()) {
      state.position = 0;
      ++state.epoch;
    }
    return item;
  }

 private:
  std::shared_ptr<const std::vector<std::uint32_t>> order(std::uint64_t epoch) const {
    std::lock_guard lock(mutex_);
    auto& slot = cache_[epoch];
    if (!slot)
      slot = std::make_shared<const std::vector<std::uint32_t>>(
          epoch_order(epoch_length(), cfg_.seed, epoch));
    if (cache_.size() > 4) cache_.erase(cache_.begin()->first == epoch ? std::next(cache_.begin()) : cache_.begin());
    return slot;
  }

  const AugmentationManifest* manifest_;
  SamplerConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::map<std::uint64_t, std::shared_ptr<const std::vector<std::uint32_t>>> cache_;
};

// ---------------------------------------------------------------------------
// Photometric distortion
// ---------------------------------------------------------------------------

struct PmdConfig {
  double brightness_delta = 32.0;  // 0..255 scale
  double contrast_lower = 0.5, contrast_upper = 1.5;
  double saturation_lower = 0.5, saturation_upper = 1.5;
  double hue_delta = 18.0;  // degrees
  double apply_p = 0.5;

  void validate() const {
    if (!(brightness_delta >= 0.0)) throw ValidationError("pmd.brightness_delta must be >= 0");
    if (!(hue_delta >= 0.0 && hue_delta <= 180.0)) throw ValidationError("pmd.hue_delta must lie in [0, 180]");
    auto range = [](double lo, double hi, const char* what) {
      if (!(lo > 0.0 && lo <= 1.0 && hi >= 1.0))
        throw ValidationError(std::string("pmd.") + what + " range must be positive and contain 1");
    };
    range(contrast_lower, contrast_upper, "contrast");
    range(saturation_lower, saturation_upper, "saturation");
    if (!(apply_p >= 0.0 && apply_p <= 1.0)) throw ValidationError("pmd.apply_p must lie in [0, 1]");
  }
};

/// Drawn parameters; an empty optional means the op is skipped.
struct PmdParams {
  std::optional<double> brightness;
  bool contrast_first = false;
  std::optional<double> contrast;
  std::optional<double> saturation;
  std::optional<double> hue;
};

/// Every value is drawn whether or not its op applies, so the stream layout
/// is fixed.
inline PmdParams draw_pmd_params(const PmdConfig& cfg, Rng& rng) {
  PmdParams p;
  const bool b = rng.bernoulli(cfg.apply_p);
  const double bv = rng.uniform(-cfg.brightness_delta, cfg.brightness_delta);
  p.contrast_first = rng.bernoulli(0.5);
  const bool c = rng.bernoulli(cfg.apply_p);
  const double cv = rng.uniform(cfg.contrast_lower, cfg.contrast_upper);
  const bool s = rng.bernoulli(cfg.apply_p);
  const double sv = rng.uniform(cfg.saturation_lower, cfg.saturation_upper);
  const bool h = rng.bernoulli(cfg.apply_p);
  const double hv = rng.uniform(-cfg.hue_delta, cfg.hue_delta);
  if (b) p.brightness = bv;
  if (c) p.contrast = cv;
  if (s) p.saturation = sv;
  if (h) p.hue = hv;
  return p;
}

namespace detail {

inline float clamp255(double v) { return static_cast<float>(std::clamp(v, 0.0, 255.0)); }

// RGB in 0..255 <-> HSV with H in degrees [0, 360), S in [0, 1], V in 0..255.
inline void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double d = mx - mn;
  v = mx;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d == 0.0)
    h = 0.0;
  else if (mx == r)
    h = 60.0 * std::fmod((g - b) / d + 6.0, 6.0);
  else if (mx == g)
    h = 60.0 * ((b - r) / d + 2.0);
  else
    h = 60.0 * ((r - g) / d + 4.0);
}

inline void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r1 = 0, g1 = 0, b1 = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r1 = c, g1 = x; break;
    case 1: r1 = x, g1 = c; break;
    case 2: g1 = c, b1 = x; break;
    case 3: g1 = x, b1 = c; break;
    case 4: r1 = x, b1 = c; break;
    default: r1 = c, b1 = x; break;
  }
  const double m = v - c;
  r = r1 + m, g = g1 + m, b = b1 + m;
}

inline void apply_hsv(Image& img, std::optional<double> saturation, std::optional<double> hue) {
  if (!saturation && !hue) return;
  const std::size_t n = img.width * img.height;
  auto R = img.plane(0), G = img.plane(1), B = img.plane(2);
  for (std::size_t i = 0; i < n; ++i) {
    double h, s, v;
    rgb_to_hsv(R[i], G[i], B[i], h, s, v);
    if (saturation) s = std::clamp(s * *saturation, 0.0, 1.0);
    if (hue) {
      h = std::fmod(h + *hue, 360.0);
      if (h < 0.0) h += 360.0;
    }
    double r, g, b;
    hsv_to_rgb(h, s, v, r, g, b);
    R[i] = clamp255(r), G[i] = clamp255(g), B[i] = clamp255(b);
  }
}

}  // namespace detail

inline Image apply_pmd(Image img, const PmdParams& p) {
  if (img.channels != 3) throw ValidationError("photometric_distortion: expected 3 channels");
  if (p.brightness)
    for (float& v : img.data) v = detail::clamp255(double(v) + *p.brightness);
  auto contrast = [&] {
    if (p.contrast)
      for (float& v : img.data) v = detail::clamp255(double(v) * *p.contrast);
  };
  if (p.contrast_first) contrast();
  detail::apply_hsv(img, p.saturation, p.hue);
  if (!p.contrast_first) contrast();
  return img;
}

inline Image photometric_distortion(const Image& image, const PmdConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (image.channels != 3) throw ValidationError("photometric_distortion: expected 3 channels");
  Rng rng(seed);
  return apply_pmd(image, draw_pmd_params(cfg, rng));
}

// ---------------------------------------------------------------------------
// Blur and mirror
// ---------------------------------------------------------------------------

struct BlurMirrorConfig {
  double mirror_p = 0.5;
  double blur_p = 0.5;
  double blur_radius_lower = 0.0, blur_radius_upper = 1.0;  // open interval

  void validate() const {
    if (!(mirror_p >= 0.0 && mirror_p <= 1.0)) throw ValidationError("blur_mirror.mirror_p must lie in [0, 1]");
    if (!(blur_p >= 0.0 && blur_p <= 1.0)) throw ValidationError("blur_mirror.blur_p must lie in [0, 1]");
    if (!(blur_radius_lower >= 0.0 && blur_radius_upper > blur_radius_lower))
      throw ValidationError("blur_mirror radius range must be a positive interval");
  }
};

/// Normalized 1-D Gaussian with sigma = radius and ceil(3 sigma) taps per side.
inline std::vector<double> gaussian_kernel(double radius) {
  if (!(radius > 0.0)) throw ValidationError("gaussian_blur: radius must be positive");
  const int k = static_cast<int>(std::ceil(3.0 * radius));
  std::vector<double> w(2 * k + 1);
  double sum = 0.0;
  for (int i = -k; i <= k; ++i) sum += w[i + k] = std::exp(-double(i * i) / (2.0 * radius * radius));
  for (double& v : w) v /= sum;
  return w;
}

namespace detail {

// Border reflection without repeating the edge pixel (…2 1 | 0 1 2 … n-1 | n-2 …).
inline std::size_t reflect101(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < n ? i : period - i);
}

}  // namespace detail

inline Image gaussian_blur(const Image& image, double radius, bool apply = true) {
  if (!apply) return image;
  const auto w = gaussian_kernel(radius);
  const long k = static_cast<long>(w.size() / 2);
  const long W = static_cast<long>(image.width), H = static_cast<long>(image.height);
  Image tmp(image.width, image.height, image.channels), out(image.width, image.height, image.channels);
  for (std::size_t c = 0; c < image.channels; ++c) {
    for (long y = 0; y < H; ++y)
      for (long x = 0; x < W; ++x) {
        double acc = 0.0;
        for (long t = -k; t <= k; ++t)
          acc += w[t + k] * image.at(c, std::size_t(y), detail::reflect101(x + t, W));
        tmp.at(c, std::size_t(y), std::size_t(x)) = static_cast<float>(acc);
      }
    for (long y = 0; y < H; ++y)
      for (long x = 0; x < W; ++x) {
        double acc = 0.0;
        for (long t = -k; t <= k; ++t)
          acc += w[t + k] * tmp.at(c, detail::reflect101(y + t, H), std::size_t(x));
        out.at(c, std::size_t(y), std::size_t(x)) = static_cast<float>(acc);
      }
  }
  return out;
}

template <typename T>
ImageT<T> flip_horizontal(const ImageT<T>& img) {
  ImageT<T> out = img;
  for (std::size_t c = 0; c < img.channels; ++c)
    for (std::size_t y = 0; y < img.height; ++y)
      for (std::size_t x = 0; x < img.width; ++x) out.at(c, y, x) = img.at(c, y, img.width - 1 - x);
  return out;
}

inline std::pair<Image, LabelImage> mirror(const Image& image, const LabelImage& label, bool apply) {
  if (image.width != label.width || image.height != label.height)
    throw ValidationError("mirror: image and label sizes differ");
  if (!apply) return {image, label};
  return {flip_horizontal(image), flip_horizontal(label)};
}

// ---------------------------------------------------------------------------
// Online chain: mirror -> blur -> photometric distortion
// ---------------------------------------------------------------------------

struct TransformParams {
  bool mirror = false;
  std::optional<double> blur_radius;
  PmdParams pmd;
};

inline TransformParams draw_transform(std::uint64_t transform_seed, const BlurMirrorConfig& bm,
                                      const PmdConfig& pmd) {
  bm.validate();
  pmd.validate();
  TransformParams t;
  Rng geo(derive_seed(transform_seed, "geometry"));
  t.mirror = geo.bernoulli(bm.mirror_p);
  const bool blur = geo.bernoulli(bm.blur_p);
  const double radius = geo.uniform_open(bm.blur_radius_lower, bm.blur_radius_upper);
  if (blur) t.blur_radius = radius;
  Rng color(derive_seed(transform_seed, "photometric"));
  t.pmd = draw_pmd_params(pmd, color);
  return t;
}

inline std::pair<Image, LabelImage> apply_transform(const Image& image, const LabelImage& label,
                                                    const TransformParams& t) {
  auto [img, lab] = mirror(image, label, t.mirror);
  if (t.blur_radius) img = gaussian_blur(img, *t.blur_radius);
  return {apply_pmd(std::move(img), t.pmd), std::move(lab)};
}

}  // namespace stylemix
