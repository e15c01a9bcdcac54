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

// Texture-complexity scoring of style images.
//
// An image is center-cropped to a square, resized to 512x512, converted to
// grayscale, and differentiated with forward differences along both axes
// (zero-padded back to 512x512). A pixel is "smooth" when
// grad_x^2 + grad_y^2 < epsilon. The score is the fraction of smooth pixels,
// so a flat image scores 1.0.

#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stylemix/common.hpp"
#include "stylemix/image.hpp"

namespace stylemix {

enum class ComplexityBin { Low, Medium, High };

inline const char* to_string(ComplexityBin b) {
  switch (b) {
    case ComplexityBin::Low: return "low";
    case ComplexityBin::Medium: return "medium";
    case ComplexityBin::High: return "high";
  }
  return "?";
}

inline ComplexityBin parse_bin(std::string_view s) {
  if (s == "low") return ComplexityBin::Low;
  if (s == "medium") return ComplexityBin::Medium;
  if (s == "high") return ComplexityBin::High;
  throw ValidationError("unknown complexity bin '" + std::string(s) + "' (low|medium|high)");
}

struct TcpsConfig {
  double epsilon = 20.0;
  std::size_t eval_size = 512;
  // Low = [0, low_upper), Medium = [low_upper, medium_upper), High = [medium_upper, 1]
  double low_upper = 0.5;
  double medium_upper = 0.75;

  void validate() const {
    if (!(epsilon > 0.0)) throw ValidationError("tcps.epsilon must be positive");
    if (eval_size < 2) throw ValidationError("tcps.eval_size must be at least 2");
    if (!(0.0 < low_upper && low_upper < medium_upper && medium_upper <= 1.0))
      throw ValidationError("tcps bin boundaries must satisfy 0 < low < medium <= 1");
  }

  ComplexityBin bin_of(double score) const {
    if (score < low_upper) return ComplexityBin::Low;
    if (score < medium_upper) return ComplexityBin::Medium;
    return ComplexityBin::High;
  }
};

struct ComplexityScore {
  double score = 0.0;
  ComplexityBin bin = ComplexityBin::Low;
};

/// Squared forward-difference gradient magnitude of a square grayscale image.
inline Image gradient_map(const Image& gray, std::size_t expected_size = 512) {
  if (gray.channels != 1) throw ValidationError("gradient_map: expected a grayscale image");
  if (gray.width != expected_size || gray.height != expected_size)
    throw ValidationError("gradient_map: expected " + std::to_string(expected_size) + "x" +
                          std::to_string(expected_size) + ", got " + std::to_string(gray.width) +
                          "x" + std::to_string(gray.height));
  const std::size_t n = expected_size;
  Image grad(n, n, 1);
  const auto src = gray.plane(0);
  auto dst = grad.plane(0);
  for (std::size_t i = 0; i < n; ++i) {
    const float* row = src.data() + i * n;
    const float* below = i + 1 < n ? row + n : nullptr;
    float* out = dst.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const float gx = below ? below[j] - row[j] : 0.0f;
      const float gy = j + 1 < n ? row[j + 1] - row[j] : 0.0f;
      out[j] = gx * gx + gy * gy;
    }
  }
  return grad;
}

/// Square center crop and bilinear resize to the evaluation size (color kept).
inline Image tcps_prepare(const Image& image, const TcpsConfig& cfg = {}) {
  if (image.empty() || image.width == 0 || image.height == 0)
    throw ValidationError("tcps: empty image");
  return resize_bilinear(crop(image, center_square(image.width, image.height)), cfg.eval_size,
                         cfg.eval_size);
}

inline ComplexityScore complexity(const Image& image, const TcpsConfig& cfg = {}) {
  cfg.validate();
  const Image grad = gradient_map(to_grayscale(tcps_prepare(image, cfg)), cfg.eval_size);
  const auto g = grad.plane(0);
  const auto smooth = std::count_if(g.begin(), g.end(), [&](float v) { return v < cfg.epsilon; });
  const double score = static_cast<double>(smooth) / static_cast<double>(g.size());
  return {score, cfg.bin_of(score)};
}

struct SmoothSplit {
  Image smooth;    // smooth pixels kept, the rest set to the sentinel colour
  Image unsmooth;  // complement
  Mask mask;       // 1 where smooth
};

inline SmoothSplit smooth_mask(const Image& image, const TcpsConfig& cfg = {},
                               std::array<float, 3> sentinel = {0.0f, 0.0f, 0.0f}) {
  cfg.validate();
  Image prepared = tcps_prepare(image, cfg);
  if (prepared.channels == 1) {
    Image rgb(prepared.width, prepared.height, 3);
    for (std::size_t c = 0; c < 3; ++c)
      std::copy(prepared.data.begin(), prepared.data.end(), rgb.plane(c).begin());
    prepared = std::move(rgb);
  }
  const Image grad = gradient_map(to_grayscale(prepared), cfg.eval_size);
  SmoothSplit out{prepared, prepared, Mask(prepared.width, prepared.height, 1)};
  const auto g = grad.plane(0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool smooth = g[i] < cfg.epsilon;
    out.mask.data[i] = smooth ? 1 : 0;
    Image& blank = smooth ? out.unsmooth : out.smooth;
    for (std::size_t c = 0; c < 3; ++c) blank.plane(c)[i] = sentinel[c];
  }
  return out;
}

/// One candidate style image.
struct StyleRecord {
  std::string id;
  std::filesystem::path path;
  std::size_t width = 0, height = 0;
  std::optional<ComplexityScore> score;
};

struct PartitionedPool {
  std::vector<StyleRecord> low, medium, high;

  const std::vector<StyleRecord>& bin(ComplexityBin b) const {
    return b == ComplexityBin::Low ? low : b == ComplexityBin::Medium ? medium : high;
  }
};

/// Splits scored records into the three complexity bins. Input order is kept
/// within each bin.
inline PartitionedPool partition_pool(const std::vector<StyleRecord>& records,
                                      const TcpsConfig& cfg = {}) {
  cfg.validate();
  PartitionedPool pool;
  for (const auto& r : records) {
    if (!r.score) throw ValidationError("partition_pool: record '" + r.id + "' has no score");
    switch (cfg.bin_of(r.score->score)) {
      case ComplexityBin::Low: pool.low.push_back(r); break;
      case ComplexityBin::Medium: pool.medium.push_back(r); break;
      case ComplexityBin::High: pool.high.push_back(r); break;
    }
  }
  return pool;
}

/// Indices of k distinct elements out of n, uniformly, in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                           std::uint64_t seed) {
  if (k > n)
    throw ValidationError("cannot sample " + std::to_string(k) + " of " + std::to_string(n));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  return idx;
}

/// k records from one bin, reproducible under `seed`.
inline std::vector<StyleRecord> sample_bin(const PartitionedPool& pool, ComplexityBin b,
                                           std::size_t k, std::uint64_t seed) {
  const auto& src = pool.bin(b);
  if (k > src.size())
    throw ValidationError("requested " + std::to_string(k) + " records from bin " + to_string(b) +
                          " which holds " + std::to_string(src.size()));
  std::vector<StyleRecord> out;
  for (std::size_t i : sample_without_replacement(src.size(), k, derive_seed(seed, to_string(b))))
    out.push_back(src[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Scores file: one record per line, tab separated:
//   id  path  score(6 decimals)  bin
// ---------------------------------------------------------------------------

inline std::string format_score_line(const StyleRecord& r) {
  if (!r.score) throw ValidationError("record '" + r.id + "' has no score");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", r.score->score);
  return r.id + "\t" + r.path.string() + "\t" + buf + "\t" + to_string(r.score->bin);
}

inline void write_scores_file(const std::filesystem::path& path,
                              const std::vector<StyleRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  for (const auto& r : records) out << format_score_line(r) << '\n';
}

inline std::vector<StyleRecord> read_scores_file(const std::filesystem::path& path,
                                                 const TcpsConfig& cfg = {}) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scores file " + path.string());
  std::vector<StyleRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string part; std::getline(ss, part, '\t');) f.push_back(part);
    if (f.size() != 4)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
    StyleRecord r;
    r.id = f[0];
    r.path = f[1];
    double score = 0.0;
    try {
      score = std::stod(f[2]);
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": bad score");
    }
    if (score < 0.0 || score > 1.0)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": score out of [0,1]");
    // The stored bin wins; the 6-decimal score may sit on a boundary after rounding.
    const ComplexityBin bin = parse_bin(f[3]);
    const bool consistent = cfg.bin_of(score) == bin || cfg.bin_of(score - 5e-7) == bin ||
                            cfg.bin_of(score + 5e-7) == bin;
    if (!consistent)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": bin does not match score");
    r.score = ComplexityScore{score, bin};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace stylemix
