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

#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "stylemix/image.hpp"
#include "stylemix/tcps.hpp"

using namespace stylemix;

namespace {

Image random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  Image img(w, h, 3);
  Rng rng(seed);
  for (float& v : img.data) v = float(rng.below(256));
  return img;
}

Image alternating_columns(std::size_t side) {
  Image img(side, side, 3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < side; ++y)
      for (std::size_t x = 0; x < side; ++x) img.at(c, y, x) = x % 2 ? 255.0f : 0.0f;
  return img;
}

}  // namespace

TEST(GradientMap, ConstantRampAndAlternating) {
  Image flat(512, 512, 1);
  std::fill(flat.data.begin(), flat.data.end(), 77.0f);
  for (float v : gradient_map(flat).data) ASSERT_EQ(v, 0.0f);

  Image ramp(512, 512, 1);
  for (std::size_t y = 0; y < 512; ++y)
    for (std::size_t x = 0; x < 512; ++x) ramp.at(0, y, x) = float(x);
  const Image g = gradient_map(ramp);
  EXPECT_EQ(g.at(0, 10, 10), 1.0f);
  EXPECT_EQ(g.at(0, 511, 0), 1.0f);
  EXPECT_EQ(g.at(0, 10, 511), 0.0f);

  const Image alt = gradient_map(to_grayscale(alternating_columns(512)));
  EXPECT_EQ(alt.at(0, 100, 100), 65025.0f);
  EXPECT_EQ(alt.at(0, 100, 511), 0.0f);
}

TEST(GradientMap, RejectsWrongSize) {
  EXPECT_THROW(gradient_map(Image(256, 256, 1)), ValidationError);
  EXPECT_THROW(gradient_map(Image(512, 512, 3)), ValidationError);
}

TEST(Complexity, ConstantImageIsAllSmooth) {
  Image img(300, 200, 3);
  std::fill(img.data.begin(), img.data.end(), 128.0f);
  const auto s = complexity(img);
  EXPECT_EQ(s.score, 1.0);
  EXPECT_EQ(s.bin, ComplexityBin::High);
  for (float& v : img.data) v += 40.0f;
  EXPECT_EQ(complexity(img).score, 1.0);
}

TEST(Complexity, AlternatingColumns) {
  const auto s = complexity(alternating_columns(512));
  EXPECT_EQ(s.score, 512.0 / 262144.0);
  EXPECT_EQ(s.bin, ComplexityBin::Low);
}

TEST(Complexity, MatchesOracleOnRandomImages) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    const std::size_t w = 8 + rng.below(600), h = 8 + rng.below(600);
    const Image img = random_image(w, h, seed);
    EXPECT_EQ(complexity(img).score, oracle::complexity_score(img)) << w << "x" << h;
  }
  // Upscaled 16x16 input is mostly smooth interpolation.
  const Image small = random_image(16, 16, 42);
  EXPECT_EQ(complexity(small).score, oracle::complexity_score(small));
}

TEST(Complexity, BinsAreHalfOpen) {
  const TcpsConfig cfg;
  EXPECT_EQ(cfg.bin_of(0.0), ComplexityBin::Low);
  EXPECT_EQ(cfg.bin_of(0.3), ComplexityBin::Low);
  EXPECT_EQ(cfg.bin_of(0.4999), ComplexityBin::Low);
  EXPECT_EQ(cfg.bin_of(0.5), ComplexityBin::Medium);
  EXPECT_EQ(cfg.bin_of(0.7499999), ComplexityBin::Medium);
  EXPECT_EQ(cfg.bin_of(0.75), ComplexityBin::High);
  EXPECT_EQ(cfg.bin_of(1.0), ComplexityBin::High);
}

TEST(SmoothMask, PartitionsPixels) {
  const Image img = random_image(64, 80, 3);
  const auto split = smooth_mask(img);
  const Image prepared = tcps_prepare(img);
  ASSERT_EQ(split.mask.width, 512u);
  for (std::size_t i = 0; i < split.mask.data.size(); ++i) {
    const bool smooth = split.mask.data[i] == 1;
    for (std::size_t c = 0; c < 3; ++c) {
      const float orig = prepared.plane(c)[i];
      EXPECT_EQ(split.smooth.plane(c)[i], smooth ? orig : 0.0f);
      EXPECT_EQ(split.unsmooth.plane(c)[i], smooth ? 0.0f : orig);
    }
  }
  std::size_t smooth = 0;
  for (auto m : split.mask.data) smooth += m;
  EXPECT_EQ(double(smooth) / (512.0 * 512.0), complexity(img).score);
}

TEST(SmoothMask, ConstantImage) {
  Image img(40, 40, 3);
  std::fill(img.data.begin(), img.data.end(), 10.0f);
  const auto split = smooth_mask(img, {}, {1.0f, 2.0f, 3.0f});
  for (float v : split.smooth.data) ASSERT_EQ(v, 10.0f);
  for (std::size_t c = 0; c < 3; ++c)
    for (float v : split.unsmooth.plane(c)) ASSERT_EQ(v, float(c + 1));
}

TEST(PartitionPool, DisjointCoverAndSampling) {
  std::vector<StyleRecord> recs;
  const double scores[] = {0.3, 0.5, 0.75, 0.1, 0.6, 0.9, 0.2, 0.0, 0.49, 1.0};
  for (std::size_t i = 0; i < 10; ++i)
    recs.push_back({"s" + std::to_string(i), "p", 512, 512, ComplexityScore{scores[i], TcpsConfig{}.bin_of(scores[i])}});
  const auto pool = partition_pool(recs);
  EXPECT_EQ(pool.low.size() + pool.medium.size() + pool.high.size(), recs.size());
  EXPECT_EQ(pool.low.front().id, "s0");
  EXPECT_EQ(pool.medium.front().id, "s1");
  EXPECT_EQ(pool.high.front().id, "s2");
  for (const auto& r : pool.medium) {
    EXPECT_GE(r.score->score, 0.5);
    EXPECT_LT(r.score->score, 0.75);
  }
  const auto a = sample_bin(pool, ComplexityBin::Low, 2, 7);
  const auto b = sample_bin(pool, ComplexityBin::Low, 2, 7);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].id, b[0].id);
  EXPECT_EQ(a[1].id, b[1].id);
  EXPECT_NE(a[0].id, a[1].id);
  EXPECT_THROW(sample_bin(pool, ComplexityBin::High, 4, 7), ValidationError);
  recs.push_back({"x", "p", 1, 1, std::nullopt});
  EXPECT_THROW(partition_pool(recs), ValidationError);
}

TEST(ScoresFile, RoundTripAndValidation) {
  const auto dir = std::filesystem::temp_directory_path() / "stylemix_scores_test";
  std::filesystem::create_directories(dir);
  std::vector<StyleRecord> recs = {{"a", "/x/a.png", 600, 600, ComplexityScore{0.4999996, ComplexityBin::Low}},
                                   {"b", "/x/b.png", 600, 600, ComplexityScore{0.75, ComplexityBin::High}}};
  write_scores_file(dir / "s.tsv", recs);
  const auto back = read_scores_file(dir / "s.tsv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].score->bin, ComplexityBin::Low);  // printed as 0.500000
  EXPECT_EQ(back[1].score->score, 0.75);
  EXPECT_EQ(format_score_line(back[0]), "a\t/x/a.png\t0.500000\tlow");
  {
    std::ofstream bad(dir / "bad.tsv");
    bad << "a\t/x\t0.9\tlow\n";
  }
  EXPECT_THROW(read_scores_file(dir / "bad.tsv"), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST(Sampling, WithoutReplacementIsDistinctAndSeeded) {
  const auto a = sample_without_replacement(100, 30, 5);
  const auto b = sample_without_replacement(100, 30, 5);
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 30u);
  EXPECT_NE(a, sample_without_replacement(100, 30, 6));
  EXPECT_THROW(sample_without_replacement(3, 4, 1), ValidationError);
}
