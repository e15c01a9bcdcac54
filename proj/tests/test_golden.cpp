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

// Conformance against reference fixtures produced by the weight converter.
//
// Fixture directory layout (STYLEMIX_GOLDEN_DIR, default tests/fixtures/golden):
//   fixture.json   {"archive": "...", "content": "...", "style": "...",
//                   "reference": "...", "stylized": "...", "alpha": 1.0}
//   reference      SMDW archive holding content_relu4_1, style_relu4_1,
//                  adain and decoded, each 1×C×H×W.
// Tests skip when the directory is absent.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "stylemix/adain.hpp"
#include "stylemix/image_io.hpp"
#include "stylemix/weights.hpp"

using namespace stylemix;
namespace fs = std::filesystem;

namespace {

constexpr double kFeatureMae = 1e-3;
constexpr double kPixelMae = 2.0 / 255.0;

fs::path golden_dir() {
  if (const char* env = std::getenv("STYLEMIX_GOLDEN_DIR")) return env;
  return fs::path(STYLEMIX_SOURCE_DIR) / "tests" / "fixtures" / "golden";
}

struct Golden {
  WeightArchive weights;
  WeightArchive reference;
  Image content, style, stylized;
  StylizeConfig cfg;
};

std::optional<Golden> load_golden() {
  const fs::path dir = golden_dir();
  if (!fs::is_regular_file(dir / "fixture.json")) return std::nullopt;
  std::ifstream in(dir / "fixture.json");
  const auto j = nlohmann::json::parse(in);
  Golden g;
  g.weights = WeightArchive::load(dir / j.at("archive").get<std::string>());
  g.reference = WeightArchive::load(dir / j.at("reference").get<std::string>());
  g.content = load_image(dir / j.at("content").get<std::string>());
  g.style = load_image(dir / j.at("style").get<std::string>());
  g.stylized = load_image(dir / j.at("stylized").get<std::string>());
  g.cfg.alpha = j.value("alpha", 1.0);
  return g;
}

Tensor reference_tensor(const WeightArchive& ref, const std::string& name) {
  const NamedArray& a = ref.at(name);
  if (a.dims.size() != 4) throw ValidationError("reference " + name + " is not 4-d");
  return Tensor({a.dims[0], a.dims[1], a.dims[2], a.dims[3]}, a.values);
}

double mae(std::span<const float> a, std::span<const float> b) {
  EXPECT_EQ(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) sum += std::abs(double(a[i]) - b[i]);
  return a.empty() ? 0.0 : sum / double(a.size());
}

class GoldenConformance : public ::testing::Test {
 protected:
  void SetUp() override {
    golden_ = load_golden();
    if (!golden_) GTEST_SKIP() << "no golden fixtures at " << golden_dir();
  }
  std::optional<Golden> golden_;
};

}  // namespace

TEST_F(GoldenConformance, EncoderActivations) {
  const StyleTransfer engine(golden_->weights);
  for (const auto& [name, img] : {std::pair{"content_relu4_1", &golden_->content},
                                  std::pair{"style_relu4_1", &golden_->style}}) {
    const Tensor ref = reference_tensor(golden_->reference, name);
    const Tensor got = engine.encode(to_tensor(*img));
    ASSERT_EQ(got.shape(), ref.shape()) << name;
    EXPECT_LE(mae(got.data(), ref.data()), kFeatureMae) << name;
  }
}

TEST_F(GoldenConformance, AdainAndDecoder) {
  const StyleTransfer engine(golden_->weights);
  const Tensor cf = reference_tensor(golden_->reference, "content_relu4_1");
  const Tensor sf = reference_tensor(golden_->reference, "style_relu4_1");
  const Tensor t = adain(cf, sf, golden_->cfg);
  const Tensor ref_t = reference_tensor(golden_->reference, "adain");
  ASSERT_EQ(t.shape(), ref_t.shape());
  EXPECT_LE(mae(t.data(), ref_t.data()), kFeatureMae);
  const Tensor dec = engine.decode(ref_t);
  const Tensor ref_dec = reference_tensor(golden_->reference, "decoded");
  ASSERT_EQ(dec.shape(), ref_dec.shape());
  EXPECT_LE(mae(dec.data(), ref_dec.data()), kPixelMae);
}

TEST_F(GoldenConformance, StylizedImage) {
  const StyleTransfer engine(golden_->weights);
  const Image out = quantize8(engine.stylize(golden_->content, golden_->style, golden_->cfg));
  ASSERT_EQ(out.width, golden_->stylized.width);
  ASSERT_EQ(out.height, golden_->stylized.height);
  EXPECT_LE(mae(out.data, golden_->stylized.data) / 255.0, kPixelMae);
}
