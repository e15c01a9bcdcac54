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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "stylemix/stylemix.hpp"
#include "test_data.hpp"

using namespace stylemix;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Channels with a prescribed mean and exact population std.
Tensor feature_map(std::size_t c, std::size_t h, std::size_t w, Rng& rng) {
  Tensor t({1, c, h, w});
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double mean = rng.uniform(-1.0, 1.0);
    const double sd = rng.uniform(0.1, 1.0);
    std::vector<double> v(h * w);
    double m = 0.0;
    for (double& x : v) m += (x = rng.normal());
    m /= double(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    const double s = std::sqrt(var / double(v.size()));
    auto p = t.plane(0, ch);
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = float(mean + sd * (v[i] - m) / s);
  }
  return t;
}

void double_stats(std::span<const float> p, double& mean, double& sd) {
  mean = 0.0;
  for (float v : p) mean += v;
  mean /= double(p.size());
  double var = 0.0;
  for (float v : p) var += (v - mean) * (v - mean);
  sd = std::sqrt(var / double(p.size()));
}

Outcome adain_statistics() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(1, "adain-acceptance"));
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const std::size_t ch = 512u, hc = 8 + rng.below(25), wc = 8 + rng.below(25), hs = 8 + rng.below(25),
                      ws = 8 + rng.below(25);
    const Tensor content = feature_map(ch, hc, wc, rng);
    const Tensor style = feature_map(ch, hs, ws, rng);
    const Tensor out = adain(content, style);
    for (std::size_t c = 0; c < ch; ++c) {
      double om, os, sm, ss;
      double_stats(out.plane(0, c), om, os);
      double_stats(style.plane(0, c), sm, ss);
      worst = std::max({worst, std::abs(om - sm), std::abs(os - ss)});
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 10.0, fmt("max |stat diff| %.3g (<= 1e-4), %.2f s (< 10 s)", worst, secs)};
}

Outcome geometry(const StyleTransfer& engine, const Image& content, const Image& style) {
  const Tensor f = engine.encode(to_tensor(content));
  const Tensor d = engine.decode(adain(f, engine.encode(to_tensor(style))));
  const Image out = engine.stylize(content, style);
  const bool ok = f.shape() == Shape{1, 512, 132, 132} && d.shape() == Shape{1, 3, 1056, 1056} &&
                  out.width == 1052 && out.height == 1052 && out.channels == 3;
  return {ok, fmt("relu4_1 %s, decoded %s, output %zux%zu", f.shape().str().c_str(), d.shape().str().c_str(),
                  out.width, out.height)};
}

Outcome kernel_oracles() {
  using Path = ConvOptions::Path;
  Rng rng(derive_seed(1, "kernel-acceptance"));
  double worst = 0.0;
  std::size_t pool_mismatch = 0, pad_mismatch = 0, up_mismatch = 0, convs = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t ci = 1 + rng.below(32), co = 1 + rng.below(32), h = 3 + rng.below(18), w = 3 + rng.below(18);
    const std::size_t k = t % 3 == 0 ? 1 : 3;
    const Tensor in = oracle::random_tensor({1, ci, h, w}, derive_seed(7, "in", std::uint64_t(t)));
    ConvSpec spec{ci, co, k, oracle::random_floats(co * ci * k * k, derive_seed(7, "w", std::uint64_t(t))),
                  oracle::random_floats(co, derive_seed(7, "b", std::uint64_t(t)))};
    const ConvKernel kernel(spec);
    const Tensor plain = oracle::conv(in, spec);
    const Tensor padded = oracle::relu(oracle::conv(oracle::pad(in, 1), spec));
    std::vector<Path> paths{Path::Auto, Path::Direct, Path::Im2col};
    if (k == 3) paths.push_back(Path::Winograd);
    for (Path p : paths) {
      if (k <= std::min(h, w)) {
        worst = std::max(worst, oracle::relative_error(kernel(in, {0, false, p}), plain));
        ++convs;
      }
      worst = std::max(worst, oracle::relative_error(kernel(in, {1, true, p}), padded));
      ++convs;
    }
    const auto same = [](const Tensor& a, const Tensor& b) {
      return a.shape() == b.shape() && std::equal(a.data().begin(), a.data().end(), b.data().begin());
    };
    pool_mismatch += !same(maxpool2(in), oracle::maxpool_ceil(in));
    pad_mismatch += !same(reflection_pad(in, 1), oracle::pad(in, 1));
    pad_mismatch += !same(reflection_pad(in, 2), oracle::pad(in, 2));
    up_mismatch += !same(upsample_nearest2(in), oracle::upsample2(in));
  }
  return {worst <= 1e-5 && pool_mismatch == 0 && pad_mismatch == 0 && up_mismatch == 0,
          fmt("%zu conv runs max rel err %.3g (<= 1e-5); pool/pad/upsample mismatches %zu/%zu/%zu", convs, worst,
              pool_mismatch, pad_mismatch, up_mismatch)};
}

Outcome tcps_oracle() {
  Rng rng(derive_seed(1, "tcps-acceptance"));
  std::size_t mismatches = 0;
  std::size_t bins[3] = {0, 0, 0};
  for (int t = 0; t < 200; ++t) {
    const std::size_t w = 64 + rng.below(640), h = 64 + rng.below(640);
    Image img(w, h, 3);
    const double amplitude = rng.uniform(0.0, 48.0);
    const double base = rng.uniform(0.0, 200.0);
    for (float& v : img.data) v = float(base + amplitude * rng.uniform());
    const ComplexityScore s = complexity(img);
    const double o = oracle::complexity_score(img);
    mismatches += s.score != o;
    ++bins[int(s.bin)];
  }
  Image constant(600, 400, 3);
  for (float& v : constant.data) v = 128.0f;
  const double cs = complexity(constant).score;
  Image cols(512, 512, 3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < 512; ++y)
      for (std::size_t x = 0; x < 512; ++x) cols.at(c, y, x) = x % 2 ? 255.0f : 0.0f;
  const double as = complexity(cols).score;
  const TcpsConfig cfg;
  const bool bounds = cfg.bin_of(0.0) == ComplexityBin::Low &&
                      cfg.bin_of(std::nextafter(0.5, 0.0)) == ComplexityBin::Low &&
                      cfg.bin_of(0.5) == ComplexityBin::Medium &&
                      cfg.bin_of(std::nextafter(0.75, 0.0)) == ComplexityBin::Medium &&
                      cfg.bin_of(0.75) == ComplexityBin::High && cfg.bin_of(1.0) == ComplexityBin::High;
  const bool ok = mismatches == 0 && cs == 1.0 && as == 512.0 / 262144.0 && bounds;
  return {ok, fmt("200 images, %zu mismatches (bins %zu/%zu/%zu); constant %.6f; alternating %.8f; "
                  "half-open bounds %s",
                  mismatches, bins[0], bins[1], bins[2], cs, as, bounds ? "ok" : "wrong")};
}

Outcome sampler_statistics() {
  AugmentationManifest m;
  m.n_variants = 3;
  for (int i = 0; i < 1000; ++i) {
    ManifestEntry e;
    e.image_id = "img" + std::to_string(i);
    for (int v = 0; v < 3; ++v) e.stylized.push_back({e.image_id + "_v" + std::to_string(v), "s", 0, ""});
    m.entries.push_back(std::move(e));
  }
  const SamplerConfig cfg{0.8, 2024};
  constexpr std::size_t kDraws = 1000000, kChunk = 1000;
  auto draw = [&](std::size_t workers) {
    const Sampler sampler(m, cfg);
    std::vector<SampleItem> items(kDraws);
    parallel_for(kDraws / kChunk, workers, [&](std::size_t chunk) {
      for (std::size_t i = chunk * kChunk; i < (chunk + 1) * kChunk; ++i) items[i] = sampler.at_index(i);
    });
    return items;
  };
  const auto one = draw(1);
  std::size_t stylized = 0;
  for (const auto& it : one) stylized += it.stylized();
  const double frac = double(stylized) / double(kDraws);
  const bool same4 = draw(4) == one, same16 = draw(16) == one;
  return {frac >= 0.796 && frac <= 0.804 && same4 && same16,
          fmt("stylized fraction %.5f in [0.796, 0.804]; 4 workers %s, 16 workers %s", frac,
              same4 ? "identical" : "DIFFERENT", same16 ? "identical" : "DIFFERENT")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome manifest_determinism() {
  const fs::path root = testdata::fresh_dir("acceptance_manifest");
  testdata::write_style_dir(root / "styles", 16, 64, 72);
  testdata::write_content_dir(root / "content", root / "labels", {{64, 64}, {64, 70}, {64, 64}});
  PipelineConfig cfg;
  cfg.style_dir = root / "styles";
  cfg.content_dir = root / "content";
  cfg.label_dir = root / "labels";
  cfg.n_variants = 3;
  cfg.style_pool_size = 15;
  cfg.content_patch = 64;
  cfg.resize_to = 64;
  cfg.style_min_side = 64;
  cfg.style_size = 64;
  cfg.seed = 77;
  const WeightArchive weights = make_random_archive(3);
  auto run = [&](const fs::path& out, std::size_t workers) {
    const auto pool = build_pool(cfg, {workers, nullptr, nullptr, {}});
    return augment_dataset(cfg, {}, pool, weights, {out, workers, nullptr});
  };
  const auto a = run(root / "run_a", 1);
  const auto b = run(root / "run_b", 4);
  const std::string ta = slurp(root / "run_a" / "manifest.json");
  const std::string tb = slurp(root / "run_b" / "manifest.json");
  const std::size_t originals = a.entries.size(), stylized = a.stylized_count();
  fs::remove_all(root);
  const bool ok = !ta.empty() && ta == tb && originals == 3 && stylized == 9 && b.entries.size() == 3;
  return {ok, fmt("manifests %s (%zu bytes); %zu stylized + %zu original entries",
                  ta == tb ? "byte-identical" : "DIFFER", ta.size(), stylized, originals)};
}

LabelImage random_labels(Rng& rng, std::size_t classes, bool with_ignore) {
  LabelImage img(16, 16, 1);
  for (auto& v : img.data) v = with_ignore && rng.bernoulli(0.1) ? kIgnoreLabel : std::uint16_t(rng.below(classes));
  return img;
}

Outcome miou_oracle() {
  Rng rng(derive_seed(1, "miou-acceptance"));
  std::size_t mismatches = 0, excluded_ok = 0, pairs_with_gaps = 0;
  std::vector<LabelImage> gts, preds;
  ConfusionMatrix all;
  for (int t = 0; t < 100; ++t) {
    const std::size_t classes = 2 + rng.below(18);
    gts.push_back(random_labels(rng, classes, true));
    preds.push_back(random_labels(rng, classes, false));
    ConfusionMatrix conf;
    accumulate(conf, gts.back(), preds.back());
    accumulate(all, gts.back(), preds.back());
    const IouResult r = miou(conf);
    const auto o = oracle::iou({gts.back()}, {preds.back()});
    std::size_t present = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      mismatches += r.per_class[c] != o.per_class[c];
      present += o.per_class[c].has_value();
    }
    mismatches += r.mean != o.mean || r.classes_evaluated != present;
    if (present < kNumClasses) {
      ++pairs_with_gaps;
      excluded_ok += r.classes_evaluated == present;
    }
  }
  const IouResult ra = miou(all);
  const auto oa = oracle::iou(gts, preds);
  mismatches += ra.mean != oa.mean || ra.per_class != oa.per_class;
  ConfusionMatrix perfect;
  for (const auto& g : gts) {
    LabelImage p = g;
    for (auto& v : p.data) v = v == kIgnoreLabel ? 0 : v;
    accumulate(perfect, g, p);
  }
  const double pm = miou(perfect).mean;
  return {mismatches == 0 && pm == 1.0 && excluded_ok == pairs_with_gaps && pairs_with_gaps > 0,
          fmt("100 pairs, %zu mismatches; perfect %.6f; zero-union classes excluded in %zu/%zu pairs", mismatches,
              pm, excluded_ok, pairs_with_gaps)};
}

Outcome archive_round_trip() {
  const WeightArchive a = make_random_archive(9);
  const auto bytes = a.serialize();
  const auto again = WeightArchive::deserialize(bytes).serialize();
  std::size_t rejected = 0, tried = 0;
  for (std::size_t pos : {std::size_t(20), bytes.size() / 2, bytes.size() - 1}) {
    auto bad = bytes;
    bad[pos] ^= 0x10;
    ++tried;
    try {
      (void)WeightArchive::deserialize(bad);
    } catch (const RuntimeFailure& e) {
      rejected += std::string(e.what()).find("CRC") != std::string::npos;
    }
  }
  return {again == bytes && rejected == tried,
          fmt("%zu bytes %s; %zu/%zu corruptions rejected by CRC", bytes.size(),
              again == bytes ? "byte-identical" : "DIFFER", rejected, tried)};
}

Outcome single_stylization(const StyleTransfer& engine, const Image& content, const Image& style) {
  const auto t0 = Clock::now();
  const Image out = engine.stylize(content, style);
  const double secs = seconds_since(t0);
  return {secs <= 10.0 && out.width == 1052, fmt("1052x1052 stylization %.2f s (<= 10 s)", secs)};
}

Outcome parallel_throughput(const StyleTransfer& engine) {
  constexpr std::size_t kJobs = 8, kSide = 512;
  std::vector<Image> contents;
  for (std::size_t i = 0; i < kJobs; ++i) contents.push_back(testdata::noise_image(kSide, kSide, 40 + i));
  const Image style = testdata::noise_image(512, 512, 99);
  std::vector<Image> outs(kJobs);
  auto batch = [&](std::size_t workers) {
    const auto t0 = Clock::now();
    parallel_for(kJobs, workers, [&](std::size_t i) { outs[i] = engine.stylize(contents[i], style); });
    return seconds_since(t0);
  };
  const double t1 = batch(1), t8 = batch(8);
  const double speedup = t1 / t8;
  return {speedup >= 3.0, fmt("%zu stylizations at %zux%zu: 1 worker %.2f s, 8 workers %.2f s, speedup %.2fx "
                              "(>= 3x); hardware threads %u",
                              kJobs, kSide, kSide, t1, t8, speedup, std::thread::hardware_concurrency())};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };

  report("adain-statistics", adain_statistics);
  report("kernel-oracles", kernel_oracles);
  report("tcps-oracle", tcps_oracle);
  report("sampler-statistics", sampler_statistics);
  report("manifest-determinism", manifest_determinism);
  report("miou-oracle", miou_oracle);
  report("weight-archive-round-trip", archive_round_trip);

  const WeightArchive weights = make_random_archive(5);
  const StyleTransfer engine(weights);
  const Image content = testdata::noise_image(1052, 1052, 1);
  const Image style = testdata::noise_image(512, 512, 2);
  // The geometry run doubles as warm-up for the timed run.
  report("geometry", [&] { return geometry(engine, content, style); });
  report("performance", [&] {
    const Outcome single = single_stylization(engine, content, style);
    const Outcome parallel = parallel_throughput(engine);
    return Outcome{single.pass && parallel.pass, single.detail + "; " + parallel.detail};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
