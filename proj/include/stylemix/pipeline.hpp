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

// Offline dataset construction: content patches, style pool, N stylized
// variants per patch, and the augmentation manifest.

#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stylemix/adain.hpp"
#include "stylemix/common.hpp"
#include "stylemix/image.hpp"
#include "stylemix/image_io.hpp"
#include "stylemix/parallel.hpp"
#include "stylemix/tcps.hpp"
#include "stylemix/weights.hpp"

namespace stylemix {

enum class StyleSource { Artistic, Intra, External };

inline const char* to_string(StyleSource s) {
  switch (s) {
    case StyleSource::Artistic: return "artistic";
    case StyleSource::Intra: return "intra";
    case StyleSource::External: return "external";
  }
  return "?";
}

inline StyleSource parse_style_source(std::string_view s) {
  if (s == "artistic") return StyleSource::Artistic;
  if (s == "intra") return StyleSource::Intra;
  if (s == "external") return StyleSource::External;
  throw ValidationError("unknown style_source '" + std::string(s) +
                        "' (artistic|intra|external)");
}

struct PipelineConfig {
  std::size_t n_variants = 3;
  std::size_t style_pool_size = 10000;
  StyleSource style_source = StyleSource::Artistic;
  fs::path style_dir;     // artistic styles
  fs::path external_dir;  // target-domain styles
  fs::path content_dir;
  fs::path label_dir;  // optional; labels share the content file stem, .png
  std::uint64_t seed = 0;
  std::size_t content_patch = 1052;
  std::size_t resize_to = 640;
  std::size_t style_min_side = 512;
  std::size_t style_size = 512;
  std::optional<ComplexityBin> tcps_filter;
  double max_failure_fraction = 0.05;
  double p_aug = 0.8;

  void validate() const {
    if (n_variants < 1) throw ValidationError("pipeline.n_variants must be >= 1");
    if (style_pool_size < n_variants)
      throw ValidationError("pipeline.style_pool_size must be >= n_variants");
    if (content_patch < 8) throw ValidationError("pipeline.content_patch must be >= 8");
    if (resize_to < 1) throw ValidationError("pipeline.resize_to must be >= 1");
    if (style_size < 8) throw ValidationError("pipeline.style_size must be >= 8");
    if (style_min_side < 1) throw ValidationError("pipeline.style_min_side must be >= 1");
    if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0))
      throw ValidationError("pipeline.max_failure_fraction must lie in [0, 1]");
    if (!(p_aug >= 0.0 && p_aug <= 1.0)) throw ValidationError("p_aug must lie in [0, 1]");
  }

  const fs::path& style_source_dir() const {
    switch (style_source) {
      case StyleSource::Artistic: return style_dir;
      case StyleSource::Intra: return content_dir;
      case StyleSource::External: return external_dir;
    }
    return style_dir;
  }
};

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// Center square crop of side min(w, h), bilinear resize to `size`.
inline Image prepare_style(const Image& image, std::size_t min_side = 512, std::size_t size = 512) {
  if (image.width < min_side || image.height < min_side)
    throw ValidationError("style image " + std::to_string(image.width) + "x" +
                          std::to_string(image.height) + " is smaller than " +
                          std::to_string(min_side) + " on a side");
  return resize_bilinear(crop(image, center_square(image.width, image.height)), size, size);
}

struct PatchLayout {
  std::vector<Rect> patches;
  std::size_t overlap = 0;  // horizontal overlap between the two patches
};

/// Two side×side patches at the left and right edges (vertically centred),
/// or a single patch when the image is exactly `side` wide.
inline PatchLayout content_patches(std::size_t width, std::size_t height, std::size_t side = 1052) {
  if (width < side || height < side)
    throw ValidationError("content image " + std::to_string(width) + "x" + std::to_string(height) +
                          " is smaller than the " + std::to_string(side) + " patch");
  const std::size_t y = (height - side) / 2;
  PatchLayout layout;
  layout.patches.push_back({0, y, side, side});
  if (width > side) layout.patches.push_back({width - side, y, side, side});
  layout.overlap = 2 * side > width ? 2 * side - width : 0;
  return layout;
}

// ---------------------------------------------------------------------------
// Style pool
// ---------------------------------------------------------------------------

/// Pool listing: id, path, width, height, score|-, bin|-  (tab separated)
inline void write_pool_file(const fs::path& path, const std::vector<StyleRecord>& pool) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  for (const auto& r : pool) {
    out << r.id << '\t' << r.path.string() << '\t' << r.width << '\t' << r.height << '\t';
    if (r.score) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", r.score->score);
      out << buf << '\t' << to_string(r.score->bin);
    } else {
      out << "-\t-";
    }
    out << '\n';
  }
}

inline std::vector<StyleRecord> read_pool_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open pool file " + path.string());
  std::vector<StyleRecord> pool;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string part; std::getline(ss, part, '\t');) f.push_back(part);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (f.size() != 6) throw ValidationError(where + ": expected 6 fields");
    StyleRecord r;
    r.id = f[0];
    r.path = f[1];
    try {
      r.width = std::stoul(f[2]);
      r.height = std::stoul(f[3]);
      if (f[4] != "-") r.score = ComplexityScore{std::stod(f[4]), parse_bin(f[5])};
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw ValidationError(where + ": malformed record");
    }
    pool.push_back(std::move(r));
  }
  return pool;
}

struct PoolOptions {
  std::size_t workers = 1;
  const Logger* logger = nullptr;
  // Precomputed scores, matched by record id; missing ones are computed.
  const std::vector<StyleRecord>* scores = nullptr;
  TcpsConfig tcps;
};

/// Admits images whose sides are all >= style_min_side, optionally keeps one
/// complexity bin, then samples style_pool_size records without replacement.
inline std::vector<StyleRecord> build_pool(const PipelineConfig& cfg, const PoolOptions& opts = {}) {
  cfg.validate();
  const fs::path& dir = cfg.style_source_dir();
  if (dir.empty())
    throw ValidationError(std::string("no directory configured for style source '") +
                          to_string(cfg.style_source) + "'");
  const auto files = list_images(dir);

  std::map<std::string, ComplexityScore> known;
  if (opts.scores)
    for (const auto& r : *opts.scores)
      if (r.score) known.emplace(r.id, *r.score);

  std::vector<std::optional<StyleRecord>> admitted(files.size());
  std::vector<char> unreadable(files.size(), 0);
  parallel_for(files.size(), opts.workers, [&](std::size_t i) {
    Image img;
    try {
      img = load_image(files[i]);
    } catch (const RuntimeFailure&) {
      unreadable[i] = 1;
      return;
    }
    if (std::min(img.width, img.height) < cfg.style_min_side) return;
    StyleRecord r{files[i].stem().string(), files[i], img.width, img.height, std::nullopt};
    if (auto it = known.find(r.id); it != known.end())
      r.score = it->second;
    else if (cfg.tcps_filter)
      r.score = complexity(img, opts.tcps);
    if (cfg.tcps_filter && r.score->bin != *cfg.tcps_filter) return;
    admitted[i] = std::move(r);
  });

  std::vector<StyleRecord> candidates;
  for (auto& r : admitted)
    if (r) candidates.push_back(std::move(*r));
  const auto skipped = std::count(unreadable.begin(), unreadable.end(), 1);
  if (opts.logger)
    opts.logger->info("pool.admit")
        .kv("source", to_string(cfg.style_source))
        .kv("files", files.size())
        .kv("admitted", candidates.size())
        .kv("unreadable", skipped);
  if (candidates.size() < cfg.style_pool_size)
    throw ValidationError("only " + std::to_string(candidates.size()) +
                          " admissible style images, pool needs " +
                          std::to_string(cfg.style_pool_size));

  auto picked = sample_without_replacement(candidates.size(), cfg.style_pool_size,
                                           derive_seed(cfg.seed, "style-pool"));
  std::sort(picked.begin(), picked.end());
  std::vector<StyleRecord> pool;
  pool.reserve(picked.size());
  for (std::size_t i : picked) pool.push_back(std::move(candidates[i]));
  return pool;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct StylizedEntry {
  std::string path;  // relative to the manifest directory
  std::string style_id;
  std::uint64_t seed = 0;
  std::string digest;  // CRC32 of the written PNG
  friend bool operator==(const StylizedEntry&, const StylizedEntry&) = default;
};

struct ManifestEntry {
  std::string image_id;
  std::string source;    // content image the patch was cut from
  std::string original;  // relative to the manifest directory
  std::string label;     // relative; empty when no labels were configured
  std::vector<StylizedEntry> stylized;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct AugmentationManifest {
  std::uint64_t seed = 0;
  std::string config_digest;
  double p_aug = 0.8;
  std::size_t n_variants = 0;
  std::vector<ManifestEntry> entries;
  std::vector<std::string> failed;  // image ids dropped because a job failed

  std::size_t stylized_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.stylized.size();
    return n;
  }
  friend bool operator==(const AugmentationManifest&, const AugmentationManifest&) = default;
};

inline nlohmann::ordered_json to_json(const AugmentationManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = "stylemix-manifest/1";
  j["seed"] = m.seed;
  j["config_digest"] = m.config_digest;
  j["p_aug"] = m.p_aug;
  j["n_variants"] = m.n_variants;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : m.entries) {
    nlohmann::ordered_json je;
    je["image_id"] = e.image_id;
    je["source"] = e.source;
    je["original"] = e.original;
    je["label"] = e.label;
    je["stylized"] = nlohmann::ordered_json::array();
    for (const auto& s : e.stylized)
      je["stylized"].push_back(
          {{"path", s.path}, {"style_id", s.style_id}, {"seed", s.seed}, {"digest", s.digest}});
    j["entries"].push_back(std::move(je));
  }
  j["failed"] = m.failed;
  return j;
}

inline AugmentationManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "stylemix-manifest/1")
      throw ValidationError("unsupported manifest format");
    AugmentationManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.p_aug = j.at("p_aug").get<double>();
    m.n_variants = j.at("n_variants").get<std::size_t>();
    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.image_id = je.at("image_id").get<std::string>();
      e.source = je.at("source").get<std::string>();
      e.original = je.at("original").get<std::string>();
      e.label = je.at("label").get<std::string>();
      for (const auto& js : je.at("stylized"))
        e.stylized.push_back({js.at("path").get<std::string>(), js.at("style_id").get<std::string>(),
                              js.at("seed").get<std::uint64_t>(), js.at("digest").get<std::string>()});
      m.entries.push_back(std::move(e));
    }
    if (j.contains("failed")) m.failed = j.at("failed").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
}

inline std::string manifest_text(const AugmentationManifest& m) { return to_json(m).dump(2) + "\n"; }

inline void write_manifest(const fs::path& path, const AugmentationManifest& m) {
  const std::string text = manifest_text(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << text;
}

inline AugmentationManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  return manifest_from_json(j);
}

// ---------------------------------------------------------------------------
// Augmentation
// ---------------------------------------------------------------------------

/// Everything that determines the content of the augmented dataset.
inline std::string pipeline_digest(const PipelineConfig& cfg, const StylizeConfig& st,
                                   const std::vector<StyleRecord>& pool,
                                   std::uint32_t weights_crc) {
  nlohmann::ordered_json j;
  j["n_variants"] = cfg.n_variants;
  j["content_patch"] = cfg.content_patch;
  j["resize_to"] = cfg.resize_to;
  j["style_size"] = cfg.style_size;
  j["seed"] = cfg.seed;
  j["alpha"] = st.alpha;
  j["epsilon_std"] = st.epsilon_std;
  j["weights_crc"] = weights_crc;
  auto& styles = j["pool"] = nlohmann::ordered_json::array();
  for (const auto& r : pool) styles.push_back({r.id, r.path.string()});
  return hex64(fnv1a64(j.dump()));
}

/// n distinct pool indices for one image; a pure function of (seed, image id).
inline std::vector<std::size_t> choose_styles(std::uint64_t seed, std::string_view image_id,
                                              std::size_t n, std::size_t pool_size) {
  if (n > pool_size) throw ValidationError("more variants than styles in the pool");
  Rng rng(derive_seed(seed, "styles", image_id));
  std::vector<std::size_t> out;
  while (out.size() < n) {
    const std::size_t i = rng.below(pool_size);
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  }
  return out;
}

inline std::uint64_t variant_seed(std::uint64_t seed, std::string_view image_id,
                                  std::size_t variant) {
  return derive_seed(seed, image_id, static_cast<std::uint64_t>(variant));
}

struct AugmentOptions {
  fs::path output_dir;
  std::size_t workers = 1;
  const Logger* logger = nullptr;
};

namespace detail {

struct PatchJob {
  std::string id;
  fs::path source;
  Rect rect;
  std::string original;
  std::string label;
};

inline std::string file_digest(const fs::path& p) {
  const auto bytes = read_file_bytes(p);
  return hex64(crc32_of(bytes.data(), bytes.size())).substr(8);
}

}  // namespace detail

/// Builds the N-times augmented dataset under opts.output_dir and writes
/// manifest.json there. Reruns with an identical configuration reuse
/// existing outputs whose digests still match.
inline AugmentationManifest augment_dataset(const PipelineConfig& cfg, const StylizeConfig& st,
                                            const std::vector<StyleRecord>& pool,
                                            const WeightArchive& weights,
                                            const AugmentOptions& opts) {
  cfg.validate();
  st.validate();
  if (pool.size() < cfg.n_variants)
    throw ValidationError("style pool has " + std::to_string(pool.size()) +
                          " records, need at least n_variants = " + std::to_string(cfg.n_variants));
  if (cfg.content_dir.empty()) throw ValidationError("pipeline.content_dir is not set");
  if (opts.output_dir.empty()) throw ValidationError("no output directory given");
  const fs::path out_dir = opts.output_dir;
  fs::create_directories(out_dir / "original");
  fs::create_directories(out_dir / "stylized");
  if (!cfg.label_dir.empty()) fs::create_directories(out_dir / "label");
  const Logger quiet(LogLevel::Quiet);
  const Logger& log = opts.logger ? *opts.logger : quiet;

  const auto serialized = weights.serialize();
  const std::uint32_t weights_crc = crc32_of(serialized.data(), serialized.size());
  const std::string digest = pipeline_digest(cfg, st, pool, weights_crc);

  // Previous run, for resumption.
  std::map<std::string, StylizedEntry> previous;
  if (fs::exists(out_dir / "manifest.json")) {
    try {
      const auto old = read_manifest(out_dir / "manifest.json");
      if (old.config_digest == digest)
        for (const auto& e : old.entries)
          for (const auto& s : e.stylized) previous.emplace(s.path, s);
    } catch (const ValidationError&) {
      log.info("augment.resume_skipped").kv("reason", "unreadable previous manifest");
    }
  }

  // Stage 1: cut, resize and write the original patches (and labels).
  const auto sources = list_images(cfg.content_dir);
  std::vector<std::vector<detail::PatchJob>> per_source(sources.size());
  std::vector<std::string> source_errors(sources.size());
  parallel_for(sources.size(), opts.workers, [&](std::size_t i) {
    try {
      const Image img = load_image(sources[i]);
      std::optional<LabelImage> labels;
      if (!cfg.label_dir.empty()) {
        const fs::path lp = cfg.label_dir / (sources[i].stem().string() + ".png");
        if (!fs::exists(lp)) throw ValidationError("missing label " + lp.string());
        labels = load_labels(lp);
        if (labels->width != img.width || labels->height != img.height)
          throw ValidationError("label size differs from image: " + lp.string());
      }
      const auto layout = content_patches(img.width, img.height, cfg.content_patch);
      const std::string stem = sources[i].stem().string();
      for (std::size_t p = 0; p < layout.patches.size(); ++p) {
        detail::PatchJob job;
        job.id = layout.patches.size() == 1 ? stem : stem + "_p" + std::to_string(p);
        job.source = sources[i];
        job.rect = layout.patches[p];
        job.original = "original/" + job.id + ".png";
        save_png(out_dir / job.original,
                 resize_bilinear(crop(img, job.rect), cfg.resize_to, cfg.resize_to));
        if (labels) {
          job.label = "label/" + job.id + ".png";
          save_labels(out_dir / job.label,
                      resize_nearest(crop(*labels, job.rect), cfg.resize_to, cfg.resize_to));
        }
        per_source[i].push_back(std::move(job));
      }
    } catch (const std::exception& e) {
      source_errors[i] = e.what();
    }
  });

  std::vector<detail::PatchJob> patches;
  std::vector<std::string> failed;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (!source_errors[i].empty()) {
      log.info("augment.source_failed").kv("source", sources[i].string()).kv("error", source_errors[i]);
      failed.push_back(sources[i].stem().string());
      continue;
    }
    for (auto& p : per_source[i]) patches.push_back(std::move(p));
  }

  // Stage 2: (patch, variant) stylization jobs.
  struct VariantResult {
    StylizedEntry entry;
    std::string error;
    bool reused = false;
  };
  const std::size_t n = cfg.n_variants;
  std::vector<std::vector<std::size_t>> styles(patches.size());
  for (std::size_t p = 0; p < patches.size(); ++p)
    styles[p] = choose_styles(cfg.seed, patches[p].id, n, pool.size());

  std::vector<VariantResult> results(patches.size() * n);
  const StyleTransfer engine(weights);
  std::atomic<std::size_t> done{0}, job_failures{0};
  const std::size_t total = results.size();
  const std::size_t report_every = std::max<std::size_t>(1, total / 20);

  parallel_for(total, opts.workers, [&](std::size_t j) {
    const std::size_t p = j / n, v = j % n;
    const auto& patch = patches[p];
    const StyleRecord& style = pool[styles[p][v]];
    VariantResult& res = results[j];
    res.entry.path = "stylized/" + patch.id + "_v" + std::to_string(v) + ".png";
    res.entry.style_id = style.id;
    res.entry.seed = variant_seed(cfg.seed, patch.id, v);
    const fs::path out_path = out_dir / res.entry.path;
    try {
      if (auto it = previous.find(res.entry.path);
          it != previous.end() && it->second.style_id == res.entry.style_id &&
          it->second.seed == res.entry.seed && fs::exists(out_path) &&
          detail::file_digest(out_path) == it->second.digest) {
        res.entry.digest = it->second.digest;
        res.reused = true;
      } else {
        const Image content = crop(load_image(patch.source), patch.rect);
        const Image prepared = prepare_style(load_image(style.path), cfg.style_min_side, cfg.style_size);
        const Image stylized = engine.stylize(content, prepared, st);
        save_png(out_path, resize_bilinear(stylized, cfg.resize_to, cfg.resize_to));
        res.entry.digest = detail::file_digest(out_path);
      }
    } catch (const std::exception& e) {
      res.error = e.what();
      ++job_failures;
    }
    const std::size_t d = ++done;
    if (d % report_every == 0 || d == total)
      log.info("augment.progress").kv("done", d).kv("total", total).kv("failed", job_failures.load());
  });

  // Single writer: assemble in patch order.
  AugmentationManifest manifest;
  manifest.seed = cfg.seed;
  manifest.config_digest = digest;
  manifest.p_aug = cfg.p_aug;
  manifest.n_variants = n;
  std::size_t reused = 0;
  for (std::size_t p = 0; p < patches.size(); ++p) {
    ManifestEntry e{patches[p].id, patches[p].source.filename().string(), patches[p].original,
                    patches[p].label, {}};
    bool ok = true;
    for (std::size_t v = 0; v < n; ++v) {
      const auto& r = results[p * n + v];
      if (!r.error.empty()) {
        log.info("augment.job_failed").kv("image", patches[p].id).kv("variant", v).kv("error", r.error);
        ok = false;
        continue;
      }
      reused += r.reused ? 1 : 0;
      e.stylized.push_back(r.entry);
    }
    if (ok)
      manifest.entries.push_back(std::move(e));
    else
      failed.push_back(patches[p].id);
  }
  manifest.failed = failed;

  const std::size_t attempted = patches.size() + std::count_if(source_errors.begin(), source_errors.end(),
                                                               [](const auto& s) { return !s.empty(); });
  log.info("augment.done")
      .kv("images", manifest.entries.size())
      .kv("stylized", manifest.stylized_count())
      .kv("reused", reused)
      .kv("failed", failed.size());
  write_manifest(out_dir / "manifest.json", manifest);
  if (attempted > 0 &&
      static_cast<double>(failed.size()) / static_cast<double>(attempted) > cfg.max_failure_fraction)
    throw RuntimeFailure(std::to_string(failed.size()) + " of " + std::to_string(attempted) +
                         " images failed, above max_failure_fraction");
  return manifest;
}

}  // namespace stylemix
