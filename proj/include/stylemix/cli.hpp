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

// `stylemix` command line. Exit codes: 0 success, 1 validation error,
// 2 runtime failure.

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stylemix/stylemix.hpp"

namespace stylemix::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string log_level = "info";
};

namespace detail {

inline LogLevel parse_log_level(const std::string& s) {
  if (s == "quiet") return LogLevel::Quiet;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  throw ValidationError("unknown log level '" + s + "' (quiet|info|debug)");
}

inline RunConfiguration resolve_config(const GlobalOptions& g) {
  RunConfiguration cfg = g.config.empty() ? RunConfiguration{} : load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  cfg.sync();
  return cfg;
}

inline void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw ValidationError(std::string(what) + " not found: " + p.string());
}

inline std::ofstream open_output(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + p.string());
  return out;
}

inline int cmd_score(const GlobalOptions& g, const RunConfiguration& cfg, const Logger& log,
                     const fs::path& input, const fs::path& output) {
  const auto files = list_images(input);
  std::vector<StyleRecord> records(files.size());
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), g.workers, [&](std::size_t i) {
    try {
      const Image img = load_image(files[i]);
      records[i] = {files[i].stem().string(), files[i], img.width, img.height, complexity(img, cfg.tcps)};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  std::vector<StyleRecord> scored;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (errors[i].empty()) {
      scored.push_back(std::move(records[i]));
    } else {
      ++failed;
      log.info("score.skipped").kv("path", files[i].string()).kv("error", errors[i]);
    }
  }
  write_scores_file(output, scored);
  std::size_t bins[3] = {0, 0, 0};
  for (const auto& r : scored) ++bins[static_cast<int>(r.score->bin)];
  log.info("score.done")
      .kv("scored", scored.size())
      .kv("failed", failed)
      .kv("low", bins[0])
      .kv("medium", bins[1])
      .kv("high", bins[2]);
  return kExitOk;
}

inline std::vector<std::string> read_sample_lines(const AugmentationManifest& m, const fs::path& root,
                                                  const SamplerConfig& sc, std::uint64_t epochs) {
  const Sampler sampler(m, sc);
  std::vector<std::string> lines;
  lines.reserve(epochs * sampler.epoch_length());
  for (std::uint64_t e = 0; e < epochs; ++e)
    for (std::size_t p = 0; p < sampler.epoch_length(); ++p) {
      const SampleItem item = sampler.at(e, p);
      const ManifestEntry& entry = m.entries[item.entry];
      const std::string& rel = item.variant ? entry.stylized[*item.variant].path : entry.original;
      std::string line = (root / rel).string() + "\t" +
                         (entry.label.empty() ? std::string("-") : (root / entry.label).string()) + "\t" +
                         std::to_string(item.transform_seed);
      lines.push_back(std::move(line));
    }
  return lines;
}

}  // namespace detail

/// Parses argv and runs one subcommand. Output streams are injectable for tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"stylemix: style-transfer dataset augmentation toolkit"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--seed", g.seed, "global seed (overrides the config)");
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "quiet|info|debug");

  fs::path score_in, score_out;
  auto* score = app.add_subcommand("score", "texture-complexity scores for a directory of images");
  score->add_option("--input", score_in, "image directory")->required();
  score->add_option("--output", score_out, "scores file to write")->required();

  fs::path pool_out, pool_scores, pool_dir;
  std::optional<std::size_t> pool_size;
  std::string pool_source, pool_filter;
  auto* pool = app.add_subcommand("pool", "admit, filter and sample the style pool");
  pool->add_option("--output", pool_out, "pool listing to write")->required();
  pool->add_option("--source", pool_source, "artistic|intra|external");
  pool->add_option("--dir", pool_dir, "directory for the chosen source");
  pool->add_option("--size", pool_size, "number of styles");
  pool->add_option("--filter", pool_filter, "keep one complexity bin: low|medium|high");
  pool->add_option("--scores", pool_scores, "precomputed scores file");

  fs::path st_weights, st_pool, st_out, st_content, st_labels;
  std::optional<std::size_t> st_n;
  auto* stylize = app.add_subcommand("stylize", "build the N-times stylized dataset and manifest");
  stylize->add_option("--weights", st_weights, "SMDW weight archive")->required();
  stylize->add_option("--output", st_out, "output directory")->required();
  stylize->add_option("--pool", st_pool, "pool listing (built from the config when omitted)");
  stylize->add_option("--content-dir", st_content, "content images");
  stylize->add_option("--label-dir", st_labels, "label images");
  stylize->add_option("-n,--variants", st_n, "stylized variants per image");

  fs::path sm_manifest, sm_out;
  std::uint64_t sm_epochs = 1;
  auto* sample = app.add_subcommand("sample", "epoch item lists from a manifest");
  sample->add_option("--manifest", sm_manifest, "manifest.json")->required();
  sample->add_option("--epochs", sm_epochs, "number of epochs")->check(CLI::PositiveNumber);
  sample->add_option("--output", sm_out, "item list to write (stdout when omitted)");

  fs::path dp_in, dp_out;
  std::size_t dp_count = 8;
  auto* preview = app.add_subcommand("distort-preview", "photometric distortion and blur examples");
  preview->add_option("--input", dp_in, "image")->required();
  preview->add_option("--output", dp_out, "output directory")->required();
  preview->add_option("--count", dp_count, "examples to write")->check(CLI::PositiveNumber);

  fs::path ev_pred, ev_gt, ev_json;
  std::string ev_map = "cityscapes";
  auto* eval = app.add_subcommand("eval", "per-class IoU and mIoU of prediction label maps");
  eval->add_option("--pred", ev_pred, "prediction directory (19-class train ids)")->required();
  eval->add_option("--gt", ev_gt, "ground-truth directory (native ids)")->required();
  eval->add_option("--label-map", ev_map, "built-in map name or map file");
  eval->add_option("--json", ev_json, "machine-readable report to write");

  fs::path wi_path;
  auto* winfo = app.add_subcommand("weights-info", "archive inventory and CRC check");
  winfo->add_option("weights", wi_path, "SMDW archive")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    const Logger log(detail::parse_log_level(g.log_level), &err);
    RunConfiguration cfg = detail::resolve_config(g);

    if (*score) return detail::cmd_score(g, cfg, log, score_in, score_out);

    if (*pool) {
      if (!pool_source.empty()) cfg.pipeline.style_source = parse_style_source(pool_source);
      if (!pool_dir.empty()) {
        switch (cfg.pipeline.style_source) {
          case StyleSource::Artistic: cfg.pipeline.style_dir = pool_dir; break;
          case StyleSource::Intra: cfg.pipeline.content_dir = pool_dir; break;
          case StyleSource::External: cfg.pipeline.external_dir = pool_dir; break;
        }
      }
      if (pool_size) cfg.pipeline.style_pool_size = *pool_size;
      if (!pool_filter.empty()) cfg.pipeline.tcps_filter = parse_bin(pool_filter);
      std::vector<StyleRecord> scores;
      PoolOptions opts{g.workers, &log, nullptr, cfg.tcps};
      if (!pool_scores.empty()) {
        scores = read_scores_file(pool_scores, cfg.tcps);
        opts.scores = &scores;
      }
      const auto records = build_pool(cfg.pipeline, opts);
      if (pool_out.has_parent_path()) fs::create_directories(pool_out.parent_path());
      write_pool_file(pool_out, records);
      log.info("pool.done").kv("records", records.size()).kv("output", pool_out.string());
      return kExitOk;
    }

    if (*stylize) {
      detail::require_file(st_weights, "weight archive");
      if (!st_content.empty()) cfg.pipeline.content_dir = st_content;
      if (!st_labels.empty()) cfg.pipeline.label_dir = st_labels;
      if (st_n) cfg.pipeline.n_variants = *st_n;
      if (cfg.pipeline.style_pool_size < cfg.pipeline.n_variants && !st_pool.empty())
        cfg.pipeline.style_pool_size = cfg.pipeline.n_variants;
      cfg.validate();
      std::vector<StyleRecord> records;
      if (!st_pool.empty()) {
        detail::require_file(st_pool, "pool listing");
        records = read_pool_file(st_pool);
      } else {
        records = build_pool(cfg.pipeline, PoolOptions{g.workers, &log, nullptr, cfg.tcps});
        fs::create_directories(st_out);
        write_pool_file(st_out / "pool.tsv", records);
      }
      const WeightArchive weights = WeightArchive::load(st_weights);
      const auto manifest =
          augment_dataset(cfg.pipeline, cfg.stylize, records, weights, AugmentOptions{st_out, g.workers, &log});
      out << (st_out / "manifest.json").string() << "\t" << manifest.entries.size() << " images\t"
          << manifest.stylized_count() << " stylized\n";
      return kExitOk;
    }

    if (*sample) {
      const AugmentationManifest m = read_manifest(sm_manifest);
      const auto lines =
          detail::read_sample_lines(m, sm_manifest.parent_path(), cfg.sampler, sm_epochs);
      if (sm_out.empty()) {
        for (const auto& l : lines) out << l << '\n';
      } else {
        auto o = detail::open_output(sm_out);
        for (const auto& l : lines) o << l << '\n';
      }
      log.info("sample.done").kv("items", lines.size()).kv("epochs", sm_epochs);
      return kExitOk;
    }

    if (*preview) {
      detail::require_file(dp_in, "input image");
      const Image img = load_image(dp_in);
      fs::create_directories(dp_out);
      const std::string stem = dp_in.stem().string();
      save_png(dp_out / (stem + "_original.png"), img);
      const LabelImage no_label(img.width, img.height, 1);
      for (std::size_t k = 0; k < dp_count; ++k) {
        const std::uint64_t s = derive_seed(cfg.seed, "preview", static_cast<std::uint64_t>(k));
        char name[64];
        std::snprintf(name, sizeof(name), "_pmd_%02zu.png", k);
        save_png(dp_out / (stem + name), photometric_distortion(img, cfg.pmd, s));
        const TransformParams t = draw_transform(s, cfg.blur_mirror, cfg.pmd);
        std::snprintf(name, sizeof(name), "_chain_%02zu.png", k);
        save_png(dp_out / (stem + name), apply_transform(img, no_label, t).first);
        log.debug("preview.example")
            .kv("index", k)
            .kv("seed", s)
            .kv("mirror", t.mirror)
            .kv("blur", t.blur_radius.value_or(0.0));
      }
      log.info("preview.done").kv("examples", dp_count).kv("output", dp_out.string());
      return kExitOk;
    }

    if (*eval) {
      const LabelMap map = LabelMap::resolve(ev_map);
      const auto preds = list_images(ev_pred);
      if (preds.empty()) throw ValidationError("no prediction images in " + ev_pred.string());
      std::vector<fs::path> gts(preds.size());
      for (std::size_t i = 0; i < preds.size(); ++i) {
        gts[i] = ev_gt / preds[i].filename();
        if (!fs::exists(gts[i])) throw ValidationError("no ground truth for " + preds[i].filename().string());
      }
      std::vector<ConfusionMatrix> parts(preds.size());
      parallel_for(preds.size(), g.workers, [&](std::size_t i) {
        accumulate(parts[i], remap(load_labels(gts[i]), map), load_labels(preds[i]));
      });
      ConfusionMatrix conf;
      for (const auto& p : parts) conf.merge(p);
      const IouResult r = miou(conf);
      out << format_report_text(r, map.name());
      if (!ev_json.empty()) {
        auto o = detail::open_output(ev_json);
        o << report_json(r, conf, map.name()).dump(2) << '\n';
      }
      return kExitOk;
    }

    if (*winfo) {
      detail::require_file(wi_path, "weight archive");
      const WeightArchive w = WeightArchive::load(wi_path);
      const auto bytes = read_file_bytes(wi_path);
      std::size_t params = 0;
      for (const auto& [name, a] : w.entries()) {
        out << name << "\t[";
        for (std::size_t i = 0; i < a.dims.size(); ++i) out << (i ? "," : "") << a.dims[i];
        out << "]\n";
        params += a.values.size();
      }
      std::size_t missing = 0;
      for (const auto* d : {&encoder_description(), &decoder_description()})
        for (const LayerOp* op : d->convs()) try {
            (void)w.conv(op->name, op->in_channels, op->out_channels, op->kernel);
          } catch (const ValidationError&) {
            ++missing;
            out << "missing-or-mismatched\t" << op->name << "\n";
          }
      char crc[16];
      std::snprintf(crc, sizeof(crc), "%08x", crc32_of(bytes.data(), bytes.size() - 4));
      out << "tensors\t" << w.size() << "\nparameters\t" << params << "\ncrc32\t" << crc
          << "\ncrc_ok\tyes\nnetwork_complete\t" << (missing == 0 ? "yes" : "no") << "\n";
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const RuntimeFailure& e) {
    err << "failure: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace stylemix::cli
