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

// JSON run configuration. Every key is optional; unknown keys and type or
// range errors are rejected before any work starts.
//
//   {
//     "seed": 0,
//     "pipeline":    { "n_variants": 3, "style_pool_size": 10000, ... },
//     "stylize":     { "alpha": 1.0, "epsilon_std": 1e-5 },
//     "sampler":     { "p_aug": 0.8 },
//     "pmd":         { "brightness_delta": 32, ... },
//     "blur_mirror": { "mirror_p": 0.5, ... },
//     "tcps":        { "epsilon": 20, ... }
//   }

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stylemix/adain.hpp"
#include "stylemix/augment.hpp"
#include "stylemix/common.hpp"
#include "stylemix/pipeline.hpp"
#include "stylemix/tcps.hpp"

namespace stylemix {

struct RunConfiguration {
  std::uint64_t seed = 0;
  PipelineConfig pipeline;
  StylizeConfig stylize;
  SamplerConfig sampler;
  PmdConfig pmd;
  BlurMirrorConfig blur_mirror;
  TcpsConfig tcps;

  /// Propagates the global seed and p_aug into the sections that carry copies.
  void sync() {
    pipeline.seed = seed;
    sampler.seed = seed;
    pipeline.p_aug = sampler.p_aug;
  }

  void validate() const {
    pipeline.validate();
    stylize.validate();
    sampler.validate();
    pmd.validate();
    blur_mirror.validate();
    tcps.validate();
  }
};

namespace detail {

using Json = nlohmann::json;

struct KeySpec {
  const char* type;  // for messages and the schema listing
  std::function<void(const Json&, RunConfiguration&)> set;
};

template <typename T>
T json_as(const Json& v, const std::string& key);

template <>
inline double json_as<double>(const Json& v, const std::string& key) {
  if (!v.is_number()) throw ValidationError("config: '" + key + "' must be a number");
  return v.get<double>();
}

template <>
inline std::uint64_t json_as<std::uint64_t>(const Json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  throw ValidationError("config: '" + key + "' must be a non-negative integer");
}

template <>
inline std::string json_as<std::string>(const Json& v, const std::string& key) {
  if (!v.is_string()) throw ValidationError("config: '" + key + "' must be a string");
  return v.get<std::string>();
}

template <typename T, typename Field>
KeySpec field(const char* type, Field RunConfiguration::*section, T Field::*member) {
  return {type, [section, member](const Json& v, RunConfiguration& c) {
            (c.*section).*member = json_as<T>(v, "");
          }};
}

inline std::size_t as_size(const Json& v, const std::string& key) {
  return static_cast<std::size_t>(json_as<std::uint64_t>(v, key));
}

using Table = std::map<std::string, std::map<std::string, KeySpec>>;

inline const Table& schema_table() {
  static const Table table = [] {
    Table t;
    auto& p = t["pipeline"];
    auto size_key = [](std::size_t PipelineConfig::*m) {
      return KeySpec{"integer", [m](const Json& v, RunConfiguration& c) { c.pipeline.*m = as_size(v, ""); }};
    };
    auto path_key = [](fs::path PipelineConfig::*m) {
      return KeySpec{"string", [m](const Json& v, RunConfiguration& c) {
                       c.pipeline.*m = json_as<std::string>(v, "");
                     }};
    };
    p["n_variants"] = size_key(&PipelineConfig::n_variants);
    p["style_pool_size"] = size_key(&PipelineConfig::style_pool_size);
    p["content_patch"] = size_key(&PipelineConfig::content_patch);
    p["resize_to"] = size_key(&PipelineConfig::resize_to);
    p["style_min_side"] = size_key(&PipelineConfig::style_min_side);
    p["style_size"] = size_key(&PipelineConfig::style_size);
    p["style_dir"] = path_key(&PipelineConfig::style_dir);
    p["external_dir"] = path_key(&PipelineConfig::external_dir);
    p["content_dir"] = path_key(&PipelineConfig::content_dir);
    p["label_dir"] = path_key(&PipelineConfig::label_dir);
    p["style_source"] = {"\"artistic\"|\"intra\"|\"external\"", [](const Json& v, RunConfiguration& c) {
                           c.pipeline.style_source = parse_style_source(json_as<std::string>(v, ""));
                         }};
    p["tcps_filter"] = {"null|\"low\"|\"medium\"|\"high\"", [](const Json& v, RunConfiguration& c) {
                          if (v.is_null())
                            c.pipeline.tcps_filter.reset();
                          else
                            c.pipeline.tcps_filter = parse_bin(json_as<std::string>(v, ""));
                        }};
    p["max_failure_fraction"] = field<double>("number", &RunConfiguration::pipeline,
                                              &PipelineConfig::max_failure_fraction);

    auto& s = t["stylize"];
    s["alpha"] = field<double>("number", &RunConfiguration::stylize, &StylizeConfig::alpha);
    s["epsilon_std"] = field<double>("number", &RunConfiguration::stylize, &StylizeConfig::epsilon_std);

    t["sampler"]["p_aug"] = field<double>("number", &RunConfiguration::sampler, &SamplerConfig::p_aug);

    auto& m = t["pmd"];
    m["brightness_delta"] = field<double>("number", &RunConfiguration::pmd, &PmdConfig::brightness_delta);
    m["contrast_lower"] = field<double>("number", &RunConfiguration::pmd, &PmdConfig::contrast_lower);
    m["contrast_upper"] = field<double>("number", &RunConfiguration::pmd, &PmdConfig::contrast_upper);
    m["saturation_lower"] = field<double>("number", &RunConfiguration::pmd, &PmdConfig::saturation_lower);
    m["saturation_upper"] = field<double>("number", &RunConfiguration::pmd, &PmdConfig::saturation_upper);
    m["hue_delta"] = field<double>("number", &RunConfiguration::pmd, &PmdConfig::hue_delta);
    m["apply_p"] = field<double>("number", &RunConfiguration::pmd, &PmdConfig::apply_p);

    auto& b = t["blur_mirror"];
    b["mirror_p"] = field<double>("number", &RunConfiguration::blur_mirror, &BlurMirrorConfig::mirror_p);
    b["blur_p"] = field<double>("number", &RunConfiguration::blur_mirror, &BlurMirrorConfig::blur_p);
    b["blur_radius_lower"] =
        field<double>("number", &RunConfiguration::blur_mirror, &BlurMirrorConfig::blur_radius_lower);
    b["blur_radius_upper"] =
        field<double>("number", &RunConfiguration::blur_mirror, &BlurMirrorConfig::blur_radius_upper);

    auto& c = t["tcps"];
    c["epsilon"] = field<double>("number", &RunConfiguration::tcps, &TcpsConfig::epsilon);
    c["eval_size"] = {"integer", [](const Json& v, RunConfiguration& r) { r.tcps.eval_size = as_size(v, ""); }};
    c["low_upper"] = field<double>("number", &RunConfiguration::tcps, &TcpsConfig::low_upper);
    c["medium_upper"] = field<double>("number", &RunConfiguration::tcps, &TcpsConfig::medium_upper);
    return t;
  }();
  return table;
}

}  // namespace detail

/// Human-readable listing of every accepted key and its type.
inline std::string config_schema_text() {
  std::string out = "seed: integer\n";
  for (const auto& [section, keys] : detail::schema_table())
    for (const auto& [key, spec] : keys) out += section + "." + key + ": " + spec.type + "\n";
  return out;
}

inline RunConfiguration parse_config(const nlohmann::json& j, RunConfiguration base = {}) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  const auto& table = detail::schema_table();
  for (const auto& [section, value] : j.items()) {
    if (section == "seed") {
      base.seed = detail::json_as<std::uint64_t>(value, "seed");
      continue;
    }
    const auto sec = table.find(section);
    if (sec == table.end()) throw ValidationError("config: unknown section '" + section + "'");
    if (!value.is_object()) throw ValidationError("config: section '" + section + "' must be an object");
    for (const auto& [key, v] : value.items()) {
      const auto spec = sec->second.find(key);
      if (spec == sec->second.end())
        throw ValidationError("config: unknown key '" + section + "." + key + "'");
      try {
        spec->second.set(v, base);
      } catch (const ValidationError& e) {
        throw ValidationError("config: '" + section + "." + key + "' expects " + spec->second.type +
                              " (" + e.what() + ")");
      }
    }
  }
  base.sync();
  base.validate();
  return base;
}

inline RunConfiguration load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  RunConfiguration cfg = parse_config(j);
  // Relative directories are taken relative to the config file.
  const fs::path base = path.parent_path();
  for (fs::path* p : {&cfg.pipeline.style_dir, &cfg.pipeline.external_dir, &cfg.pipeline.content_dir,
                      &cfg.pipeline.label_dir})
    if (!p->empty() && p->is_relative()) *p = base / *p;
  return cfg;
}

}  // namespace stylemix
