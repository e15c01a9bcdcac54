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

// 19-class label harmonization and IoU evaluation.

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stylemix/common.hpp"
#include "stylemix/image.hpp"

namespace stylemix {

inline constexpr std::size_t kNumClasses = 19;
inline constexpr std::uint16_t kIgnoreLabel = 255;

inline constexpr std::array<const char*, kNumClasses> kClassNames = {
    "road",       "sidewalk",      "building",     "wall",       "fence",
    "pole",       "traffic light", "traffic sign", "vegetation", "terrain",
    "sky",        "person",        "rider",        "car",        "truck",
    "bus",        "train",         "motorcycle",   "bicycle"};

class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  const std::map<std::uint32_t, std::uint16_t>& entries() const noexcept { return map_; }

  void set(std::uint32_t native, std::uint16_t harmonized) {
    if (harmonized >= kNumClasses && harmonized != kIgnoreLabel)
      throw ValidationError("label map '" + name_ + "': harmonized id " + std::to_string(harmonized) +
                            " is outside [0,18] and not 255");
    if (!map_.emplace(native, harmonized).second)
      throw ValidationError("label map '" + name_ + "': native id " + std::to_string(native) +
                            " mapped twice");
  }

  std::uint16_t operator()(std::uint32_t native) const {
    const auto it = map_.find(native);
    return it == map_.end() ? kIgnoreLabel : it->second;
  }

  static LabelMap identity(std::string name = "identity") {
    LabelMap m(std::move(name));
    for (std::uint16_t i = 0; i < kNumClasses; ++i) m.set(i, i);
    return m;
  }

  /// Cityscapes label ids to train ids. GTA V annotations share the id space.
  static LabelMap cityscapes(std::string name = "cityscapes") {
    LabelMap m(std::move(name));
    const std::pair<std::uint32_t, std::uint16_t> table[] = {
        {7, 0},   {8, 1},   {11, 2},  {12, 3},  {13, 4},  {17, 5},  {19, 6},
        {20, 7},  {21, 8},  {22, 9},  {23, 10}, {24, 11}, {25, 12}, {26, 13},
        {27, 14}, {28, 15}, {31, 16}, {32, 17}, {33, 18}};
    for (auto [n, h] : table) m.set(n, h);
    return m;
  }

  /// Built-in maps: cityscapes, gtav, bdd (already in train ids), identity.
  static LabelMap builtin(const std::string& name) {
    if (name == "cityscapes" || name == "gtav") return cityscapes(name);
    if (name == "bdd" || name == "bdd100k" || name == "identity") return identity(name);
    throw ValidationError("unknown built-in label map '" + name + "' (cityscapes|gtav|bdd|identity)");
  }

  /// Text format, one mapping per line: "native harmonized" or
  /// "native -> harmonized". '#' starts a comment. An optional
  /// "dataset: NAME" line names the map.
  static LabelMap parse(std::istream& in, std::string name = "custom") {
    LabelMap m(std::move(name));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string where = "label map line " + std::to_string(lineno);
      if (auto colon = line.find(':'); colon != std::string::npos) {
        std::string key = line.substr(0, colon), value = line.substr(colon + 1);
        auto trim = [](std::string s) {
          const auto b = s.find_first_not_of(" \t\r");
          const auto e = s.find_last_not_of(" \t\r");
          return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (trim(key) != "dataset") throw ValidationError(where + ": unknown key '" + trim(key) + "'");
        m.name_ = trim(value);
        continue;
      }
      if (auto arrow = line.find("->"); arrow != std::string::npos) line.replace(arrow, 2, " ");
      std::istringstream ss(line);
      long long native = -1, harmonized = -1;
      std::string extra;
      if (!(ss >> native >> harmonized) || (ss >> extra))
        throw ValidationError(where + ": expected 'native harmonized'");
      if (native < 0 || native > 65535) throw ValidationError(where + ": native id out of range");
      if (harmonized < 0 || harmonized > 65535) throw ValidationError(where + ": harmonized id out of range");
      m.set(static_cast<std::uint32_t>(native), static_cast<std::uint16_t>(harmonized));
    }
    return m;
  }

  static LabelMap load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open label map " + path.string());
    return parse(in, path.stem().string());
  }

  /// A built-in name or a path to a map file.
  static LabelMap resolve(const std::string& name_or_path) {
    if (std::filesystem::exists(name_or_path)) return load(name_or_path);
    return builtin(name_or_path);
  }

 private:
  std::string name_ = "custom";
  std::map<std::uint32_t, std::uint16_t> map_;
};

inline LabelImage remap(const LabelImage& labels, const LabelMap& map) {
  LabelImage out = labels;
  for (auto& v : out.data) v = map(v);
  return out;
}

class ConfusionMatrix {
 public:
  // rows = ground truth, columns = prediction
  std::uint64_t& operator()(std::size_t gt, std::size_t pred) { return counts_[gt * kNumClasses + pred]; }
  std::uint64_t operator()(std::size_t gt, std::size_t pred) const { return counts_[gt * kNumClasses + pred]; }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto v : counts_) t += v;
    return t;
  }

  ConfusionMatrix& merge(const ConfusionMatrix& other) {
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::array<std::uint64_t, kNumClasses * kNumClasses> counts_{};
};

/// Adds one (gt, pred) pair. Pixels with gt == IGNORE are skipped;
/// predictions must be valid class ids.
inline void accumulate(ConfusionMatrix& conf, const LabelImage& gt, const LabelImage& pred) {
  if (gt.width != pred.width || gt.height != pred.height || gt.channels != pred.channels)
    throw ValidationError("accumulate: ground truth is " + std::to_string(gt.width) + "x" +
                          std::to_string(gt.height) + ", prediction is " + std::to_string(pred.width) +
                          "x" + std::to_string(pred.height));
  ConfusionMatrix local;
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    const std::uint16_t g = gt.data[i];
    if (g == kIgnoreLabel) continue;
    if (g >= kNumClasses)
      throw ValidationError("accumulate: ground-truth id " + std::to_string(g) + " is not harmonized");
    const std::uint16_t p = pred.data[i];
    if (p >= kNumClasses)
      throw ValidationError("accumulate: prediction id " + std::to_string(p) + " outside [0,18]");
    ++local(g, p);
  }
  conf.merge(local);
}

struct IouResult {
  std::array<std::optional<double>, kNumClasses> per_class;  // empty: zero union
  double mean = 0.0;
  std::size_t classes_evaluated = 0;
};

inline IouResult miou(const ConfusionMatrix& conf) {
  if (conf.total() == 0) throw ValidationError("miou: no evaluated pixels");
  IouResult r;
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      row += conf(c, k);
      col += conf(k, c);
    }
    const std::uint64_t tp = conf(c, c);
    const std::uint64_t uni = row + col - tp;
    if (uni == 0) continue;
    r.per_class[c] = static_cast<double>(tp) / static_cast<double>(uni);
    sum += *r.per_class[c];
    ++r.classes_evaluated;
  }
  r.mean = sum / static_cast<double>(r.classes_evaluated);
  return r;
}

inline std::string format_report_text(const IouResult& r, const std::string& dataset = {}) {
  std::ostringstream out;
  if (!dataset.empty()) out << "dataset: " << dataset << '\n';
  char buf[64];
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (r.per_class[c])
      std::snprintf(buf, sizeof(buf), "%2zu  %-14s %7.2f\n", c, kClassNames[c], 100.0 * *r.per_class[c]);
    else
      std::snprintf(buf, sizeof(buf), "%2zu  %-14s %7s\n", c, kClassNames[c], "-");
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "mIoU %.2f over %zu classes\n", 100.0 * r.mean, r.classes_evaluated);
  out << buf;
  return out.str();
}

inline nlohmann::ordered_json report_json(const IouResult& r, const ConfusionMatrix& conf,
                                          const std::string& dataset = {}) {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  j["miou"] = r.mean;
  j["classes_evaluated"] = r.classes_evaluated;
  j["pixels"] = conf.total();
  auto& per = j["per_class"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    nlohmann::ordered_json e{{"id", c}, {"name", kClassNames[c]}};
    e["iou"] = r.per_class[c] ? nlohmann::ordered_json(*r.per_class[c]) : nlohmann::ordered_json();
    per.push_back(std::move(e));
  }
  return j;
}

}  // namespace stylemix
