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
#include <cctype>
#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "stylemix/common.hpp"
#include "stylemix/image.hpp"

namespace stylemix {

namespace fs = std::filesystem;

inline bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".tif" ||
         ext == ".tiff" || ext == ".webp";
}

/// Image files directly inside `dir`, sorted by file name so results never
/// depend on directory enumeration order.
inline std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && is_image_file(e.path())) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

/// Decodes any OpenCV-readable file into a planar RGB image in 0..255.
inline Image load_image(const fs::path& path) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw RuntimeFailure("cannot read image " + path.string());
  Image img(static_cast<std::size_t>(bgr.cols), static_cast<std::size_t>(bgr.rows), 3);
  for (std::size_t y = 0; y < img.height; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(static_cast<int>(y));
    for (std::size_t x = 0; x < img.width; ++x) {
      img.at(0, y, x) = row[x][2];
      img.at(1, y, x) = row[x][1];
      img.at(2, y, x) = row[x][0];
    }
  }
  return img;
}

/// Writes an RGB (or gray) image as 8-bit PNG. Values are rounded and clamped.
inline void save_png(const fs::path& path, const Image& img) {
  if (img.channels != 3 && img.channels != 1)
    throw ValidationError("save_png supports 1 or 3 channels");
  cv::Mat mat(static_cast<int>(img.height), static_cast<int>(img.width),
              img.channels == 3 ? CV_8UC3 : CV_8UC1);
  auto q = [](float v) {
    return static_cast<std::uint8_t>(std::clamp(std::nearbyint(v), 0.0f, 255.0f));
  };
  for (std::size_t y = 0; y < img.height; ++y) {
    auto* row = mat.ptr<std::uint8_t>(static_cast<int>(y));
    for (std::size_t x = 0; x < img.width; ++x) {
      if (img.channels == 3) {
        row[3 * x + 0] = q(img.at(2, y, x));
        row[3 * x + 1] = q(img.at(1, y, x));
        row[3 * x + 2] = q(img.at(0, y, x));
      } else {
        row[x] = q(img.at(0, y, x));
      }
    }
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), mat, {cv::IMWRITE_PNG_COMPRESSION, 3}))
    throw RuntimeFailure("cannot write " + path.string());
}

/// Single-channel 8- or 16-bit label image.
inline LabelImage load_labels(const fs::path& path) {
  const cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw RuntimeFailure("cannot read label image " + path.string());
  if (m.channels() != 1)
    throw ValidationError("label image must be single-channel: " + path.string());
  if (m.depth() != CV_8U && m.depth() != CV_16U)
    throw ValidationError("label image must be 8- or 16-bit: " + path.string());
  LabelImage out(static_cast<std::size_t>(m.cols), static_cast<std::size_t>(m.rows), 1);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x)
      out.at(0, std::size_t(y), std::size_t(x)) =
          m.depth() == CV_8U ? m.at<std::uint8_t>(y, x) : m.at<std::uint16_t>(y, x);
  return out;
}

/// Writes labels as 8-bit PNG when every id fits, 16-bit otherwise.
inline void save_labels(const fs::path& path, const LabelImage& labels) {
  const bool wide = std::any_of(labels.data.begin(), labels.data.end(),
                                [](std::uint16_t v) { return v > 255; });
  cv::Mat m(static_cast<int>(labels.height), static_cast<int>(labels.width),
            wide ? CV_16UC1 : CV_8UC1);
  for (std::size_t y = 0; y < labels.height; ++y)
    for (std::size_t x = 0; x < labels.width; ++x) {
      if (wide)
        m.at<std::uint16_t>(int(y), int(x)) = labels.at(0, y, x);
      else
        m.at<std::uint8_t>(int(y), int(x)) = static_cast<std::uint8_t>(labels.at(0, y, x));
    }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), m)) throw RuntimeFailure("cannot write " + path.string());
}

}  // namespace stylemix
