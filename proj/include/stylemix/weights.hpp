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

// Portable weight archive ("SMDW").
//
// Layout, all integers little-endian u32:
//
//   "SMDW" | version (=1) | tensor count
//   per tensor: name length | UTF-8 name | rank | rank x dim | float32 LE payload
//   CRC32 of every preceding byte
//
// Convolution layers are stored as two entries, "<layer>.weight" with dims
// (out, in, k, k) and "<layer>.bias" with dims (out).

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <zlib.h>

#include "stylemix/common.hpp"
#include "stylemix/tensor.hpp"

namespace stylemix {

static_assert(std::endian::native == std::endian::little,
              "SMDW I/O assumes a little-endian host");

inline constexpr char kArchiveMagic[4] = {'S', 'M', 'D', 'W'};
inline constexpr std::uint32_t kArchiveVersion = 1;

/// One named array of arbitrary rank.
struct NamedArray {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t expected_size() const noexcept {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
  friend bool operator==(const NamedArray& a, const NamedArray& b) {
    return a.dims == b.dims && a.values.size() == b.values.size() &&
           std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(float)) == 0;
  }
};

inline std::uint32_t crc32_of(const void* data, std::size_t size) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  const auto* p = static_cast<const Bytef*>(data);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Ordered collection of named arrays. Serialization keeps insertion order.
class WeightArchive {
 public:
  void put(std::string name, NamedArray array) {
    if (array.values.size() != array.expected_size())
      throw ValidationError("archive entry '" + name + "' has inconsistent dims");
    if (auto it = index_.find(name); it != index_.end()) {
      entries_[it->second].second = std::move(array);
      return;
    }
    index_.emplace(name, entries_.size());
    entries_.emplace_back(std::move(name), std::move(array));
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const NamedArray* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }
  const NamedArray& at(const std::string& name) const {
    if (const auto* a = find(name)) return *a;
    throw ValidationError("weight archive has no entry '" + name + "'");
  }

  const std::vector<std::pair<std::string, NamedArray>>& entries() const noexcept {
    return entries_;
  }
  std::size_t size() const noexcept { return entries_.size(); }

  void put_conv(const std::string& layer, const ConvSpec& spec) {
    const auto co = static_cast<std::uint32_t>(spec.out_channels);
    const auto ci = static_cast<std::uint32_t>(spec.in_channels);
    const auto k = static_cast<std::uint32_t>(spec.kernel);
    put(layer + ".weight", {{co, ci, k, k}, spec.weight});
    put(layer + ".bias", {{co}, spec.bias});
  }

  /// Builds a ConvSpec for `layer`, checking dims against the expectation.
  ConvSpec conv(const std::string& layer, std::size_t in_channels, std::size_t out_channels,
                std::size_t kernel) const {
    const NamedArray* w = find(layer + ".weight");
    const NamedArray* b = find(layer + ".bias");
    if (!w || !b) throw ValidationError("missing weights for layer '" + layer + "'");
    const std::vector<std::uint32_t> wd = {std::uint32_t(out_channels), std::uint32_t(in_channels),
                                           std::uint32_t(kernel), std::uint32_t(kernel)};
    if (w->dims != wd || b->dims != std::vector<std::uint32_t>{std::uint32_t(out_channels)})
      throw ValidationError("mis-shaped weights for layer '" + layer + "'");
    ConvSpec spec{in_channels, out_channels, kernel, w->values, b->values};
    spec.validate();
    return spec;
  }

  std::vector<std::uint8_t> serialize() const {
    std::vector<std::uint8_t> out;
    auto put_u32 = [&out](std::uint32_t v) {
      const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
      out.insert(out.end(), p, p + 4);
    };
    out.insert(out.end(), std::begin(kArchiveMagic), std::end(kArchiveMagic));
    put_u32(kArchiveVersion);
    put_u32(static_cast<std::uint32_t>(entries_.size()));
    for (const auto& [name, array] : entries_) {
      put_u32(static_cast<std::uint32_t>(name.size()));
      out.insert(out.end(), name.begin(), name.end());
      put_u32(static_cast<std::uint32_t>(array.dims.size()));
      for (auto d : array.dims) put_u32(d);
      const auto* p = reinterpret_cast<const std::uint8_t*>(array.values.data());
      out.insert(out.end(), p, p + array.values.size() * sizeof(float));
    }
    put_u32(crc32_of(out.data(), out.size()));
    return out;
  }

  /// Throws RuntimeFailure on a corrupt, truncated or unsupported archive.
  static WeightArchive deserialize(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kArchiveMagic, 4) != 0)
      throw RuntimeFailure("not an SMDW archive (bad magic or too short)");
    std::uint32_t stored_crc = 0;
    std::memcpy(&stored_crc, bytes.data() + bytes.size() - 4, 4);
    const std::uint32_t actual_crc = crc32_of(bytes.data(), bytes.size() - 4);
    if (stored_crc != actual_crc)
      throw RuntimeFailure("SMDW CRC mismatch: stored " + hex64(stored_crc).substr(8) +
                           ", computed " + hex64(actual_crc).substr(8));

    const std::size_t end = bytes.size() - 4;
    std::size_t pos = 4;
    auto get_u32 = [&](const char* what) {
      if (pos + 4 > end) throw RuntimeFailure(std::string("SMDW truncated reading ") + what);
      std::uint32_t v;
      std::memcpy(&v, bytes.data() + pos, 4);
      pos += 4;
      return v;
    };
    const std::uint32_t version = get_u32("version");
    if (version != kArchiveVersion)
      throw RuntimeFailure("unsupported SMDW version " + std::to_string(version));
    const std::uint32_t count = get_u32("tensor count");

    WeightArchive archive;
    for (std::uint32_t t = 0; t < count; ++t) {
      const std::uint32_t name_len = get_u32("name length");
      if (pos + name_len > end) throw RuntimeFailure("SMDW truncated reading name");
      std::string name(reinterpret_cast<const char*>(bytes.data() + pos), name_len);
      pos += name_len;
      NamedArray array;
      const std::uint32_t rank = get_u32("rank");
      array.dims.reserve(rank);
      for (std::uint32_t r = 0; r < rank; ++r) array.dims.push_back(get_u32("dims"));
      const std::size_t n = array.expected_size();
      if (n > (end - pos) / sizeof(float))
        throw RuntimeFailure("SMDW truncated reading payload of '" + name + "'");
      array.values.resize(n);
      std::memcpy(array.values.data(), bytes.data() + pos, n * sizeof(float));
      pos += n * sizeof(float);
      if (archive.contains(name)) throw RuntimeFailure("SMDW duplicate entry '" + name + "'");
      archive.put(std::move(name), std::move(array));
    }
    if (pos != end) throw RuntimeFailure("SMDW has trailing bytes after last tensor");
    return archive;
  }

  static WeightArchive load(const std::filesystem::path& path) {
    return deserialize(read_file_bytes(path));
  }

  void save(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw RuntimeFailure("short write to " + path.string());
  }

 private:
  std::vector<std::pair<std::string, NamedArray>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace stylemix
