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

// Layer lists of the AdaIN encoder (VGG-19 truncated at relu4_1, preceded by
// a 1x1 colour projection) and its mirror-image decoder.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "stylemix/common.hpp"
#include "stylemix/tensor.hpp"
#include "stylemix/weights.hpp"

namespace stylemix {

enum class OpKind { ReflectionPad, Conv, Relu, MaxPool2, Upsample2 };

struct LayerOp {
  OpKind kind;
  std::string name;  // archive layer name, convolutions only
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t pad = 0;
};

struct NetworkDescription {
  std::string name;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::vector<LayerOp> ops;

  std::vector<const LayerOp*> convs() const {
    std::vector<const LayerOp*> out;
    for (const auto& op : ops)
      if (op.kind == OpKind::Conv) out.push_back(&op);
    return out;
  }
};

namespace detail {

inline void add_conv3(NetworkDescription& net, std::string name, std::size_t in, std::size_t out,
                      bool with_relu = true) {
  net.ops.push_back({OpKind::ReflectionPad, {}, 0, 0, 0, 1});
  net.ops.push_back({OpKind::Conv, std::move(name), in, out, 3, 0});
  if (with_relu) net.ops.push_back({OpKind::Relu, {}, 0, 0, 0, 0});
}

}  // namespace detail

inline const NetworkDescription& encoder_description() {
  static const NetworkDescription net = [] {
    NetworkDescription n{"encoder", 3, 512, {}};
    n.ops.push_back({OpKind::Conv, "encoder.conv0", 3, 3, 1, 0});
    detail::add_conv3(n, "encoder.conv1_1", 3, 64);
    detail::add_conv3(n, "encoder.conv1_2", 64, 64);
    n.ops.push_back({OpKind::MaxPool2, {}, 0, 0, 0, 0});
    detail::add_conv3(n, "encoder.conv2_1", 64, 128);
    detail::add_conv3(n, "encoder.conv2_2", 128, 128);
    n.ops.push_back({OpKind::MaxPool2, {}, 0, 0, 0, 0});
    detail::add_conv3(n, "encoder.conv3_1", 128, 256);
    detail::add_conv3(n, "encoder.conv3_2", 256, 256);
    detail::add_conv3(n, "encoder.conv3_3", 256, 256);
    detail::add_conv3(n, "encoder.conv3_4", 256, 256);
    n.ops.push_back({OpKind::MaxPool2, {}, 0, 0, 0, 0});
    detail::add_conv3(n, "encoder.conv4_1", 256, 512);  // relu4_1
    return n;
  }();
  return net;
}

inline const NetworkDescription& decoder_description() {
  static const NetworkDescription net = [] {
    NetworkDescription n{"decoder", 512, 3, {}};
    detail::add_conv3(n, "decoder.conv4_1", 512, 256);
    n.ops.push_back({OpKind::Upsample2, {}, 0, 0, 0, 0});
    detail::add_conv3(n, "decoder.conv3_4", 256, 256);
    detail::add_conv3(n, "decoder.conv3_3", 256, 256);
    detail::add_conv3(n, "decoder.conv3_2", 256, 256);
    detail::add_conv3(n, "decoder.conv3_1", 256, 128);
    n.ops.push_back({OpKind::Upsample2, {}, 0, 0, 0, 0});
    detail::add_conv3(n, "decoder.conv2_2", 128, 128);
    detail::add_conv3(n, "decoder.conv2_1", 128, 64);
    n.ops.push_back({OpKind::Upsample2, {}, 0, 0, 0, 0});
    detail::add_conv3(n, "decoder.conv1_2", 64, 64);
    detail::add_conv3(n, "decoder.conv1_1", 64, 3, /*with_relu=*/false);
    return n;
  }();
  return net;
}

/// A NetworkDescription bound to weights. Convolution kernels are prepared
/// once; running the network is const and thread-safe.
class Network {
 public:
  Network(const NetworkDescription& desc, const WeightArchive& weights) : desc_(&desc) {
    for (const auto& op : desc.ops)
      if (op.kind == OpKind::Conv)
        kernels_.emplace_back(weights.conv(op.name, op.in_channels, op.out_channels, op.kernel));
  }

  const NetworkDescription& description() const noexcept { return *desc_; }

  Tensor forward(Tensor x) const {
    if (x.shape().c != desc_->in_channels)
      throw ValidationError(desc_->name + ": expected " + std::to_string(desc_->in_channels) +
                            " input channels, got " + std::to_string(x.shape().c));
    // Pad → conv → relu runs are executed as one fused kernel call.
    const auto& ops = desc_->ops;
    std::size_t k = 0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const LayerOp& op = ops[i];
      switch (op.kind) {
        case OpKind::ReflectionPad:
          if (i + 1 < ops.size() && ops[i + 1].kind == OpKind::Conv) {
            ConvOptions opts;
            opts.reflect_pad = op.pad;
            opts.relu = i + 2 < ops.size() && ops[i + 2].kind == OpKind::Relu;
            x = kernels_[k++](x, opts);
            i += opts.relu ? 2 : 1;
          } else {
            x = reflection_pad(x, op.pad);
          }
          break;
        case OpKind::Conv: {
          ConvOptions opts;
          opts.relu = i + 1 < ops.size() && ops[i + 1].kind == OpKind::Relu;
          x = kernels_[k++](x, opts);
          if (opts.relu) ++i;
          break;
        }
        case OpKind::Relu: x = relu(std::move(x)); break;
        case OpKind::MaxPool2: x = maxpool2(x); break;
        case OpKind::Upsample2: x = upsample_nearest2(x); break;
      }
    }
    return x;
  }

 private:
  const NetworkDescription* desc_;
  std::vector<ConvKernel> kernels_;
};

/// Archive with He-initialized random weights for every encoder and decoder
/// layer. Used for tests, benchmarks and geometry checks when the converted
/// pretrained archive is not available.
inline WeightArchive make_random_archive(std::uint64_t seed) {
  WeightArchive archive;
  Rng rng(derive_seed(seed, "random-archive"));
  for (const auto* desc : {&encoder_description(), &decoder_description()}) {
    for (const LayerOp* op : desc->convs()) {
      ConvSpec spec{op->in_channels, op->out_channels, op->kernel, {}, {}};
      const double fan_in = double(op->in_channels * op->kernel * op->kernel);
      const double std = std::sqrt(2.0 / fan_in);
      spec.weight.resize(op->out_channels * op->in_channels * op->kernel * op->kernel);
      for (float& w : spec.weight) w = static_cast<float>(rng.normal() * std);
      spec.bias.assign(op->out_channels, 0.0f);
      if (op->name == "decoder.conv1_1") spec.bias.assign(op->out_channels, 0.5f);
      archive.put_conv(op->name, spec);
    }
  }
  return archive;
}

}  // namespace stylemix
