/* Copyright 2026 The retab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "retab/grid.hpp"

#include <algorithm>

namespace retab {

RegionMask::RegionMask(BinaryMap is_boundary) : is_boundary_(std::move(is_boundary)) {
  for (auto& v : is_boundary_.values()) {
    if (v > 1) throw ArgumentError("region mask entries must be 0 or 1");
  }
}

RegionMask RegionMask::AllNonBoundary(int height, int width) {
  return RegionMask(BinaryMap(height, width, 0));
}

RegionMask RegionMask::AllBoundary(int height, int width) {
  return RegionMask(BinaryMap(height, width, 1));
}

std::size_t RegionMask::boundary_count() const {
  return static_cast<std::size_t>(
      std::count(is_boundary_.values().begin(), is_boundary_.values().end(), 1));
}

ResponseStack::ResponseStack(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 0 || width < 0 || channels < 0) {
    throw ArgumentError("negative response stack dimension");
  }
  data_.assign(pixels() * static_cast<std::size_t>(channels), fill);
}

ResponseStack::ResponseStack(int height, int width, int channels, std::vector<double> planar)
    : ResponseStack(height, width, channels) {
  if (planar.size() != data_.size()) {
    throw ArgumentError("response payload size does not match H*W*C");
  }
  data_ = std::move(planar);
}

ResponseStack ResponseStack::FromInterleaved(int height, int width, int channels,
                                             std::span<const float> hwc) {
  ResponseStack out(height, width, channels);
  if (hwc.size() != out.data_.size()) {
    throw ArgumentError("response payload size does not match H*W*C");
  }
  const std::size_t n = out.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) out.at(c, i) = hwc[i * channels + c];
  }
  return out;
}

std::vector<float> ResponseStack::ToInterleaved() const {
  std::vector<float> hwc(data_.size());
  const std::size_t n = pixels();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels_; ++c) hwc[i * channels_ + c] = static_cast<float>(at(c, i));
  }
  return hwc;
}

FeatureMap::FeatureMap(int height, int width, int depth, std::vector<double> values)
    : height_(height), width_(width), depth_(depth), values_(std::move(values)) {
  if (height < 0 || width < 0 || depth < 0) throw ArgumentError("negative feature dimension");
  if (values_.size() != pixels() * static_cast<std::size_t>(depth)) {
    throw ArgumentError("feature payload size does not match H*W*D");
  }
}

}  // namespace retab
