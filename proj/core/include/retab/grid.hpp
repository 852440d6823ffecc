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

#ifndef RETAB_GRID_HPP_
#define RETAB_GRID_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "retab/error.hpp"

namespace retab {

// Label value excluded from every evaluation and label-generation rule.
inline constexpr std::uint8_t kIgnoreLabel = 255;
inline constexpr std::uint8_t kBackground = 0;

// Row-major H x W array. Pixel i sits at (i / width, i % width).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, T fill = T{})
      : height_(height), width_(width), values_(CheckedSize(height, width), fill) {}
  Grid(int height, int width, std::vector<T> values)
      : height_(height), width_(width), values_(std::move(values)) {
    if (values_.size() != CheckedSize(height, width)) {
      throw ArgumentError("grid payload has " + std::to_string(values_.size()) +
                          " values, expected " + std::to_string(height) + "x" +
                          std::to_string(width));
    }
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& at(int y, int x) { return values_[Index(y, x)]; }
  const T& at(int y, int x) const { return values_[Index(y, x)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::vector<T>& storage() { return values_; }
  const std::vector<T>& storage() const { return values_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Grid&) const = default;

 private:
  static std::size_t CheckedSize(int height, int width) {
    if (height < 0 || width < 0) throw ArgumentError("negative grid dimension");
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  std::size_t Index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<T> values_;
};

using LabelMap = Grid<std::uint8_t>;
using BinaryMap = Grid<std::uint8_t>;

// Boundary probability after the sigmoid, one value per working-grid pixel.
using BoundaryProbMap = Grid<double>;

// Binary partition of the working grid into boundary / non-boundary pixels.
class RegionMask {
 public:
  RegionMask() = default;
  explicit RegionMask(BinaryMap is_boundary);
  static RegionMask AllNonBoundary(int height, int width);
  static RegionMask AllBoundary(int height, int width);

  int height() const { return is_boundary_.height(); }
  int width() const { return is_boundary_.width(); }
  std::size_t size() const { return is_boundary_.size(); }
  bool is_boundary(std::size_t i) const { return is_boundary_[i] != 0; }
  std::size_t boundary_count() const;
  const BinaryMap& map() const { return is_boundary_; }

  bool operator==(const RegionMask&) const = default;

 private:
  BinaryMap is_boundary_;
};

// Per-category response maps. Stored channel-planar: channel c is a
// contiguous H*W block, matching how the random walk consumes it.
class ResponseStack {
 public:
  ResponseStack() = default;
  ResponseStack(int height, int width, int channels, double fill = 0.0);
  ResponseStack(int height, int width, int channels, std::vector<double> planar);

  // Converts from / to the H x W x C interleaved layout used in files.
  static ResponseStack FromInterleaved(int height, int width, int channels,
                                       std::span<const float> hwc);
  std::vector<float> ToInterleaved() const;

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixels() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  std::span<double> channel(int c) { return {data_.data() + c * pixels(), pixels()}; }
  std::span<const double> channel(int c) const {
    return {data_.data() + c * pixels(), pixels()};
  }
  double& at(int c, std::size_t i) { return data_[c * pixels() + i]; }
  double at(int c, std::size_t i) const { return data_[c * pixels() + i]; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const ResponseStack&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Per-pixel feature vectors, H x W x D, pixel-major as stored on disk.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int height, int width, int depth, std::vector<double> values);

  int height() const { return height_; }
  int width() const { return width_; }
  int depth() const { return depth_; }
  std::size_t pixels() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::span<const double> pixel(std::size_t i) const {
    return {values_.data() + i * depth_, static_cast<std::size_t>(depth_)};
  }

 private:
  int height_ = 0;
  int width_ = 0;
  int depth_ = 0;
  std::vector<double> values_;
};

}  // namespace retab

#endif  // RETAB_GRID_HPP_
