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

#ifndef RETAB_TENSOR_IO_HPP_
#define RETAB_TENSOR_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "retab/error.hpp"
#include "retab/grid.hpp"

namespace retab {

enum class DType { kFloat32, kUInt8, kInt32 };

// NPY descriptor written for each dtype: "<f4", "|u1", "<i4".
std::string_view DTypeDescr(DType dtype);

// Dense row-major array as stored in an NPY container.
class NpyArray {
 public:
  using Storage =
      std::variant<std::vector<float>, std::vector<std::uint8_t>, std::vector<std::int32_t>>;

  NpyArray() : NpyArray({0}, std::vector<float>{}) {}
  NpyArray(std::vector<std::size_t> shape, Storage data);

  DType dtype() const;
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const;

  // Throws ArgumentError when T does not match the stored dtype.
  template <typename T>
  std::span<const T> values() const {
    const auto* v = std::get_if<std::vector<T>>(&data_);
    if (v == nullptr) throw ArgumentError("array dtype is " + std::string(DTypeDescr(dtype())));
    return *v;
  }

  const Storage& storage() const { return data_; }
  bool operator==(const NpyArray&) const = default;

 private:
  std::vector<std::size_t> shape_;
  Storage data_;
};

// In-memory codec. Parse accepts NPY v1 and v2; Serialize writes v1 unless
// the header needs v2.
NpyArray ParseNpy(std::span<const std::byte> bytes);
std::string SerializeNpy(const NpyArray& array);

NpyArray ReadTensor(const std::filesystem::path& path);
void WriteTensor(const std::filesystem::path& path, const NpyArray& array);

// Typed views over NpyArray. Each checks rank and dtype.
LabelMap ToLabelMap(const NpyArray& array);              // |u1, H x W
BoundaryProbMap ToProbMap(const NpyArray& array);         // <f4, H x W
ResponseStack ToResponseStack(const NpyArray& array);     // <f4, H x W x C (or H x W)
FeatureMap ToFeatureMap(const NpyArray& array);           // <f4, H x W x D

NpyArray FromLabelMap(const LabelMap& labels);
NpyArray FromProbMap(const BoundaryProbMap& prob);
NpyArray FromResponseStack(const ResponseStack& stack);

}  // namespace retab

#endif  // RETAB_TENSOR_IO_HPP_
