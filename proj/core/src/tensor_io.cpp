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

#include "retab/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <optional>

namespace retab {
namespace {

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read without byte swapping");

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kAlignment = 64;

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

// Minimal reader for the Python dict literal in an NPY header.
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  Header Parse() {
    Header header;
    bool has_descr = false, has_order = false, has_shape = false;
    Expect('{');
    while (true) {
      SkipSpace();
      if (Peek() == '}') {
        ++pos_;
        break;
      }
      const std::string key = ParseString();
      Expect(':');
      if (key == "descr") {
        header.descr = ParseString();
        has_descr = true;
      } else if (key == "fortran_order") {
        header.fortran_order = ParseBool();
        has_order = true;
      } else if (key == "shape") {
        header.shape = ParseShape();
        has_shape = true;
      } else {
        throw FormatError("unexpected NPY header key '" + key + "'");
      }
      SkipSpace();
      if (Peek() == ',') {
        ++pos_;
      } else if (Peek() != '}') {
        throw FormatError("malformed NPY header dict");
      }
    }
    if (!has_descr || !has_order || !has_shape) {
      throw FormatError("NPY header missing descr, fortran_order or shape");
    }
    return header;
  }

 private:
  char Peek() const {
    if (pos_ >= text_.size()) throw FormatError("truncated NPY header");
    return text_[pos_];
  }
  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void Expect(char c) {
    SkipSpace();
    if (Peek() != c) throw FormatError(std::string("NPY header: expected '") + c + "'");
    ++pos_;
  }
  std::string ParseString() {
    SkipSpace();
    const char quote = Peek();
    if (quote != '\'' && quote != '"') throw FormatError("NPY header: expected string");
    const std::size_t end = text_.find(quote, pos_ + 1);
    if (end == std::string_view::npos) throw FormatError("NPY header: unterminated string");
    std::string out(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return out;
  }
  bool ParseBool() {
    SkipSpace();
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    throw FormatError("NPY header: expected True or False");
  }
  std::vector<std::size_t> ParseShape() {
    std::vector<std::size_t> shape;
    Expect('(');
    while (true) {
      SkipSpace();
      if (Peek() == ')') {
        ++pos_;
        return shape;
      }
      if (!std::isdigit(static_cast<unsigned char>(Peek()))) {
        throw FormatError("NPY header: shape entries must be non-negative integers");
      }
      std::size_t value = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        value = value * 10 + static_cast<std::size_t>(text_[pos_] - '0');
        ++pos_;
      }
      shape.push_back(value);
      SkipSpace();
      if (Peek() == ',') ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<DType> DTypeFromDescr(std::string_view descr) {
  if (descr == "<f4") return DType::kFloat32;
  if (descr == "|u1" || descr == "<u1" || descr == "u1") return DType::kUInt8;
  if (descr == "<i4") return DType::kInt32;
  return std::nullopt;
}

std::size_t ElementSize(DType dtype) {
  switch (dtype) {
    case DType::kFloat32: return 4;
    case DType::kUInt8: return 1;
    case DType::kInt32: return 4;
  }
  return 0;
}

std::size_t ShapeProduct(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string ShapeLiteral(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

template <typename T>
std::vector<T> CopyPayload(std::span<const std::byte> payload, std::size_t count) {
  std::vector<T> out(count);
  if (count > 0) std::memcpy(out.data(), payload.data(), count * sizeof(T));
  return out;
}

void RequireRank(const NpyArray& array, std::size_t rank, const char* what) {
  if (array.rank() != rank) {
    throw ArgumentError(std::string(what) + " must have rank " + std::to_string(rank) +
                        ", got " + std::to_string(array.rank()));
  }
}

int Dim(const NpyArray& array, std::size_t axis) {
  return static_cast<int>(array.shape()[axis]);
}

}  // namespace

std::string_view DTypeDescr(DType dtype) {
  switch (dtype) {
    case DType::kFloat32: return "<f4";
    case DType::kUInt8: return "|u1";
    case DType::kInt32: return "<i4";
  }
  return "?";
}

NpyArray::NpyArray(std::vector<std::size_t> shape, Storage data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  const std::size_t stored = std::visit([](const auto& v) { return v.size(); }, data_);
  if (stored != ShapeProduct(shape_)) {
    throw ArgumentError("array holds " + std::to_string(stored) + " elements but shape " +
                        ShapeLiteral(shape_) + " implies " + std::to_string(ShapeProduct(shape_)));
  }
}

DType NpyArray::dtype() const {
  switch (data_.index()) {
    case 0: return DType::kFloat32;
    case 1: return DType::kUInt8;
    default: return DType::kInt32;
  }
}

std::size_t NpyArray::size() const { return ShapeProduct(shape_); }

NpyArray ParseNpy(std::span<const std::byte> bytes) {
  if (bytes.size() < kMagicLen + 4 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw FormatError("missing NPY magic string");
  }
  const auto major = static_cast<unsigned>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1) {
    header_len = static_cast<std::size_t>(bytes[8]) | (static_cast<std::size_t>(bytes[9]) << 8);
    prefix = 10;
  } else if (major == 2) {
    if (bytes.size() < 12) throw FormatError("truncated NPY v2 preamble");
    header_len = 0;
    for (int k = 0; k < 4; ++k) header_len |= static_cast<std::size_t>(bytes[8 + k]) << (8 * k);
    prefix = 12;
  } else {
    throw FormatError("unsupported NPY format version " + std::to_string(major));
  }
  if (bytes.size() < prefix + header_len) throw FormatError("truncated NPY header");

  const std::string_view text(reinterpret_cast<const char*>(bytes.data() + prefix), header_len);
  const Header header = HeaderParser(text).Parse();
  if (header.fortran_order) throw FormatError("Fortran-ordered NPY arrays are not supported");

  const auto dtype = DTypeFromDescr(header.descr);
  if (!dtype) throw UnsupportedTypeError("unsupported NPY dtype '" + header.descr + "'");

  const std::size_t count = ShapeProduct(header.shape);
  const auto payload = bytes.subspan(prefix + header_len);
  const std::size_t expected = count * ElementSize(*dtype);
  if (payload.size() != expected) {
    throw FormatError("NPY payload is " + std::to_string(payload.size()) + " bytes, header " +
                      "implies " + std::to_string(expected));
  }
  switch (*dtype) {
    case DType::kFloat32: return {header.shape, CopyPayload<float>(payload, count)};
    case DType::kUInt8: return {header.shape, CopyPayload<std::uint8_t>(payload, count)};
    case DType::kInt32: return {header.shape, CopyPayload<std::int32_t>(payload, count)};
  }
  throw UnsupportedTypeError("unsupported NPY dtype");
}

std::string SerializeNpy(const NpyArray& array) {
  std::string dict = "{'descr': '" + std::string(DTypeDescr(array.dtype())) +
                     "', 'fortran_order': False, 'shape': " + ShapeLiteral(array.shape()) + ", }";
  // Pad with spaces so that preamble + header + '\n' is 64-byte aligned.
  auto padded_len = [&](std::size_t prefix) {
    const std::size_t unpadded = prefix + dict.size() + 1;
    return dict.size() + 1 + (kAlignment - unpadded % kAlignment) % kAlignment;
  };
  int major = 1;
  std::size_t header_len = padded_len(10);
  if (header_len > 0xFFFF) {
    major = 2;
    header_len = padded_len(12);
  }
  dict.append(header_len - dict.size() - 1, ' ');
  dict.push_back('\n');

  std::string out(kMagic, kMagicLen);
  out.push_back(static_cast<char>(major));
  out.push_back(0);
  const int len_bytes = major == 1 ? 2 : 4;
  for (int k = 0; k < len_bytes; ++k) out.push_back(static_cast<char>((header_len >> (8 * k)) & 0xFF));
  out += dict;
  std::visit(
      [&](const auto& v) {
        out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(v[0]));
      },
      array.storage());
  return out;
}

NpyArray ReadTensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  try {
    return ParseNpy(std::as_bytes(std::span(raw)));
  } catch (const FormatError& e) {
    // Keep the subtype so callers can still distinguish unsupported dtypes.
    if (dynamic_cast<const UnsupportedTypeError*>(&e)) {
      throw UnsupportedTypeError(path.string() + ": " + e.what());
    }
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteTensor(const std::filesystem::path& path, const NpyArray& array) {
  const std::string bytes = SerializeNpy(array);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

LabelMap ToLabelMap(const NpyArray& array) {
  RequireRank(array, 2, "label map");
  const auto v = array.values<std::uint8_t>();
  return {Dim(array, 0), Dim(array, 1), std::vector<std::uint8_t>(v.begin(), v.end())};
}

BoundaryProbMap ToProbMap(const NpyArray& array) {
  RequireRank(array, 2, "boundary map");
  const auto v = array.values<float>();
  return {Dim(array, 0), Dim(array, 1), std::vector<double>(v.begin(), v.end())};
}

ResponseStack ToResponseStack(const NpyArray& array) {
  if (array.rank() == 2) {
    return ResponseStack::FromInterleaved(Dim(array, 0), Dim(array, 1), 1, array.values<float>());
  }
  RequireRank(array, 3, "response stack");
  return ResponseStack::FromInterleaved(Dim(array, 0), Dim(array, 1), Dim(array, 2),
                                        array.values<float>());
}

FeatureMap ToFeatureMap(const NpyArray& array) {
  RequireRank(array, 3, "feature map");
  const auto v = array.values<float>();
  return {Dim(array, 0), Dim(array, 1), Dim(array, 2), std::vector<double>(v.begin(), v.end())};
}

NpyArray FromLabelMap(const LabelMap& labels) {
  return {{static_cast<std::size_t>(labels.height()), static_cast<std::size_t>(labels.width())},
          labels.storage()};
}

NpyArray FromProbMap(const BoundaryProbMap& prob) {
  std::vector<float> v(prob.values().begin(), prob.values().end());
  return {{static_cast<std::size_t>(prob.height()), static_cast<std::size_t>(prob.width())},
          std::move(v)};
}

NpyArray FromResponseStack(const ResponseStack& stack) {
  return {{static_cast<std::size_t>(stack.height()), static_cast<std::size_t>(stack.width()),
           static_cast<std::size_t>(stack.channels())},
          stack.ToInterleaved()};
}

}  // namespace retab
