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

#include "retab/dense_oracle.hpp"

#include <string>
#include <vector>

#include "retab/error.hpp"

namespace retab {
namespace {

using Dense = std::vector<double>;

Dense Multiply(const Dense& a, const Dense& b, std::size_t n) {
  Dense c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  }
  return c;
}

Dense Identity(std::size_t n) {
  Dense id(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
  return id;
}

}  // namespace

ResponseStack DenseOracleWalk(std::span<const double> t, const ResponseStack& responses,
                              int iters) {
  const std::size_t n = responses.pixels();
  if (n > kMaxOracleSize) {
    throw ArgumentError("dense oracle limited to " + std::to_string(kMaxOracleSize) +
                        " pixels, got " + std::to_string(n));
  }
  if (t.size() != n * n) throw ArgumentError("dense matrix does not match the response grid");
  if (iters < 0) throw ArgumentError("iteration count must be >= 0");

  Dense power = Identity(n);
  Dense base(t.begin(), t.end());
  for (int e = iters; e > 0; e >>= 1) {
    if (e & 1) power = Multiply(power, base, n);
    if (e > 1) base = Multiply(base, base, n);
  }

  ResponseStack out(responses.height(), responses.width(), responses.channels());
  for (int c = 0; c < responses.channels(); ++c) {
    const auto in = responses.channel(c);
    auto dst = out.channel(c);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += power[i * n + j] * in[j];
      dst[i] = acc;
    }
  }
  return out;
}

}  // namespace retab
