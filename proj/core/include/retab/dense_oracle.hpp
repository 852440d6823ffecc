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

#ifndef RETAB_DENSE_ORACLE_HPP_
#define RETAB_DENSE_ORACLE_HPP_

#include <cstddef>
#include <span>

#include "retab/grid.hpp"

namespace retab {

inline constexpr std::size_t kMaxOracleSize = 4096;

// Reference random walk with an explicit dense transition matrix: forms
// T^iters by repeated squaring and applies it to every channel. Shares no
// code with the sparse walk. `t` is row-major n x n with n = responses
// pixel count, n <= kMaxOracleSize.
ResponseStack DenseOracleWalk(std::span<const double> t, const ResponseStack& responses, int iters);

}  // namespace retab

#endif  // RETAB_DENSE_ORACLE_HPP_
