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

#ifndef RETAB_BOUNDARY_HPP_
#define RETAB_BOUNDARY_HPP_

#include <optional>

#include "retab/grid.hpp"
#include "retab/metrics.hpp"
#include "retab/splits.hpp"

namespace retab {

inline constexpr double kDefaultTau = 0.5;
inline constexpr int kDefaultBoundaryRadius = 1;
inline constexpr double kDefaultLossEps = 1e-7;

// Boundary region = {i | p_i >= tau}. Throws ArgumentError if tau is not in
// (0, 1) or any probability lies outside [0, 1].
RegionMask BinarizeBoundary(const BoundaryProbMap& prob, double tau = kDefaultTau);

// A pixel is a boundary pixel iff some pixel within Chebyshev distance
// `radius` carries a different non-ignore label. Ignore pixels are never
// boundary.
BinaryMap DeriveGtBoundary(const LabelMap& seg, int radius = kDefaultBoundaryRadius);

// Class-balanced boundary loss over the subsets
//   bd = {b* = 1}, fg = {b* = 0, c* in base \ {bg}}, bg = {b* = 0, c* = bg}:
//   L = -mean_bd log p - 1/2 mean_fg log(1 - p) - 1/2 mean_bg log(1 - p),
// with p clamped to [eps, 1 - eps]. Empty subsets contribute 0; ignore
// pixels belong to no subset. Only defined on base samples, so a novel
// category in `seg` is an ArgumentError.
double BoundaryLoss(const BoundaryProbMap& prob, const BinaryMap& gt_boundary,
                    const LabelMap& seg, const CategorySplit& split,
                    double eps = kDefaultLossEps);

// Binary metrics over pixels not flagged in `ignore`.
BinaryMetrics EvalBinary(const BinaryMap& pred, const BinaryMap& gt,
                         const std::optional<BinaryMap>& ignore = std::nullopt);

}  // namespace retab

#endif  // RETAB_BOUNDARY_HPP_
