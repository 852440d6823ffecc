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

#include "retab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "retab/error.hpp"

namespace retab {

RegionMask BinarizeBoundary(const BoundaryProbMap& prob, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ArgumentError("tau must lie in (0, 1), got " + std::to_string(tau));
  }
  BinaryMap mask(prob.height(), prob.width(), 0);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double p = prob[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ArgumentError("boundary probability " + std::to_string(p) + " outside [0, 1]");
    }
    mask[i] = p >= tau ? 1 : 0;
  }
  return RegionMask(std::move(mask));
}

BinaryMap DeriveGtBoundary(const LabelMap& seg, int radius) {
  if (radius < 1) throw ArgumentError("boundary radius must be >= 1");
  const int h = seg.height();
  const int w = seg.width();
  BinaryMap out(h, w, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t c = seg.at(y, x);
      if (c == kIgnoreLabel) continue;
      bool found = false;
      for (int yy = std::max(0, y - radius); yy <= std::min(h - 1, y + radius) && !found; ++yy) {
        for (int xx = std::max(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) {
          const std::uint8_t other = seg.at(yy, xx);
          if (other != kIgnoreLabel && other != c) {
            found = true;
            break;
          }
        }
      }
      out.at(y, x) = found ? 1 : 0;
    }
  }
  return out;
}

double BoundaryLoss(const BoundaryProbMap& prob, const BinaryMap& gt_boundary,
                    const LabelMap& seg, const CategorySplit& split, double eps) {
  if (!prob.same_shape(gt_boundary) || !prob.same_shape(seg)) {
    throw ArgumentError("boundary loss inputs differ in shape");
  }
  if (!(eps > 0.0 && eps < 0.5)) throw ArgumentError("eps must lie in (0, 0.5)");

  double sum_bd = 0.0, sum_fg = 0.0, sum_bg = 0.0;
  std::size_t n_bd = 0, n_fg = 0, n_bg = 0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const std::uint8_t c = seg[i];
    if (c == kIgnoreLabel) continue;
    if (c >= split.num_categories) {
      throw ArgumentError("label " + std::to_string(c) + " outside the category set");
    }
    if (split.is_novel(c)) {
      throw ArgumentError("boundary loss is defined on base samples only; found novel label " +
                          std::to_string(c));
    }
    const double p = std::clamp(prob[i], eps, 1.0 - eps);
    if (gt_boundary[i] != 0) {
      sum_bd += std::log(p);
      ++n_bd;
    } else if (c == kBackground) {
      sum_bg += std::log1p(-p);
      ++n_bg;
    } else {
      sum_fg += std::log1p(-p);
      ++n_fg;
    }
  }
  double loss = 0.0;
  if (n_bd > 0) loss -= sum_bd / static_cast<double>(n_bd);
  if (n_fg > 0) loss -= 0.5 * sum_fg / static_cast<double>(n_fg);
  if (n_bg > 0) loss -= 0.5 * sum_bg / static_cast<double>(n_bg);
  return loss;
}

BinaryMetrics EvalBinary(const BinaryMap& pred, const BinaryMap& gt,
                         const std::optional<BinaryMap>& ignore) {
  if (!pred.same_shape(gt) || (ignore && !ignore->same_shape(gt))) {
    throw ArgumentError("binary evaluation inputs differ in shape");
  }
  BinaryMetrics m;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (ignore && (*ignore)[i] != 0) continue;
    m.Add(pred[i] != 0, gt[i] != 0);
  }
  return m;
}

}  // namespace retab
