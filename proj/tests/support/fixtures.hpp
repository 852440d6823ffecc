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

#ifndef RETAB_TESTS_SUPPORT_FIXTURES_HPP_
#define RETAB_TESTS_SUPPORT_FIXTURES_HPP_

#include <vector>

#include "retab/pipeline.hpp"

namespace retab::testing {

// Planted 6x6 two-region scene, category 1 (novel in fold 0):
//
//   column        0    1    2     3     4    5
//   GT            1    1    1     0     0    0
//   boundary p    0.1  0.1  0.9   0.9   0.1  0.1   -> columns 2, 3 at tau 0.5
//   feature       0    0    0.6   1.65  2.0  2.0
//   CAM           1    1    0     0.5   0    0
//
// Column 2 is an object pixel the CAM missed; column 3 is a background pixel
// with spurious CAM response whose feature sits between the two regions.
// With default parameters (gamma 5, beta 8, 16 iterations, bg_alpha 16),
// one-stage keeps column 3 as object, nbd-bd cannot recover column 2 and
// keeps column 3, and two-stage propagation gets every pixel right. Every
// per-pixel argmax decision has a relative margin above 0.4.
inline constexpr int kPlantedSize = 6;
inline constexpr int kPlantedCategory = 1;

inline SampleInputs PlantedTwoRegionFixture() {
  constexpr int n = kPlantedSize;
  const double feature_by_col[n] = {0.0, 0.0, 0.6, 1.65, 2.0, 2.0};
  const double cam_by_col[n] = {1.0, 1.0, 0.0, 0.5, 0.0, 0.0};
  const double prob_by_col[n] = {0.1, 0.1, 0.9, 0.9, 0.1, 0.1};

  std::vector<double> features, cam;
  BoundaryProbMap prob(n, n);
  LabelMap gt(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      features.push_back(feature_by_col[x]);
      cam.push_back(cam_by_col[x]);
      prob.at(y, x) = prob_by_col[x];
      gt.at(y, x) = x < 3 ? kPlantedCategory : kBackground;
    }
  }
  SampleInputs in;
  in.cam = ResponseStack(n, n, 1, std::move(cam));
  in.categories = {kPlantedCategory};
  in.features = FeatureMap(n, n, 1, std::move(features));
  in.boundary = std::move(prob);
  in.gt = std::move(gt);
  return in;
}

}  // namespace retab::testing

#endif  // RETAB_TESTS_SUPPORT_FIXTURES_HPP_
