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

#ifndef RETAB_TESTS_SUPPORT_METRIC_FIXTURES_HPP_
#define RETAB_TESTS_SUPPORT_METRIC_FIXTURES_HPP_

#include <memory>
#include <vector>

#include "retab/affinity.hpp"
#include "retab/metrics.hpp"
#include "retab/splits.hpp"

namespace retab::testing {

// Three categories with IoUs (1, 0.5, 0): category 0 is predicted perfectly
// on two pixels, category 1 has one hit and one pixel predicted as 2, and
// category 2 never has a true positive.
struct PlantedConfusion {
  ConfusionMatrix cm{3};
  CategorySplit split;
};

inline PlantedConfusion PlantedThreeClassConfusion() {
  PlantedConfusion out;
  LabelMap gt(1, 4), pred(1, 4);
  const std::uint8_t g[4] = {0, 0, 1, 1};
  const std::uint8_t p[4] = {0, 0, 1, 2};
  for (int x = 0; x < 4; ++x) {
    gt.at(0, x) = g[x];
    pred.at(0, x) = p[x];
  }
  out.cm.Accumulate(pred, gt);
  out.split.fold_id = 0;
  out.split.num_categories = 3;
  out.split.base = {0, 1};
  out.split.novel = {2};
  return out;
}

// 2x2 binary maps with exactly one TP, FP, FN and TN.
struct BinaryFixture {
  BinaryMap pred{2, 2};
  BinaryMap gt{2, 2};
};

inline BinaryFixture OneOfEachBinaryFixture() {
  BinaryFixture f;
  f.pred.storage() = {1, 1, 0, 0};
  f.gt.storage() = {1, 0, 1, 0};
  return f;
}

// Four adjacent pairs on a 1x5 grid: (0,1) (1,2) (2,3) (3,4), one each of
// TP, FP, FN and TN. The TP sits at a = 0.5 exactly, which counts as positive.
struct AffinityFixture {
  PairAffinityTable pred;
  PairAffinityTable gt;
};

inline AffinityFixture OneOfEachAffinityFixture() {
  auto pairs = std::make_shared<const NeighborPairs>(BuildNeighbors(1, 5, 1.5));
  AffinityFixture f;
  f.pred.pairs = pairs;
  f.gt.pairs = pairs;
  // pairs: (0,1) (1,2) (2,3) (3,4)
  f.pred.affinity = {0.5, 0.9, 0.2, 0.1};
  f.gt.labels = {AffinityLabel::kPositive, AffinityLabel::kNegative, AffinityLabel::kPositive,
                 AffinityLabel::kNegative};
  return f;
}

}  // namespace retab::testing

#endif  // RETAB_TESTS_SUPPORT_METRIC_FIXTURES_HPP_
