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

#ifndef RETAB_METRICS_HPP_
#define RETAB_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "retab/grid.hpp"
#include "retab/splits.hpp"

namespace retab {

// Counts of a binary classification and the metrics derived from them.
// Precision, recall and F1 are 0 when their denominator is 0; accuracy is 0
// when nothing was evaluated.
struct BinaryMetrics {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  void Add(bool predicted, bool actual);
  BinaryMetrics& operator+=(const BinaryMetrics& other);

  std::uint64_t total() const { return tp + fp + fn + tn; }
  double accuracy() const;
  double precision() const;
  double recall() const;
  double f1() const;
};

// counts(g, p) = number of pixels with ground truth g predicted as p.
// Pixels whose ground truth is the ignore label are skipped. A prediction of
// the ignore label on a valid pixel is kept as a miss for its GT category.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_categories);

  int num_categories() const { return n_; }
  std::uint64_t count(int gt, int pred) const { return counts_[gt * n_ + pred]; }
  std::uint64_t unpredicted(int gt) const { return unpredicted_[gt]; }
  std::uint64_t total() const;

  // Throws ArgumentError on shape mismatch or labels >= num_categories that
  // are not the ignore label. Leaves the matrix unchanged on error.
  void Accumulate(const LabelMap& pred, const LabelMap& gt);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;

  // nullopt when the category is absent from both prediction and GT.
  std::optional<double> Iou(int category) const;

 private:
  int n_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> unpredicted_;
};

struct MiouResult {
  std::optional<double> all;
  std::optional<double> base;
  std::optional<double> novel;
  std::vector<std::optional<double>> per_category;
};

// Group means over categories with a defined IoU. Throws UndefinedResultError
// if no category has a defined IoU.
MiouResult MiouGroups(const ConfusionMatrix& cm, const CategorySplit& split);

}  // namespace retab

#endif  // RETAB_METRICS_HPP_
