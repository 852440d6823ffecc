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

#include "retab/metrics.hpp"

#include <numeric>
#include <string>

#include "retab/error.hpp"

namespace retab {
namespace {

double Ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> Mean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void BinaryMetrics::Add(bool predicted, bool actual) {
  if (predicted) {
    ++(actual ? tp : fp);
  } else {
    ++(actual ? fn : tn);
  }
}

BinaryMetrics& BinaryMetrics::operator+=(const BinaryMetrics& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

double BinaryMetrics::accuracy() const { return Ratio(tp + tn, total()); }
double BinaryMetrics::precision() const { return Ratio(tp, tp + fp); }
double BinaryMetrics::recall() const { return Ratio(tp, tp + fn); }

double BinaryMetrics::f1() const {
  // 2TP / (2TP + FP + FN) equals the harmonic mean of precision and recall.
  return Ratio(2 * tp, 2 * tp + fp + fn);
}

ConfusionMatrix::ConfusionMatrix(int num_categories) : n_(num_categories) {
  if (num_categories <= 0 || num_categories > kIgnoreLabel) {
    throw ArgumentError("number of categories must be in 1..255");
  }
  counts_.assign(static_cast<std::size_t>(n_) * n_, 0);
  unpredicted_.assign(n_, 0);
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}) +
         std::accumulate(unpredicted_.begin(), unpredicted_.end(), std::uint64_t{0});
}

void ConfusionMatrix::Accumulate(const LabelMap& pred, const LabelMap& gt) {
  if (!pred.same_shape(gt)) throw ArgumentError("prediction and ground truth shapes differ");
  auto check = [&](std::uint8_t v, const char* what) {
    if (v != kIgnoreLabel && v >= n_) {
      throw ArgumentError(std::string(what) + " label " + std::to_string(v) +
                          " out of range for " + std::to_string(n_) + " categories");
    }
  };
  for (std::size_t i = 0; i < gt.size(); ++i) {
    check(gt[i], "ground truth");
    check(pred[i], "predicted");
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == kIgnoreLabel) continue;
    if (pred[i] == kIgnoreLabel) {
      ++unpredicted_[gt[i]];
    } else {
      ++counts_[gt[i] * n_ + pred[i]];
    }
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_ != n_) throw ArgumentError("confusion matrices differ in size");
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  for (int c = 0; c < n_; ++c) unpredicted_[c] += other.unpredicted_[c];
  return *this;
}

std::optional<double> ConfusionMatrix::Iou(int category) const {
  std::uint64_t row = unpredicted_[category];
  std::uint64_t col = 0;
  for (int k = 0; k < n_; ++k) {
    row += count(category, k);
    col += count(k, category);
  }
  const std::uint64_t inter = count(category, category);
  const std::uint64_t uni = row + col - inter;
  if (uni == 0) return std::nullopt;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

MiouResult MiouGroups(const ConfusionMatrix& cm, const CategorySplit& split) {
  if (cm.num_categories() != split.num_categories) {
    throw ArgumentError("confusion matrix has " + std::to_string(cm.num_categories()) +
                        " categories, split has " + std::to_string(split.num_categories));
  }
  MiouResult result;
  std::vector<double> all, base, novel;
  for (int c = 0; c < cm.num_categories(); ++c) {
    const auto iou = cm.Iou(c);
    result.per_category.push_back(iou);
    if (!iou) continue;
    all.push_back(*iou);
    (split.is_novel(c) ? novel : base).push_back(*iou);
  }
  if (all.empty()) throw UndefinedResultError("mIoU undefined: every category is absent");
  result.all = Mean(all);
  result.base = Mean(base);
  result.novel = Mean(novel);
  return result;
}

}  // namespace retab
