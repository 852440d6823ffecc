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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "metric_fixtures.hpp"
#include "retab/error.hpp"

namespace retab {
namespace {

LabelMap Row(std::vector<std::uint8_t> v) {
  const int w = static_cast<int>(v.size());
  return LabelMap(1, w, std::move(v));
}

TEST(BinaryMetricsTest, ZeroDenominators) {
  BinaryMetrics m;
  EXPECT_EQ(m.accuracy(), 0.0);
  EXPECT_EQ(m.precision(), 0.0);
  EXPECT_EQ(m.recall(), 0.0);
  EXPECT_EQ(m.f1(), 0.0);
  m.Add(false, false);
  EXPECT_EQ(m.accuracy(), 1.0);
}

TEST(ConfusionMatrixTest, Tallies) {
  ConfusionMatrix cm(3);
  cm.Accumulate(LabelMap(2, 2, 2), LabelMap(2, 2, 2));
  EXPECT_EQ(cm.count(2, 2), 4u);
  cm.Accumulate(Row({2, 2}), Row({1, 2}));
  EXPECT_EQ(cm.count(1, 2), 1u);
  EXPECT_EQ(cm.count(2, 2), 5u);
}

TEST(ConfusionMatrixTest, IgnoredGtAndUnpredictedPixels) {
  ConfusionMatrix cm(3);
  cm.Accumulate(Row({1, kIgnoreLabel}), Row({kIgnoreLabel, 1}));
  EXPECT_EQ(cm.total(), 1u);
  EXPECT_EQ(cm.unpredicted(1), 1u);
  EXPECT_EQ(cm.Iou(1), 0.0);
}

TEST(ConfusionMatrixTest, ErrorsLeaveMatrixUntouched) {
  ConfusionMatrix cm(3);
  EXPECT_THROW(cm.Accumulate(Row({0, 3}), Row({0, 0})), ArgumentError);
  EXPECT_THROW(cm.Accumulate(Row({0}), Row({0, 0})), ArgumentError);
  EXPECT_EQ(cm.total(), 0u);
}

TEST(ConfusionMatrixTest, MergeIsAssociative) {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> label(0, 4);
  auto random_row = [&] {
    std::vector<std::uint8_t> v(16);
    for (auto& x : v) x = static_cast<std::uint8_t>(label(rng));
    return Row(v);
  };
  ConfusionMatrix a(5), b(5), c(5), all(5);
  for (ConfusionMatrix* m : {&a, &b, &c}) {
    const LabelMap p = random_row(), g = random_row();
    m->Accumulate(p, g);
    all.Accumulate(p, g);
  }
  ConfusionMatrix left = a;
  left += b;
  left += c;
  ConfusionMatrix right = b;
  right += c;
  right += a;
  EXPECT_EQ(left, all);
  EXPECT_EQ(right, all);
}

TEST(MiouGroupsTest, PlantedThreeClass) {
  const auto f = testing::PlantedThreeClassConfusion();
  EXPECT_EQ(f.cm.Iou(0), 1.0);
  EXPECT_EQ(f.cm.Iou(1), 0.5);
  EXPECT_EQ(f.cm.Iou(2), 0.0);
  const MiouResult r = MiouGroups(f.cm, f.split);
  EXPECT_EQ(r.all, 0.5);
  EXPECT_EQ(r.base, 0.75);
  EXPECT_EQ(r.novel, 0.0);
}

TEST(MiouGroupsTest, PerfectPrediction) {
  ConfusionMatrix cm(21);
  const LabelMap m = Row({0, 1, 2, 7, 15});
  cm.Accumulate(m, m);
  const MiouResult r = MiouGroups(cm, FoldCategories(0));
  EXPECT_EQ(r.all, 1.0);
  EXPECT_EQ(r.base, 1.0);
  EXPECT_EQ(r.novel, 1.0);
  EXPECT_FALSE(r.per_category[3].has_value());
}

TEST(MiouGroupsTest, AbsentGroupIsUndefined) {
  ConfusionMatrix cm(21);
  cm.Accumulate(Row({0, 9}), Row({0, 9}));
  const MiouResult r = MiouGroups(cm, FoldCategories(0));
  EXPECT_EQ(r.all, 1.0);
  EXPECT_FALSE(r.novel.has_value());
}

TEST(MiouGroupsTest, EverythingAbsent) {
  EXPECT_THROW(MiouGroups(ConfusionMatrix(21), FoldCategories(0)), UndefinedResultError);
  EXPECT_THROW(MiouGroups(ConfusionMatrix(3), FoldCategories(0)), ArgumentError);
}

TEST(MiouGroupsTest, PixelOrderDoesNotMatter) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> label(0, 20);
  std::vector<std::uint8_t> p(64), g(64);
  for (std::size_t k = 0; k < 64; ++k) {
    p[k] = static_cast<std::uint8_t>(label(rng));
    g[k] = static_cast<std::uint8_t>(label(rng));
  }
  ConfusionMatrix a(21), b(21);
  a.Accumulate(Row(p), Row(g));
  std::vector<std::size_t> perm(64);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::uint8_t> pp(64), gg(64);
  for (std::size_t k = 0; k < 64; ++k) {
    pp[k] = p[perm[k]];
    gg[k] = g[perm[k]];
  }
  b.Accumulate(Row(pp), Row(gg));
  EXPECT_EQ(a, b);
  for (int c = 0; c < 21; ++c) {
    if (auto iou = a.Iou(c)) {
      EXPECT_GE(*iou, 0.0);
      EXPECT_LE(*iou, 1.0);
    }
  }
}

TEST(MiouGroupsTest, EqualGroupMeansGiveSameOverall) {
  ConfusionMatrix cm(21);
  const LabelMap g = Row({0, 0, 1, 1, 6, 6});
  const LabelMap p = Row({0, 6, 1, 0, 6, 1});
  cm.Accumulate(p, g);
  const MiouResult r = MiouGroups(cm, FoldCategories(0));
  ASSERT_TRUE(r.base && r.novel);
  const auto nb = std::count_if(r.per_category.begin(), r.per_category.end(),
                                [](auto& v) { return v.has_value(); });
  ASSERT_EQ(nb, 3);
  EXPECT_NEAR(*r.all, (2.0 * *r.base + 1.0 * *r.novel) / 3.0, 1e-15);
}

}  // namespace
}  // namespace retab
