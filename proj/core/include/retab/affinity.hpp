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

#ifndef RETAB_AFFINITY_HPP_
#define RETAB_AFFINITY_HPP_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "retab/grid.hpp"
#include "retab/metrics.hpp"

namespace retab {

inline constexpr double kDefaultGamma = 5.0;
inline constexpr double kDefaultFgThresh = 0.30;
inline constexpr double kDefaultBgThresh = 0.05;

// Unordered pixel pair stored canonically with i < j (flat row-major indices).
struct PixelPair {
  std::int32_t i = 0;
  std::int32_t j = 0;
  auto operator<=>(const PixelPair&) const = default;
};

// Neighbor set: all pixel pairs closer than `gamma` in Euclidean distance.
class NeighborPairs {
 public:
  // Validates canonical order (i < j, strictly increasing) and index range.
  // A 0 x 0 grid means "dimensions unknown", as for tables read back from
  // pair files; only ordering is checked then.
  NeighborPairs(int height, int width, double gamma, std::vector<PixelPair> pairs);

  int height() const { return height_; }
  int width() const { return width_; }
  double gamma() const { return gamma_; }
  std::size_t size() const { return pairs_.size(); }
  const std::vector<PixelPair>& pairs() const { return pairs_; }
  const PixelPair& operator[](std::size_t k) const { return pairs_[k]; }

  bool same_pairs(const NeighborPairs& other) const { return pairs_ == other.pairs_; }

 private:
  int height_;
  int width_;
  double gamma_;
  std::vector<PixelPair> pairs_;
};

// {(i, j) | d(i, j) < gamma, i != j}, canonical order. Pixels near the grid
// border simply have fewer neighbors.
NeighborPairs BuildNeighbors(int height, int width, double gamma = kDefaultGamma);

enum class AffinityLabel : std::int8_t { kUndefined = -1, kNegative = 0, kPositive = 1 };

// Provenance of a positive pseudo label: both endpoints confident background
// (kBackground) or otherwise (kForeground). kUnknown when not tracked.
enum class PairGroup : std::uint8_t { kUnknown, kForeground, kBackground };

// Per-pair predicted affinities and/or labels over a shared neighbor set.
// Each per-pair vector is either empty (absent) or has one entry per pair.
struct PairAffinityTable {
  std::shared_ptr<const NeighborPairs> pairs;
  std::vector<double> affinity;
  std::vector<AffinityLabel> labels;
  std::vector<PairGroup> groups;

  std::size_t size() const { return pairs ? pairs->size() : 0; }
  bool has_affinity() const { return !affinity.empty() || size() == 0; }
  bool has_labels() const { return !labels.empty() || size() == 0; }
  std::size_t defined_label_count() const;

  // Throws ArgumentError when a present vector has the wrong length.
  void Validate() const;
};

// a_ij = exp(-||f_i - f_j||_1). Underflow is clamped to the smallest
// positive double so affinities stay in (0, 1].
PairAffinityTable AffinityFromFeatures(const FeatureMap& features,
                                       std::shared_ptr<const NeighborPairs> pairs);

// Label 1 iff both endpoints share a category, 0 otherwise; undefined when
// either endpoint is the ignore label. `seg` must be at pair-grid resolution.
PairAffinityTable GtAffinityLabels(const LabelMap& seg,
                                   std::shared_ptr<const NeighborPairs> pairs);

// Dual-threshold pseudo labels from max-normalized CAMs. Channel k of `cams`
// belongs to category `image_labels[k]`. A pixel is confident in its argmax
// category when the max score >= fg_thresh, confident background when the
// max score <= bg_thresh, and neutral otherwise. Pairs of confident pixels
// get 1 (same category) or 0; pairs touching a neutral pixel stay undefined.
PairAffinityTable PseudoAffinityLabels(const ResponseStack& cams,
                                       const std::vector<int>& image_labels,
                                       std::shared_ptr<const NeighborPairs> pairs,
                                       double fg_thresh = kDefaultFgThresh,
                                       double bg_thresh = kDefaultBgThresh);

// Drops labels of pairs with an endpoint in the boundary region. Affinities
// are untouched.
PairAffinityTable FilterPairsNbd(const PairAffinityTable& table, const RegionMask& mask);

// Cross-entropy over labeled pairs, averaged with equal weight over the
// non-empty groups {fg positives, bg positives, negatives}. Positives without
// provenance count as fg, so GT tables reduce to the two-group form.
double AffinityLoss(const PairAffinityTable& table, double eps = 1e-7);

// Binarizes predictions at a >= 0.5 and scores them against GT labels on
// pairs whose GT label is defined.
BinaryMetrics EvalAffinity(const PairAffinityTable& pred, const PairAffinityTable& gt);

// Nearest-neighbor resize sampling source pixel floor((y + 0.5) * H / h).
LabelMap ResizeNearest(const LabelMap& labels, int height, int width);

// Pair tables on disk: <prefix>_i.npy, <prefix>_j.npy (int32) and
// <prefix>_values.npy (float32). Label values are 1, 0 and -1 (undefined).
enum class PairValues { kAffinity, kLabels };

void WritePairTable(const std::filesystem::path& prefix, const PairAffinityTable& table,
                    PairValues which);
PairAffinityTable ReadPairTable(const std::filesystem::path& prefix, PairValues which);

}  // namespace retab

#endif  // RETAB_AFFINITY_HPP_
