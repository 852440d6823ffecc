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

#include "retab/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "retab/error.hpp"
#include "retab/tensor_io.hpp"

namespace retab {
namespace {

constexpr int kNeutral = -1;

std::shared_ptr<const NeighborPairs> RequirePairs(std::shared_ptr<const NeighborPairs> pairs) {
  if (!pairs) throw ArgumentError("pair table has no neighbor set");
  return pairs;
}

void RequireGrid(const NeighborPairs& pairs, int height, int width, const char* what) {
  if (pairs.height() != height || pairs.width() != width) {
    throw ArgumentError(std::string(what) + " grid " + std::to_string(height) + "x" +
                        std::to_string(width) + " does not match pair grid " +
                        std::to_string(pairs.height()) + "x" + std::to_string(pairs.width()));
  }
}

std::filesystem::path WithSuffix(const std::filesystem::path& prefix, const char* suffix) {
  return prefix.string() + suffix;
}

}  // namespace

NeighborPairs::NeighborPairs(int height, int width, double gamma, std::vector<PixelPair> pairs)
    : height_(height), width_(width), gamma_(gamma), pairs_(std::move(pairs)) {
  if (height < 0 || width < 0) throw ArgumentError("negative grid dimension");
  const std::int64_t n = static_cast<std::int64_t>(height) * width;
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto& p = pairs_[k];
    if (p.i < 0 || p.i >= p.j) throw ArgumentError("pairs must satisfy 0 <= i < j");
    if (k > 0 && !(pairs_[k - 1] < p)) throw ArgumentError("pairs must be sorted and unique");
    if (n > 0 && p.j >= n) throw ArgumentError("pair index outside the grid");
  }
}

NeighborPairs BuildNeighbors(int height, int width, double gamma) {
  if (height < 1 || width < 1) throw ArgumentError("grid dimensions must be >= 1");
  if (!(gamma > 0.0)) throw ArgumentError("search radius gamma must be > 0");
  const double gamma_sq = gamma * gamma;
  const int reach = static_cast<int>(std::ceil(gamma));

  // Forward offsets (later in row-major order), sorted so that j ascends.
  std::vector<std::pair<int, int>> offsets;
  for (int dy = 0; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if (dy == 0 && dx <= 0) continue;
      if (static_cast<double>(dy * dy + dx * dx) < gamma_sq) offsets.emplace_back(dy, dx);
    }
  }

  std::vector<PixelPair> pairs;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::int32_t i = y * width + x;
      for (const auto& [dy, dx] : offsets) {
        const int yy = y + dy;
        const int xx = x + dx;
        if (yy >= height || xx < 0 || xx >= width) continue;
        pairs.push_back({i, yy * width + xx});
      }
    }
  }
  return NeighborPairs(height, width, gamma, std::move(pairs));
}

std::size_t PairAffinityTable::defined_label_count() const {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) {
    return l != AffinityLabel::kUndefined;
  }));
}

void PairAffinityTable::Validate() const {
  const std::size_t n = size();
  if (!affinity.empty() && affinity.size() != n) throw ArgumentError("affinity length mismatch");
  if (!labels.empty() && labels.size() != n) throw ArgumentError("label length mismatch");
  if (!groups.empty() && groups.size() != n) throw ArgumentError("group length mismatch");
}

PairAffinityTable AffinityFromFeatures(const FeatureMap& features,
                                       std::shared_ptr<const NeighborPairs> pairs) {
  pairs = RequirePairs(std::move(pairs));
  RequireGrid(*pairs, features.height(), features.width(), "feature");
  PairAffinityTable table;
  table.affinity.reserve(pairs->size());
  for (const auto& p : pairs->pairs()) {
    const auto fi = features.pixel(p.i);
    const auto fj = features.pixel(p.j);
    double l1 = 0.0;
    for (std::size_t d = 0; d < fi.size(); ++d) l1 += std::abs(fi[d] - fj[d]);
    table.affinity.push_back(std::max(std::exp(-l1), std::numeric_limits<double>::min()));
  }
  table.pairs = std::move(pairs);
  return table;
}

PairAffinityTable GtAffinityLabels(const LabelMap& seg,
                                   std::shared_ptr<const NeighborPairs> pairs) {
  pairs = RequirePairs(std::move(pairs));
  RequireGrid(*pairs, seg.height(), seg.width(), "segmentation");
  PairAffinityTable table;
  table.labels.reserve(pairs->size());
  table.groups.reserve(pairs->size());
  for (const auto& p : pairs->pairs()) {
    const std::uint8_t a = seg[p.i];
    const std::uint8_t b = seg[p.j];
    if (a == kIgnoreLabel || b == kIgnoreLabel) {
      table.labels.push_back(AffinityLabel::kUndefined);
      table.groups.push_back(PairGroup::kUnknown);
    } else if (a == b) {
      table.labels.push_back(AffinityLabel::kPositive);
      table.groups.push_back(a == kBackground ? PairGroup::kBackground : PairGroup::kForeground);
    } else {
      table.labels.push_back(AffinityLabel::kNegative);
      table.groups.push_back(PairGroup::kUnknown);
    }
  }
  table.pairs = std::move(pairs);
  return table;
}

PairAffinityTable PseudoAffinityLabels(const ResponseStack& cams,
                                       const std::vector<int>& image_labels,
                                       std::shared_ptr<const NeighborPairs> pairs,
                                       double fg_thresh, double bg_thresh) {
  pairs = RequirePairs(std::move(pairs));
  RequireGrid(*pairs, cams.height(), cams.width(), "CAM");
  if (!(0.0 < bg_thresh && bg_thresh < fg_thresh && fg_thresh < 1.0)) {
    throw ArgumentError("thresholds must satisfy 0 < bg_thresh < fg_thresh < 1");
  }
  if (static_cast<int>(image_labels.size()) != cams.channels()) {
    throw ArgumentError("CAM has " + std::to_string(cams.channels()) + " channels but " +
                        std::to_string(image_labels.size()) + " image labels were given");
  }
  for (int c : image_labels) {
    if (c <= 0 || c >= kIgnoreLabel) {
      throw ArgumentError("CAM channel category " + std::to_string(c) + " is not foreground");
    }
  }

  // Per-pixel confident category (0 = background) or kNeutral.
  std::vector<int> confident(cams.pixels(), kBackground);
  for (std::size_t i = 0; i < cams.pixels(); ++i) {
    double best = 0.0;
    int best_channel = -1;
    for (int k = 0; k < cams.channels(); ++k) {
      const double v = cams.at(k, i);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ArgumentError("CAM values must be max-normalized to [0, 1]");
      }
      if (best_channel < 0 || v > best) {
        best = v;
        best_channel = k;
      }
    }
    if (best_channel >= 0 && best >= fg_thresh) {
      confident[i] = image_labels[best_channel];
    } else if (best <= bg_thresh) {
      confident[i] = kBackground;
    } else {
      confident[i] = kNeutral;
    }
  }

  PairAffinityTable table;
  table.labels.reserve(pairs->size());
  table.groups.reserve(pairs->size());
  for (const auto& p : pairs->pairs()) {
    const int a = confident[p.i];
    const int b = confident[p.j];
    if (a == kNeutral || b == kNeutral) {
      table.labels.push_back(AffinityLabel::kUndefined);
      table.groups.push_back(PairGroup::kUnknown);
    } else if (a == b) {
      table.labels.push_back(AffinityLabel::kPositive);
      table.groups.push_back(a == kBackground ? PairGroup::kBackground : PairGroup::kForeground);
    } else {
      table.labels.push_back(AffinityLabel::kNegative);
      table.groups.push_back(PairGroup::kUnknown);
    }
  }
  table.pairs = std::move(pairs);
  return table;
}

PairAffinityTable FilterPairsNbd(const PairAffinityTable& table, const RegionMask& mask) {
  table.Validate();
  RequirePairs(table.pairs);
  RequireGrid(*table.pairs, mask.height(), mask.width(), "mask");
  if (!table.has_labels()) throw ArgumentError("pair table has no labels to filter");
  PairAffinityTable out = table;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& p = (*out.pairs)[k];
    if (mask.is_boundary(p.i) || mask.is_boundary(p.j)) {
      out.labels[k] = AffinityLabel::kUndefined;
      if (!out.groups.empty()) out.groups[k] = PairGroup::kUnknown;
    }
  }
  return out;
}

double AffinityLoss(const PairAffinityTable& table, double eps) {
  table.Validate();
  if (table.labels.empty() || table.affinity.empty()) {
    throw ArgumentError("affinity loss needs both affinities and labels");
  }
  if (!(eps > 0.0 && eps < 0.5)) throw ArgumentError("eps must lie in (0, 0.5)");
  double sum_fg = 0.0, sum_bg = 0.0, sum_neg = 0.0;
  std::size_t n_fg = 0, n_bg = 0, n_neg = 0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const double a = std::clamp(table.affinity[k], eps, 1.0 - eps);
    switch (table.labels[k]) {
      case AffinityLabel::kUndefined:
        break;
      case AffinityLabel::kNegative:
        sum_neg += std::log1p(-a);
        ++n_neg;
        break;
      case AffinityLabel::kPositive:
        if (!table.groups.empty() && table.groups[k] == PairGroup::kBackground) {
          sum_bg += std::log(a);
          ++n_bg;
        } else {
          sum_fg += std::log(a);
          ++n_fg;
        }
        break;
    }
  }
  double total = 0.0;
  int groups = 0;
  for (auto [sum, n] : {std::pair{sum_fg, n_fg}, std::pair{sum_bg, n_bg}, std::pair{sum_neg, n_neg}}) {
    if (n == 0) continue;
    total += -sum / static_cast<double>(n);
    ++groups;
  }
  if (groups == 0) throw ArgumentError("affinity loss needs at least one defined label");
  return total / groups;
}

BinaryMetrics EvalAffinity(const PairAffinityTable& pred, const PairAffinityTable& gt) {
  pred.Validate();
  gt.Validate();
  RequirePairs(pred.pairs);
  RequirePairs(gt.pairs);
  if (pred.pairs != gt.pairs && !pred.pairs->same_pairs(*gt.pairs)) {
    throw ArgumentError("prediction and ground truth cover different pair sets");
  }
  if (pred.affinity.empty() && pred.size() > 0) throw ArgumentError("prediction lacks affinities");
  if (gt.labels.empty() && gt.size() > 0) throw ArgumentError("ground truth lacks labels");
  BinaryMetrics m;
  for (std::size_t k = 0; k < gt.size(); ++k) {
    if (gt.labels[k] == AffinityLabel::kUndefined) continue;
    m.Add(pred.affinity[k] >= 0.5, gt.labels[k] == AffinityLabel::kPositive);
  }
  return m;
}

LabelMap ResizeNearest(const LabelMap& labels, int height, int width) {
  if (height < 1 || width < 1) throw ArgumentError("target dimensions must be >= 1");
  if (labels.height() < 1 || labels.width() < 1) throw ArgumentError("empty label map");
  LabelMap out(height, width);
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>((2 * static_cast<std::int64_t>(y) + 1) * labels.height() /
                                    (2 * static_cast<std::int64_t>(height)));
    for (int x = 0; x < width; ++x) {
      const int sx = static_cast<int>((2 * static_cast<std::int64_t>(x) + 1) * labels.width() /
                                      (2 * static_cast<std::int64_t>(width)));
      out.at(y, x) = labels.at(sy, sx);
    }
  }
  return out;
}

void WritePairTable(const std::filesystem::path& prefix, const PairAffinityTable& table,
                    PairValues which) {
  table.Validate();
  RequirePairs(table.pairs);
  const std::size_t n = table.size();
  std::vector<std::int32_t> is(n), js(n);
  std::vector<float> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    is[k] = (*table.pairs)[k].i;
    js[k] = (*table.pairs)[k].j;
  }
  if (which == PairValues::kAffinity) {
    if (table.affinity.empty() && n > 0) throw ArgumentError("pair table lacks affinities");
    for (std::size_t k = 0; k < n; ++k) values[k] = static_cast<float>(table.affinity[k]);
  } else {
    if (table.labels.empty() && n > 0) throw ArgumentError("pair table lacks labels");
    for (std::size_t k = 0; k < n; ++k) values[k] = static_cast<float>(table.labels[k]);
  }
  WriteTensor(WithSuffix(prefix, "_i.npy"), NpyArray({n}, std::move(is)));
  WriteTensor(WithSuffix(prefix, "_j.npy"), NpyArray({n}, std::move(js)));
  WriteTensor(WithSuffix(prefix, "_values.npy"), NpyArray({n}, std::move(values)));
}

PairAffinityTable ReadPairTable(const std::filesystem::path& prefix, PairValues which) {
  const NpyArray is = ReadTensor(WithSuffix(prefix, "_i.npy"));
  const NpyArray js = ReadTensor(WithSuffix(prefix, "_j.npy"));
  const NpyArray vs = ReadTensor(WithSuffix(prefix, "_values.npy"));
  if (is.rank() != 1 || js.size() != is.size() || vs.size() != is.size()) {
    throw FormatError("pair table arrays under " + prefix.string() + " disagree in length");
  }
  const auto iv = is.values<std::int32_t>();
  const auto jv = js.values<std::int32_t>();
  const auto values = vs.values<float>();
  std::vector<PixelPair> pairs(iv.size());
  for (std::size_t k = 0; k < iv.size(); ++k) pairs[k] = {iv[k], jv[k]};

  PairAffinityTable table;
  table.pairs = std::make_shared<const NeighborPairs>(0, 0, 0.0, std::move(pairs));
  if (which == PairValues::kAffinity) {
    table.affinity.assign(values.begin(), values.end());
  } else {
    table.labels.reserve(values.size());
    for (float v : values) {
      if (v == 1.0f) {
        table.labels.push_back(AffinityLabel::kPositive);
      } else if (v == 0.0f) {
        table.labels.push_back(AffinityLabel::kNegative);
      } else if (v == -1.0f) {
        table.labels.push_back(AffinityLabel::kUndefined);
      } else {
        throw FormatError("pair label values must be 1, 0 or -1");
      }
    }
  }
  return table;
}

}  // namespace retab
