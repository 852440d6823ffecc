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

#include "retab/pseudolabel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "retab/error.hpp"

namespace retab {
namespace {

// Exact when lo == hi, so constant channels stay constant.
double Lerp(double lo, double hi, double t) { return lo + (hi - lo) * t; }

}  // namespace

ResponseStack MaxNormalize(const ResponseStack& responses) {
  ResponseStack out = responses;
  for (int c = 0; c < out.channels(); ++c) {
    auto ch = out.channel(c);
    double mx = 0.0;
    for (auto& v : ch) {
      v = std::max(v, 0.0);
      mx = std::max(mx, v);
    }
    if (mx > 0.0) {
      for (auto& v : ch) v /= mx;
    }
  }
  return out;
}

ResponseStack UpsampleBilinear(const ResponseStack& responses, int out_height, int out_width) {
  if (out_height < 1 || out_width < 1) throw ArgumentError("target dimensions must be >= 1");
  const int h = responses.height();
  const int w = responses.width();
  if (h < 1 || w < 1) throw ArgumentError("cannot resample an empty response stack");

  struct Tap {
    int lo;
    int hi;
    double frac;
  };
  auto taps = [](int in, int out) {
    std::vector<Tap> t(out);
    for (int k = 0; k < out; ++k) {
      const double src = out == 1 ? 0.0 : static_cast<double>(k) * (in - 1) / (out - 1);
      const int lo = std::min(static_cast<int>(std::floor(src)), in - 1);
      t[k] = {lo, std::min(lo + 1, in - 1), src - lo};
    }
    return t;
  };
  const auto ty = taps(h, out_height);
  const auto tx = taps(w, out_width);

  ResponseStack out(out_height, out_width, responses.channels());
  for (int c = 0; c < responses.channels(); ++c) {
    const auto in = responses.channel(c);
    auto dst = out.channel(c);
    for (int y = 0; y < out_height; ++y) {
      const auto& a = ty[y];
      for (int x = 0; x < out_width; ++x) {
        const auto& b = tx[x];
        dst[static_cast<std::size_t>(y) * out_width + x] =
            Lerp(Lerp(in[a.lo * w + b.lo], in[a.lo * w + b.hi], b.frac),
                 Lerp(in[a.hi * w + b.lo], in[a.hi * w + b.hi], b.frac), a.frac);
      }
    }
  }
  return out;
}

ScoreStack AssembleScores(const ResponseStack& revised, const std::vector<int>& categories,
                          double bg_alpha) {
  if (categories.empty()) throw ArgumentError("at least one foreground category is required");
  if (static_cast<int>(categories.size()) != revised.channels()) {
    throw ArgumentError("revised responses have " + std::to_string(revised.channels()) +
                        " channels but " + std::to_string(categories.size()) + " categories");
  }
  if (!(bg_alpha > 0.0)) throw ArgumentError("bg_alpha must be > 0");

  std::vector<int> order(categories.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return categories[a] < categories[b]; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int c = categories[order[k]];
    if (c <= 0 || c >= kIgnoreLabel) {
      throw ArgumentError("category " + std::to_string(c) + " is not a foreground index");
    }
    if (k > 0 && categories[order[k - 1]] == c) {
      throw ArgumentError("duplicate category " + std::to_string(c));
    }
  }

  const std::size_t n = revised.pixels();
  ScoreStack stack{ResponseStack(revised.height(), revised.width(), revised.channels() + 1), {0}};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto src = revised.channel(order[k]);
    std::copy(src.begin(), src.end(), stack.scores.channel(static_cast<int>(k) + 1).begin());
    stack.categories.push_back(categories[order[k]]);
  }
  auto bg = stack.scores.channel(0);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = 0.0;
    for (int c = 0; c < revised.channels(); ++c) mx = std::max(mx, revised.at(c, i));
    bg[i] = std::pow(std::max(0.0, 1.0 - mx), bg_alpha);
  }
  return stack;
}

LabelMap ArgmaxLabels(const ScoreStack& stack) {
  const auto& s = stack.scores;
  if (static_cast<int>(stack.categories.size()) != s.channels() || s.channels() == 0) {
    throw ArgumentError("score stack tags do not match its channels");
  }
  if (!std::is_sorted(stack.categories.begin(), stack.categories.end())) {
    throw ArgumentError("score stack tags must be sorted");
  }
  LabelMap labels(s.height(), s.width(), kBackground);
  for (std::size_t i = 0; i < s.pixels(); ++i) {
    int best = 0;
    for (int c = 1; c < s.channels(); ++c) {
      if (s.at(c, i) > s.at(best, i)) best = c;
    }
    labels[i] = static_cast<std::uint8_t>(stack.categories[best]);
  }
  return labels;
}

LabelMap SelfTrainRelabel(const LabelMap& gt_with_bg, const LabelMap& predicted,
                          const std::vector<int>& novel_set) {
  if (!gt_with_bg.same_shape(predicted)) {
    throw ArgumentError("GT and prediction shapes differ");
  }
  LabelMap out = gt_with_bg;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] != kBackground) continue;
    const int p = predicted[i];
    if (std::find(novel_set.begin(), novel_set.end(), p) != novel_set.end()) {
      out[i] = static_cast<std::uint8_t>(p);
    }
  }
  return out;
}

}  // namespace retab
