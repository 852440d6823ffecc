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

#ifndef RETAB_PSEUDOLABEL_HPP_
#define RETAB_PSEUDOLABEL_HPP_

#include <vector>

#include "retab/grid.hpp"

namespace retab {

inline constexpr double kDefaultBgAlpha = 16.0;

// Clamps negatives to 0 and divides every channel by its maximum (channels
// that are all zero stay zero).
ResponseStack MaxNormalize(const ResponseStack& responses);

// Corner-aligned bilinear resampling: output row y samples source row
// y * (H - 1) / (out_h - 1).
ResponseStack UpsampleBilinear(const ResponseStack& responses, int out_height, int out_width);

// Score channels with explicit category tags. Channel 0 is background.
struct ScoreStack {
  ResponseStack scores;
  std::vector<int> categories;  // categories[k] tags scores channel k; sorted, [0] == 0
};

// Background score (1 - max_fg)^bg_alpha prepended to the foreground
// channels. `categories[k]` tags channel k of `revised`; channels are
// reordered so tags ascend.
ScoreStack AssembleScores(const ResponseStack& revised, const std::vector<int>& categories,
                          double bg_alpha = kDefaultBgAlpha);

// Per-pixel tag of the highest channel; ties go to the lowest tag.
LabelMap ArgmaxLabels(const ScoreStack& stack);

// Pixels labelled background in `gt_with_bg` and predicted as a novel
// category take the prediction; every other pixel keeps its GT label.
LabelMap SelfTrainRelabel(const LabelMap& gt_with_bg, const LabelMap& predicted,
                          const std::vector<int>& novel_set);

}  // namespace retab

#endif  // RETAB_PSEUDOLABEL_HPP_
