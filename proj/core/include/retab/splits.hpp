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

#ifndef RETAB_SPLITS_HPP_
#define RETAB_SPLITS_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace retab {

// Category indices follow the VOC ordering: 0 = background, 1 = aeroplane,
// ..., 20 = tvmonitor.
inline constexpr int kVocForegroundCategories = 20;

const std::vector<std::string>& VocCategoryNames();

// Base / novel partition of the category set. Background is always base.
struct CategorySplit {
  int fold_id = 0;
  int num_categories = 0;
  std::vector<int> base;   // sorted
  std::vector<int> novel;  // sorted

  bool is_novel(int category) const;
  bool is_base(int category) const;
};

// Basic folds 0..3: novel = {5f+1, ..., 5f+5}.
CategorySplit FoldCategories(int fold_id, int num_foreground = kVocForegroundCategories);

enum class ExtendedFold { kFold4, kFold5 };

// fold4: novel = {1..10}; fold5: novel = {1..15}.
CategorySplit ExtendedFoldCategories(ExtendedFold fold);

// Dispatches 0..3 to FoldCategories and 4/5 to ExtendedFoldCategories.
CategorySplit SplitForFold(int fold_id);

using SampleLabels = std::map<std::string, std::vector<int>>;

struct SamplePartition {
  std::vector<std::string> base_ids;
  std::vector<std::string> novel_ids;
};

// A sample is novel iff its image-level label set contains a novel category.
// Output ids are sorted, so the result does not depend on input order.
SamplePartition PartitionSamples(const SampleLabels& samples, const CategorySplit& split);

// Reads `{ "samples": { "<id>": [int, ...] } }`.
SampleLabels LoadSampleManifest(const std::filesystem::path& path);

}  // namespace retab

#endif  // RETAB_SPLITS_HPP_
