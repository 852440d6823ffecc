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

#include "retab/splits.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "retab/error.hpp"

namespace retab {
namespace {

CategorySplit MakeSplit(int fold_id, int num_categories, int first_novel, int last_novel) {
  CategorySplit split;
  split.fold_id = fold_id;
  split.num_categories = num_categories;
  for (int c = 0; c < num_categories; ++c) {
    if (c >= first_novel && c <= last_novel) {
      split.novel.push_back(c);
    } else {
      split.base.push_back(c);
    }
  }
  return split;
}

}  // namespace

const std::vector<std::string>& VocCategoryNames() {
  static const std::vector<std::string> names = {
      "background", "aeroplane", "bicycle", "bird",  "boat",        "bottle", "bus",
      "car",        "cat",       "chair",   "cow",   "diningtable", "dog",    "horse",
      "motorbike",  "person",    "pottedplant", "sheep", "sofa",    "train",  "tvmonitor"};
  return names;
}

bool CategorySplit::is_novel(int category) const {
  return std::binary_search(novel.begin(), novel.end(), category);
}

bool CategorySplit::is_base(int category) const {
  return std::binary_search(base.begin(), base.end(), category);
}

CategorySplit FoldCategories(int fold_id, int num_foreground) {
  if (fold_id < 0 || fold_id > 3) {
    throw ArgumentError("fold_id must be in 0..3, got " + std::to_string(fold_id));
  }
  const int first = 5 * fold_id + 1;
  if (first + 4 > num_foreground) {
    throw ArgumentError("fold " + std::to_string(fold_id) + " needs at least " +
                        std::to_string(first + 4) + " foreground categories");
  }
  return MakeSplit(fold_id, num_foreground + 1, first, first + 4);
}

CategorySplit ExtendedFoldCategories(ExtendedFold fold) {
  switch (fold) {
    case ExtendedFold::kFold4: return MakeSplit(4, kVocForegroundCategories + 1, 1, 10);
    case ExtendedFold::kFold5: return MakeSplit(5, kVocForegroundCategories + 1, 1, 15);
  }
  throw ArgumentError("unknown extended fold");
}

CategorySplit SplitForFold(int fold_id) {
  if (fold_id == 4) return ExtendedFoldCategories(ExtendedFold::kFold4);
  if (fold_id == 5) return ExtendedFoldCategories(ExtendedFold::kFold5);
  if (fold_id < 0 || fold_id > 5) {
    throw ArgumentError("fold must be in 0..5, got " + std::to_string(fold_id));
  }
  return FoldCategories(fold_id);
}

SamplePartition PartitionSamples(const SampleLabels& samples, const CategorySplit& split) {
  SamplePartition out;
  for (const auto& [id, categories] : samples) {
    bool novel = false;
    for (int c : categories) {
      if (c < 0 || c >= split.num_categories) {
        throw ArgumentError("sample '" + id + "' has unknown category index " + std::to_string(c));
      }
      novel = novel || split.is_novel(c);
    }
    (novel ? out.novel_ids : out.base_ids).push_back(id);
  }
  return out;
}

SampleLabels LoadSampleManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_object()) {
    throw FormatError("manifest " + path.string() + " lacks a \"samples\" object");
  }
  SampleLabels samples;
  for (const auto& [id, labels] : doc["samples"].items()) {
    if (!labels.is_array()) throw FormatError("manifest entry '" + id + "' is not a list");
    auto& out = samples[id];
    for (const auto& c : labels) {
      if (!c.is_number_integer()) {
        throw FormatError("manifest entry '" + id + "' has a non-integer category");
      }
      out.push_back(c.get<int>());
    }
  }
  return samples;
}

}  // namespace retab
