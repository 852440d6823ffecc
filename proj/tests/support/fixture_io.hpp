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

#ifndef RETAB_TESTS_SUPPORT_FIXTURE_IO_HPP_
#define RETAB_TESTS_SUPPORT_FIXTURE_IO_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "retab/pipeline.hpp"
#include "retab/tensor_io.hpp"

namespace retab::testing {

inline NpyArray FeaturesToNpy(const FeatureMap& f) {
  std::vector<float> v;
  v.reserve(f.pixels() * f.depth());
  for (std::size_t i = 0; i < f.pixels(); ++i) {
    for (double x : f.pixel(i)) v.push_back(static_cast<float>(x));
  }
  return NpyArray({static_cast<std::size_t>(f.height()), static_cast<std::size_t>(f.width()),
                   static_cast<std::size_t>(f.depth())},
                  std::move(v));
}

// Writes the arrays of one sample under dir/<id>_*.npy and returns a spec
// with paths relative to dir.
inline SampleSpec WriteSampleFiles(const std::filesystem::path& dir, const std::string& id,
                                   const SampleInputs& in) {
  std::filesystem::create_directories(dir);
  SampleSpec s;
  s.id = id;
  s.cam = id + "_cam.npy";
  s.features = id + "_features.npy";
  s.boundary = id + "_boundary.npy";
  s.categories = in.categories;
  WriteTensor(dir / s.cam, FromResponseStack(in.cam));
  WriteTensor(dir / s.features, FeaturesToNpy(in.features));
  WriteTensor(dir / s.boundary, FromProbMap(in.boundary));
  if (in.gt) {
    s.gt = id + "_gt.npy";
    WriteTensor(dir / *s.gt, FromLabelMap(*in.gt));
  }
  s.output_size = in.output_size;
  return s;
}

inline std::string ManifestJson(const std::vector<SampleSpec>& specs) {
  std::string out = "{\"samples\": [\n";
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    out += "  {\"id\": \"" + s.id + "\", \"cam\": \"" + s.cam.generic_string() +
           "\", \"features\": \"" + s.features.generic_string() + "\", \"boundary\": \"" +
           s.boundary.generic_string() + "\", \"categories\": [";
    for (std::size_t c = 0; c < s.categories.size(); ++c) {
      out += (c ? ", " : "") + std::to_string(s.categories[c]);
    }
    out += "]";
    if (s.gt) out += ", \"gt\": \"" + s.gt->generic_string() + "\"";
    if (s.output_size) {
      out += ", \"output_size\": [" + std::to_string(s.output_size->first) + ", " +
             std::to_string(s.output_size->second) + "]";
    }
    out += k + 1 < specs.size() ? "},\n" : "}\n";
  }
  return out + "]}\n";
}

inline std::filesystem::path WriteManifest(const std::filesystem::path& dir,
                                           const std::vector<SampleSpec>& specs) {
  const auto path = dir / "manifest.json";
  std::ofstream(path) << ManifestJson(specs);
  return path;
}

// A random sample whose GT has two categories drawn from {novel 2, base 9}.
inline SampleInputs RandomSample(std::mt19937& rng, int h, int w) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SampleInputs in;
  std::vector<double> cam(static_cast<std::size_t>(h) * w * 2), feat(static_cast<std::size_t>(h) * w * 3);
  for (auto& v : cam) v = u(rng);
  for (auto& v : feat) v = u(rng) * 2.0;
  in.cam = ResponseStack(h, w, 2, std::move(cam));
  in.categories = {9, 2};
  in.features = FeatureMap(h, w, 3, std::move(feat));
  in.boundary = BoundaryProbMap(h, w);
  for (auto& v : in.boundary.values()) v = u(rng);
  LabelMap gt(h * 2, w * 2, 0);
  for (int y = 0; y < h * 2; ++y) {
    for (int x = w; x < w * 2; ++x) gt.at(y, x) = y < h ? 9 : 2;
  }
  in.gt = std::move(gt);
  return in;
}

}  // namespace retab::testing

#endif  // RETAB_TESTS_SUPPORT_FIXTURE_IO_HPP_
