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

#ifndef RETAB_PIPELINE_HPP_
#define RETAB_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "retab/affinity.hpp"
#include "retab/boundary.hpp"
#include "retab/metrics.hpp"
#include "retab/propagation.hpp"
#include "retab/pseudolabel.hpp"

namespace retab {

struct PipelineConfig {
  double tau = kDefaultTau;
  double gamma = kDefaultGamma;
  double beta = kDefaultBeta;
  int iters = kDefaultIters;
  std::optional<int> stage2_iters;
  double fg_thresh = kDefaultFgThresh;
  double bg_thresh = kDefaultBgThresh;
  double bg_alpha = kDefaultBgAlpha;
  int fold = 0;
  Strategy strategy = Strategy::kBtp;
  int threads = 0;  // 0 = RETAB_THREADS or hardware concurrency

  // Throws ArgumentError naming the offending field.
  void Validate() const;
  PropagationParams propagation() const { return {beta, iters, stage2_iters}; }
};

// JSON object with any subset of the config fields; missing fields keep
// their defaults, unknown fields are an ArgumentError.
PipelineConfig ConfigFromJson(const std::string& text, PipelineConfig base = {});
std::string ConfigToJson(const PipelineConfig& config);

// One sample of a pipeline manifest. Paths are resolved against the
// manifest's directory.
struct SampleSpec {
  std::string id;
  std::filesystem::path cam;        // <f4, H x W x C
  std::vector<int> categories;      // category of each CAM channel
  std::filesystem::path features;   // <f4, H x W x D
  std::filesystem::path boundary;   // <f4, H x W, probabilities
  std::optional<std::filesystem::path> gt;  // |u1, label map at output size
  std::optional<std::pair<int, int>> output_size;
};

// {"samples": [{"id", "cam", "categories", "features", "boundary",
//               "gt"?, "output_size"?: [h, w]}, ...]}
std::vector<SampleSpec> LoadPipelineManifest(const std::filesystem::path& path);

struct SampleInputs {
  ResponseStack cam;
  std::vector<int> categories;
  FeatureMap features;
  BoundaryProbMap boundary;
  std::optional<LabelMap> gt;
  std::optional<std::pair<int, int>> output_size;
};

SampleInputs LoadSample(const SampleSpec& spec);

struct SampleOutputs {
  RegionMask mask;
  ResponseStack revised;   // propagated responses at working resolution
  LabelMap pseudo_labels;  // at GT size, else output_size, else working size
};

// binarize -> neighbors -> affinities -> normalize -> propagate ->
// normalize -> upsample -> background channel -> argmax.
SampleOutputs ProcessSample(const PipelineConfig& config, const SampleInputs& inputs);

struct SampleOutcome {
  std::string id;
  std::string error;  // empty on success
  std::size_t boundary_pixels = 0;
  bool ok() const { return error.empty(); }
};

struct PipelineResult {
  std::vector<SampleOutcome> samples;
  ConfusionMatrix confusion{kVocForegroundCategories + 1};
  std::size_t evaluated = 0;  // samples that contributed to the confusion matrix
  std::optional<MiouResult> metrics;

  std::size_t failed() const;
};

// Worker count: config.threads if set, else RETAB_THREADS, else hardware
// concurrency; never more than the number of samples.
int ResolveThreads(const PipelineConfig& config, std::size_t samples);

// Runs every sample, isolating per-sample failures. When `out_dir` is given,
// writes <id>/revised.npy, <id>/pseudo_label.npy, config.json and
// metrics.json there.
PipelineResult RunPipeline(const PipelineConfig& config, const std::vector<SampleSpec>& samples,
                           const std::optional<std::filesystem::path>& out_dir);

struct SweepRow {
  double tau;
  PipelineResult result;
};

// One RunPipeline-equivalent evaluation per tau (no files written). Every
// sample must have GT labels.
std::vector<SweepRow> TauSweep(const PipelineConfig& config, const std::vector<SampleSpec>& samples,
                               const std::vector<double>& taus);

// Serializations shared by the CLI.
std::string MetricsToJson(const PipelineResult& result, const PipelineConfig& config);
std::string SweepToJson(const std::vector<SweepRow>& rows);
std::string FormatDouble(double value);  // shortest round-trip form

}  // namespace retab

#endif  // RETAB_PIPELINE_HPP_
