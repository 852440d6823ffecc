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

#include "retab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "retab/error.hpp"
#include "retab/tensor_io.hpp"

namespace retab {
namespace {

using nlohmann::json;

void FieldCheck(bool ok, const char* field, const std::string& rule) {
  if (!ok) throw ArgumentError(std::string("config field '") + field + "': " + rule);
}

json OptionalToJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json MiouToJson(const std::optional<MiouResult>& m) {
  json out = json::object();
  if (!m) {
    out["all"] = out["base"] = out["novel"] = nullptr;
    out["per_category"] = json::array();
    return out;
  }
  out["all"] = OptionalToJson(m->all);
  out["base"] = OptionalToJson(m->base);
  out["novel"] = OptionalToJson(m->novel);
  json per = json::array();
  for (const auto& v : m->per_category) per.push_back(OptionalToJson(v));
  out["per_category"] = std::move(per);
  return out;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

// Runs `work(k)` for k in [0, count) on `threads` workers.
void ParallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& work) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) work(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) work(k);
    });
  }
}

struct SampleRun {
  SampleOutcome outcome;
  std::optional<ConfusionMatrix> confusion;
};

SampleRun RunOne(const PipelineConfig& config, const SampleInputs& inputs, const std::string& id,
                 const CategorySplit& split, const std::optional<std::filesystem::path>& out_dir) {
  SampleRun run;
  run.outcome.id = id;
  const SampleOutputs outputs = ProcessSample(config, inputs);
  run.outcome.boundary_pixels = outputs.mask.boundary_count();
  if (inputs.gt) {
    ConfusionMatrix cm(split.num_categories);
    cm.Accumulate(outputs.pseudo_labels, *inputs.gt);
    run.confusion = std::move(cm);
  }
  if (out_dir) {
    const auto dir = *out_dir / id;
    std::filesystem::create_directories(dir);
    WriteTensor(dir / "revised.npy", FromResponseStack(outputs.revised));
    WriteTensor(dir / "pseudo_label.npy", FromLabelMap(outputs.pseudo_labels));
  }
  return run;
}

PipelineResult Merge(std::vector<SampleRun> runs, const CategorySplit& split) {
  PipelineResult result;
  result.confusion = ConfusionMatrix(split.num_categories);
  for (auto& run : runs) {
    if (run.confusion) {
      result.confusion += *run.confusion;
      ++result.evaluated;
    }
    result.samples.push_back(std::move(run.outcome));
  }
  if (result.evaluated > 0) {
    try {
      result.metrics = MiouGroups(result.confusion, split);
    } catch (const UndefinedResultError&) {
      result.metrics.reset();
    }
  }
  return result;
}

}  // namespace

void PipelineConfig::Validate() const {
  FieldCheck(tau > 0.0 && tau < 1.0, "tau", "must lie in (0, 1)");
  FieldCheck(gamma > 0.0, "gamma", "must be > 0");
  FieldCheck(beta >= 1.0 && std::isfinite(beta), "beta", "must be finite and >= 1");
  FieldCheck(iters >= 0, "iters", "must be >= 0");
  FieldCheck(!stage2_iters || *stage2_iters >= 0, "stage2_iters", "must be >= 0");
  FieldCheck(fg_thresh > 0.0 && fg_thresh < 1.0, "fg_thresh", "must lie in (0, 1)");
  FieldCheck(bg_thresh > 0.0 && bg_thresh < fg_thresh, "bg_thresh",
             "must lie in (0, fg_thresh)");
  FieldCheck(bg_alpha > 0.0, "bg_alpha", "must be > 0");
  FieldCheck(fold >= 0 && fold <= 5, "fold", "must be in 0..5");
  FieldCheck(threads >= 0, "threads", "must be >= 0");
}

PipelineConfig ConfigFromJson(const std::string& text, PipelineConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ArgumentError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "tau") base.tau = value.get<double>();
      else if (key == "gamma") base.gamma = value.get<double>();
      else if (key == "beta") base.beta = value.get<double>();
      else if (key == "iters") base.iters = value.get<int>();
      else if (key == "stage2_iters") {
        if (value.is_null()) base.stage2_iters.reset();
        else base.stage2_iters = value.get<int>();
      }
      else if (key == "fg_thresh") base.fg_thresh = value.get<double>();
      else if (key == "bg_thresh") base.bg_thresh = value.get<double>();
      else if (key == "bg_alpha") base.bg_alpha = value.get<double>();
      else if (key == "fold") base.fold = value.get<int>();
      else if (key == "strategy") base.strategy = ParseStrategy(value.get<std::string>());
      else if (key == "threads") base.threads = value.get<int>();
      else throw ArgumentError("unknown config field '" + key + "'");
    } catch (const json::exception& e) {
      throw ArgumentError("config field '" + key + "': " + e.what());
    }
  }
  return base;
}

std::string ConfigToJson(const PipelineConfig& c) {
  json out = {{"tau", c.tau},
              {"gamma", c.gamma},
              {"beta", c.beta},
              {"iters", c.iters},
              {"stage2_iters", c.stage2_iters ? json(*c.stage2_iters) : json(nullptr)},
              {"fg_thresh", c.fg_thresh},
              {"bg_thresh", c.bg_thresh},
              {"bg_alpha", c.bg_alpha},
              {"fold", c.fold},
              {"strategy", std::string(StrategyName(c.strategy))},
              {"threads", c.threads}};
  return out.dump(2) + "\n";
}

std::vector<SampleSpec> LoadPipelineManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array()) {
    throw FormatError("manifest " + path.string() + " lacks a \"samples\" array");
  }
  const auto root = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : root / fp;
  };
  std::vector<SampleSpec> samples;
  for (const auto& entry : doc["samples"]) {
    try {
      SampleSpec s;
      s.id = entry.at("id").get<std::string>();
      s.cam = resolve(entry.at("cam").get<std::string>());
      s.categories = entry.at("categories").get<std::vector<int>>();
      s.features = resolve(entry.at("features").get<std::string>());
      s.boundary = resolve(entry.at("boundary").get<std::string>());
      if (entry.contains("gt") && !entry["gt"].is_null()) {
        s.gt = resolve(entry["gt"].get<std::string>());
      }
      if (entry.contains("output_size") && !entry["output_size"].is_null()) {
        const auto hw = entry["output_size"].get<std::vector<int>>();
        if (hw.size() != 2) throw FormatError("output_size must be [h, w]");
        s.output_size = std::pair{hw[0], hw[1]};
      }
      if (s.id.empty() || s.id.find('/') != std::string::npos || s.id == "." || s.id == "..") {
        throw FormatError("sample id '" + s.id + "' is not a valid directory name");
      }
      samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw FormatError("manifest " + path.string() + ": " + e.what());
    }
  }
  return samples;
}

SampleInputs LoadSample(const SampleSpec& spec) {
  SampleInputs in;
  in.cam = ToResponseStack(ReadTensor(spec.cam));
  in.categories = spec.categories;
  in.features = ToFeatureMap(ReadTensor(spec.features));
  in.boundary = ToProbMap(ReadTensor(spec.boundary));
  if (spec.gt) in.gt = ToLabelMap(ReadTensor(*spec.gt));
  in.output_size = spec.output_size;
  return in;
}

SampleOutputs ProcessSample(const PipelineConfig& config, const SampleInputs& in) {
  const int h = in.cam.height();
  const int w = in.cam.width();
  if (in.features.height() != h || in.features.width() != w) {
    throw ArgumentError("feature grid does not match the CAM grid");
  }
  if (in.boundary.height() != h || in.boundary.width() != w) {
    throw ArgumentError("boundary grid does not match the CAM grid");
  }

  SampleOutputs out;
  out.mask = BinarizeBoundary(in.boundary, config.tau);
  auto pairs = std::make_shared<const NeighborPairs>(BuildNeighbors(h, w, config.gamma));
  const PairAffinityTable table = AffinityFromFeatures(in.features, std::move(pairs));
  out.revised = Propagate(config.strategy, table, out.mask, MaxNormalize(in.cam),
                          config.propagation());

  int out_h = h, out_w = w;
  if (in.gt) {
    out_h = in.gt->height();
    out_w = in.gt->width();
  } else if (in.output_size) {
    std::tie(out_h, out_w) = *in.output_size;
  }
  const ResponseStack upsampled = UpsampleBilinear(MaxNormalize(out.revised), out_h, out_w);
  out.pseudo_labels = ArgmaxLabels(AssembleScores(upsampled, in.categories, config.bg_alpha));
  return out;
}

std::size_t PipelineResult::failed() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const auto& s) { return !s.ok(); }));
}

int ResolveThreads(const PipelineConfig& config, std::size_t samples) {
  int threads = config.threads;
  if (threads == 0) {
    if (const char* env = std::getenv("RETAB_THREADS")) {
      int parsed = 0;
      const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), parsed);
      if (ec == std::errc() && *ptr == '\0' && parsed > 0) threads = parsed;
    }
  }
  if (threads == 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads),
                                                std::max<std::size_t>(samples, 1)));
}

PipelineResult RunPipeline(const PipelineConfig& config, const std::vector<SampleSpec>& samples,
                           const std::optional<std::filesystem::path>& out_dir) {
  config.Validate();
  const CategorySplit split = SplitForFold(config.fold);
  if (out_dir) std::filesystem::create_directories(*out_dir);

  std::vector<SampleRun> runs(samples.size());
  ParallelFor(samples.size(), ResolveThreads(config, samples.size()), [&](std::size_t k) {
    try {
      runs[k] = RunOne(config, LoadSample(samples[k]), samples[k].id, split, out_dir);
    } catch (const std::exception& e) {
      runs[k] = SampleRun{};
      runs[k].outcome.id = samples[k].id;
      runs[k].outcome.error = e.what();
    }
  });
  PipelineResult result = Merge(std::move(runs), split);
  if (out_dir) {
    WriteText(*out_dir / "config.json", ConfigToJson(config));
    WriteText(*out_dir / "metrics.json", MetricsToJson(result, config));
  }
  return result;
}

std::vector<SweepRow> TauSweep(const PipelineConfig& config, const std::vector<SampleSpec>& samples,
                               const std::vector<double>& taus) {
  config.Validate();
  for (const auto& s : samples) {
    if (!s.gt) throw ArgumentError("tau sweep needs GT labels; sample '" + s.id + "' has none");
  }
  const CategorySplit split = SplitForFold(config.fold);
  const int threads = ResolveThreads(config, samples.size());

  // Inputs are loaded once; load failures are reported in every row.
  std::vector<std::optional<SampleInputs>> inputs(samples.size());
  std::vector<std::string> load_errors(samples.size());
  ParallelFor(samples.size(), threads, [&](std::size_t k) {
    try {
      inputs[k] = LoadSample(samples[k]);
    } catch (const std::exception& e) {
      load_errors[k] = e.what();
    }
  });

  std::vector<SweepRow> rows;
  for (double tau : taus) {
    PipelineConfig cfg = config;
    cfg.tau = tau;
    cfg.Validate();
    std::vector<SampleRun> runs(samples.size());
    ParallelFor(samples.size(), threads, [&](std::size_t k) {
      runs[k].outcome.id = samples[k].id;
      if (!inputs[k]) {
        runs[k].outcome.error = load_errors[k];
        return;
      }
      try {
        runs[k] = RunOne(cfg, *inputs[k], samples[k].id, split, std::nullopt);
      } catch (const std::exception& e) {
        runs[k] = SampleRun{};
        runs[k].outcome.id = samples[k].id;
        runs[k].outcome.error = e.what();
      }
    });
    rows.push_back({tau, Merge(std::move(runs), split)});
  }
  return rows;
}

std::string MetricsToJson(const PipelineResult& result, const PipelineConfig& config) {
  json out = MiouToJson(result.metrics);
  out["fold"] = config.fold;
  out["strategy"] = std::string(StrategyName(config.strategy));
  out["evaluated_samples"] = result.evaluated;
  json samples = json::array();
  for (const auto& s : result.samples) {
    json entry = {{"id", s.id}, {"ok", s.ok()}};
    if (s.ok()) {
      entry["boundary_pixels"] = s.boundary_pixels;
    } else {
      entry["error"] = s.error;
    }
    samples.push_back(std::move(entry));
  }
  out["samples"] = std::move(samples);
  return out.dump(2) + "\n";
}

std::string SweepToJson(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json entry = MiouToJson(row.result.metrics);
    entry.erase("per_category");
    entry["tau"] = json::parse(FormatDouble(row.tau));
    entry["failed"] = row.result.failed();
    out.push_back(std::move(entry));
  }
  return out.dump(2) + "\n";
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw ArgumentError("cannot format number");
  return std::string(buf, ptr);
}

}  // namespace retab
