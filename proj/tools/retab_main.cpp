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

// Command-line front end for the retab library.
//
// Exit codes: 0 on success, 1 when arguments or configuration are invalid,
// 2 when processing fails (unreadable or malformed data, nothing evaluated).

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "retab/affinity.hpp"
#include "retab/boundary.hpp"
#include "retab/error.hpp"
#include "retab/metrics.hpp"
#include "retab/pipeline.hpp"
#include "retab/propagation.hpp"
#include "retab/pseudolabel.hpp"
#include "retab/splits.hpp"
#include "retab/tensor_io.hpp"

namespace retab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Thrown for failures that are about the data rather than the arguments.
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

// Writes to `path` when given, otherwise to stdout.
void Emit(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    WriteText(*path, text);
  } else {
    std::cout << text;
  }
}

json Optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json MetricsJson(const BinaryMetrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"tn", m.tn},
          {"accuracy", m.accuracy()},
          {"precision", m.precision()},
          {"recall", m.recall()},
          {"f1", m.f1()}};
}

json MiouJson(const MiouResult& r) {
  json per = json::array();
  for (const auto& v : r.per_category) per.push_back(Optional(v));
  return {{"all", Optional(r.all)},
          {"base", Optional(r.base)},
          {"novel", Optional(r.novel)},
          {"per_category", std::move(per)}};
}

// Sorted names of the .npy files directly inside `dir`.
std::vector<std::string> ListNpy(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".npy") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::shared_ptr<const NeighborPairs> Neighbors(int h, int w, double gamma) {
  return std::make_shared<const NeighborPairs>(BuildNeighbors(h, w, gamma));
}

// ---------------------------------------------------------------------------

struct SplitFoldsArgs {
  int fold = 0;
  std::string manifest;
  std::optional<std::string> out;
};

int SplitFolds(const SplitFoldsArgs& a) {
  const CategorySplit split = SplitForFold(a.fold);
  const SamplePartition p = PartitionSamples(LoadSampleManifest(a.manifest), split);
  const json out = {{"fold", a.fold},
                    {"base_categories", split.base},
                    {"novel_categories", split.novel},
                    {"base", p.base_ids},
                    {"novel", p.novel_ids}};
  Emit(a.out, out.dump(2) + "\n");
  std::cerr << "fold " << a.fold << ": " << p.base_ids.size() << " base / "
            << p.novel_ids.size() << " novel samples\n";
  return kExitOk;
}

struct AffLabelArgs {
  std::string mode = "gt";
  std::optional<std::string> seg;
  std::optional<std::string> cam;
  std::vector<int> categories;
  double gamma = kDefaultGamma;
  double fg_thresh = kDefaultFgThresh;
  double bg_thresh = kDefaultBgThresh;
  std::optional<std::string> filter_boundary;
  double tau = kDefaultTau;
  std::string out;
};

int MakeAffLabels(const AffLabelArgs& a) {
  PairAffinityTable table;
  if (a.mode == "gt") {
    if (!a.seg) throw ArgumentError("--mode gt needs --seg");
    const LabelMap seg = ToLabelMap(ReadTensor(*a.seg));
    table = GtAffinityLabels(seg, Neighbors(seg.height(), seg.width(), a.gamma));
  } else {
    if (!a.cam) throw ArgumentError("--mode pseudo needs --cam");
    const ResponseStack cam = MaxNormalize(ToResponseStack(ReadTensor(*a.cam)));
    table = PseudoAffinityLabels(cam, a.categories, Neighbors(cam.height(), cam.width(), a.gamma),
                                 a.fg_thresh, a.bg_thresh);
  }
  if (a.filter_boundary) {
    table = FilterPairsNbd(table, BinarizeBoundary(ToProbMap(ReadTensor(*a.filter_boundary)), a.tau));
  }
  WritePairTable(a.out, table, PairValues::kLabels);
  std::cerr << table.size() << " pairs, " << table.defined_label_count() << " labelled\n";
  return kExitOk;
}

struct EvalAffinityArgs {
  std::string pred;
  std::string gt;
};

int EvalAffinityCmd(const EvalAffinityArgs& a) {
  const PairAffinityTable pred = ReadPairTable(a.pred, PairValues::kAffinity);
  const PairAffinityTable gt = ReadPairTable(a.gt, PairValues::kLabels);
  std::cout << MetricsJson(EvalAffinity(pred, gt)).dump() << "\n";
  return kExitOk;
}

struct EvalBoundaryArgs {
  std::string pred;
  std::string gt;
  double tau = kDefaultTau;
};

// Predictions are <f4 probability maps; ground truth maps are |u1 with 1 for
// boundary, 0 for non-boundary and 255 for pixels to ignore. Files are
// matched by name.
int EvalBoundaryCmd(const EvalBoundaryArgs& a) {
  if (!(a.tau > 0.0 && a.tau < 1.0)) throw ArgumentError("--tau must lie in (0, 1)");
  BinaryMetrics total;
  std::size_t evaluated = 0, failed = 0;
  for (const auto& name : ListNpy(a.pred)) {
    const std::string id = fs::path(name).stem().string();
    try {
      const RegionMask pred = BinarizeBoundary(ToProbMap(ReadTensor(fs::path(a.pred) / name)), a.tau);
      const LabelMap gt_raw = ToLabelMap(ReadTensor(fs::path(a.gt) / name));
      BinaryMap gt(gt_raw.height(), gt_raw.width(), 0), ignore(gt_raw.height(), gt_raw.width(), 0);
      for (std::size_t i = 0; i < gt_raw.size(); ++i) {
        if (gt_raw[i] == kIgnoreLabel) {
          ignore[i] = 1;
        } else if (gt_raw[i] > 1) {
          throw FormatError("boundary GT values must be 0, 1 or 255");
        } else {
          gt[i] = gt_raw[i];
        }
      }
      const BinaryMetrics m = EvalBinary(pred.map(), gt, ignore);
      total += m;
      ++evaluated;
      json line = MetricsJson(m);
      line["id"] = id;
      std::cout << line.dump() << "\n";
    } catch (const std::exception& e) {
      ++failed;
      std::cout << json{{"id", id}, {"error", e.what()}}.dump() << "\n";
    }
  }
  json agg = MetricsJson(total);
  agg["id"] = nullptr;
  agg["aggregate"] = true;
  agg["samples"] = evaluated;
  agg["failed"] = failed;
  std::cout << agg.dump() << "\n";
  if (evaluated == 0) throw RuntimeFailure("no boundary map could be evaluated");
  return kExitOk;
}

struct PropagateArgs {
  std::string strategy = "btp";
  std::string cam;
  std::string features;
  std::string boundary;
  double tau = kDefaultTau;
  double beta = kDefaultBeta;
  int iters = kDefaultIters;
  std::optional<int> stage2_iters;
  double gamma = kDefaultGamma;
  std::string out;
};

// The CAM is max-normalized per channel before propagation, as in `run`.
int PropagateCmd(const PropagateArgs& a) {
  const Strategy strategy = ParseStrategy(a.strategy);
  const ResponseStack cam = MaxNormalize(ToResponseStack(ReadTensor(a.cam)));
  const FeatureMap features = ToFeatureMap(ReadTensor(a.features));
  const RegionMask mask = BinarizeBoundary(ToProbMap(ReadTensor(a.boundary)), a.tau);
  if (features.height() != cam.height() || features.width() != cam.width()) {
    throw ArgumentError("feature grid does not match the CAM grid");
  }
  const auto table = AffinityFromFeatures(features, Neighbors(cam.height(), cam.width(), a.gamma));
  const ResponseStack revised =
      Propagate(strategy, table, mask, cam, PropagationParams{a.beta, a.iters, a.stage2_iters});
  WriteTensor(a.out, FromResponseStack(revised));
  return kExitOk;
}

struct PseudoLabelArgs {
  std::string revised;
  std::vector<int> categories;
  double bg_alpha = kDefaultBgAlpha;
  std::vector<int> size;
  std::string out;
};

int PseudoLabelsCmd(const PseudoLabelArgs& a) {
  ResponseStack revised = MaxNormalize(ToResponseStack(ReadTensor(a.revised)));
  if (!a.size.empty()) {
    if (a.size.size() != 2) throw ArgumentError("--size takes H,W");
    revised = UpsampleBilinear(revised, a.size[0], a.size[1]);
  }
  const LabelMap labels = ArgmaxLabels(AssembleScores(revised, a.categories, a.bg_alpha));
  WriteTensor(a.out, FromLabelMap(labels));
  return kExitOk;
}

struct EvalMiouArgs {
  std::string pred;
  std::string gt;
  int fold = 0;
};

int EvalMiouCmd(const EvalMiouArgs& a) {
  const CategorySplit split = SplitForFold(a.fold);
  ConfusionMatrix cm(split.num_categories);
  std::size_t evaluated = 0;
  for (const auto& name : ListNpy(a.gt)) {
    const fs::path pred_path = fs::path(a.pred) / name;
    if (!fs::exists(pred_path)) {
      std::cerr << "warning: no prediction for " << name << "\n";
      continue;
    }
    cm.Accumulate(ToLabelMap(ReadTensor(pred_path)), ToLabelMap(ReadTensor(fs::path(a.gt) / name)));
    ++evaluated;
  }
  if (evaluated == 0) throw RuntimeFailure("no prediction/GT pair found");
  json out = MiouJson(MiouGroups(cm, split));
  out["fold"] = a.fold;
  out["samples"] = evaluated;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

// Pipeline settings given on the command line. Unset options leave the
// config file (or the default) in place.
struct ConfigOverrides {
  std::optional<std::string> config;
  std::optional<double> tau, gamma, beta, fg_thresh, bg_thresh, bg_alpha;
  std::optional<int> iters, stage2_iters, fold, threads;
  std::optional<std::string> strategy;

  void Register(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON config file");
    cmd->add_option("--tau", tau, "boundary threshold");
    cmd->add_option("--gamma", gamma, "neighbor search radius");
    cmd->add_option("--beta", beta, "affinity exponent");
    cmd->add_option("--iters", iters, "random-walk iterations");
    cmd->add_option("--stage2-iters", stage2_iters, "second-stage iterations (default: --iters)");
    cmd->add_option("--fg-thresh", fg_thresh, "confident foreground threshold");
    cmd->add_option("--bg-thresh", bg_thresh, "confident background threshold");
    cmd->add_option("--bg-alpha", bg_alpha, "background exponent");
    cmd->add_option("--fold", fold, "fold 0-5");
    cmd->add_option("--strategy", strategy, "one-stage, nbd-bd or btp");
    cmd->add_option("--threads", threads, "worker threads (0: RETAB_THREADS or all cores)");
  }

  PipelineConfig Resolve() const {
    PipelineConfig c;
    if (config) c = ConfigFromJson(ReadText(*config));
    if (tau) c.tau = *tau;
    if (gamma) c.gamma = *gamma;
    if (beta) c.beta = *beta;
    if (iters) c.iters = *iters;
    if (stage2_iters) c.stage2_iters = *stage2_iters;
    if (fg_thresh) c.fg_thresh = *fg_thresh;
    if (bg_thresh) c.bg_thresh = *bg_thresh;
    if (bg_alpha) c.bg_alpha = *bg_alpha;
    if (fold) c.fold = *fold;
    if (strategy) c.strategy = ParseStrategy(*strategy);
    if (threads) c.threads = *threads;
    c.Validate();
    return c;
  }
};

struct RunArgs {
  std::string manifest;
  std::string out;
  ConfigOverrides overrides;
};

int RunCmd(const RunArgs& a) {
  const PipelineConfig config = a.overrides.Resolve();
  const auto samples = LoadPipelineManifest(a.manifest);
  const PipelineResult result = RunPipeline(config, samples, fs::path(a.out));
  for (const auto& s : result.samples) {
    if (!s.ok()) std::cerr << "sample " << s.id << " failed: " << s.error << "\n";
  }
  std::cerr << samples.size() - result.failed() << "/" << samples.size()
            << " samples processed; outputs in " << a.out << "\n";
  if (!samples.empty() && result.failed() == samples.size()) {
    throw RuntimeFailure("every sample failed");
  }
  return kExitOk;
}

struct TauSweepArgs {
  std::string manifest;
  std::vector<double> taus = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::optional<std::string> out;
  ConfigOverrides overrides;
};

int TauSweepCmd(const TauSweepArgs& a) {
  const PipelineConfig config = a.overrides.Resolve();
  const auto samples = LoadPipelineManifest(a.manifest);
  const auto rows = TauSweep(config, samples, a.taus);
  Emit(a.out, SweepToJson(rows));
  const bool all_failed = std::all_of(rows.begin(), rows.end(), [&](const SweepRow& r) {
    return !samples.empty() && r.result.failed() == samples.size();
  });
  if (all_failed && !rows.empty()) throw RuntimeFailure("every sample failed");
  return kExitOk;
}

struct RelabelArgs {
  std::string gt;
  std::string pred;
  int fold = 0;
  std::string out;
};

int SelfTrainRelabelCmd(const RelabelArgs& a) {
  const CategorySplit split = SplitForFold(a.fold);
  const LabelMap out = SelfTrainRelabel(ToLabelMap(ReadTensor(a.gt)),
                                        ToLabelMap(ReadTensor(a.pred)), split.novel);
  WriteTensor(a.out, FromLabelMap(out));
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"retab: boundary-aware response expansion for CAM pseudo labels"};
  app.require_subcommand(1);
  std::function<int()> action;

  SplitFoldsArgs split;
  auto* c_split = app.add_subcommand("split-folds", "partition samples into base / novel");
  c_split->add_option("--fold", split.fold, "fold 0-5")->required();
  c_split->add_option("--manifest", split.manifest, "image-label manifest JSON")->required();
  c_split->add_option("--out", split.out, "output JSON (default: stdout)");
  c_split->callback([&] { action = [&] { return SplitFolds(split); }; });

  AffLabelArgs aff;
  auto* c_aff = app.add_subcommand("make-aff-labels", "derive pairwise affinity labels");
  c_aff->add_option("--mode", aff.mode, "gt or pseudo")->check(CLI::IsMember({"gt", "pseudo"}));
  c_aff->add_option("--seg", aff.seg, "label map (gt mode)");
  c_aff->add_option("--cam", aff.cam, "CAM stack H x W x C (pseudo mode)");
  c_aff->add_option("--categories", aff.categories, "category of each CAM channel")->delimiter(',');
  c_aff->add_option("--gamma", aff.gamma, "neighbor search radius");
  c_aff->add_option("--fg-thresh", aff.fg_thresh, "confident foreground threshold");
  c_aff->add_option("--bg-thresh", aff.bg_thresh, "confident background threshold");
  c_aff->add_option("--filter-boundary", aff.filter_boundary,
                    "boundary probability map; pairs touching boundary pixels become undefined");
  c_aff->add_option("--tau", aff.tau, "boundary threshold for --filter-boundary");
  c_aff->add_option("--out", aff.out, "output prefix (<prefix>_i/_j/_values.npy)")->required();
  c_aff->callback([&] { action = [&] { return MakeAffLabels(aff); }; });

  EvalAffinityArgs eaff;
  auto* c_eaff = app.add_subcommand("eval-affinity", "score predicted affinities against labels");
  c_eaff->add_option("--pred", eaff.pred, "predicted affinity table prefix")->required();
  c_eaff->add_option("--gt", eaff.gt, "label table prefix")->required();
  c_eaff->callback([&] { action = [&] { return EvalAffinityCmd(eaff); }; });

  EvalBoundaryArgs ebd;
  auto* c_ebd = app.add_subcommand("eval-boundary", "score boundary maps (JSON lines)");
  c_ebd->add_option("--pred", ebd.pred, "directory of probability maps")->required();
  c_ebd->add_option("--gt", ebd.gt, "directory of 0/1/255 boundary maps")->required();
  c_ebd->add_option("--tau", ebd.tau, "boundary threshold");
  c_ebd->callback([&] { action = [&] { return EvalBoundaryCmd(ebd); }; });

  PropagateArgs prop;
  auto* c_prop = app.add_subcommand("propagate", "propagate CAM responses");
  c_prop->add_option("--strategy", prop.strategy, "one-stage, nbd-bd or btp");
  c_prop->add_option("--cam", prop.cam, "CAM stack H x W x C")->required();
  c_prop->add_option("--features", prop.features, "feature map H x W x D")->required();
  c_prop->add_option("--boundary", prop.boundary, "boundary probability map H x W")->required();
  c_prop->add_option("--tau", prop.tau, "boundary threshold");
  c_prop->add_option("--beta", prop.beta, "affinity exponent");
  c_prop->add_option("--iters", prop.iters, "random-walk iterations");
  c_prop->add_option("--stage2-iters", prop.stage2_iters, "second-stage iterations");
  c_prop->add_option("--gamma", prop.gamma, "neighbor search radius");
  c_prop->add_option("--out", prop.out, "revised responses H x W x C")->required();
  c_prop->callback([&] { action = [&] { return PropagateCmd(prop); }; });

  PseudoLabelArgs pl;
  auto* c_pl = app.add_subcommand("pseudo-labels", "turn revised responses into a label map");
  c_pl->add_option("--revised", pl.revised, "revised responses H x W x C")->required();
  c_pl->add_option("--categories", pl.categories, "category of each channel")
      ->delimiter(',')
      ->required();
  c_pl->add_option("--bg-alpha", pl.bg_alpha, "background exponent");
  c_pl->add_option("--size", pl.size, "output size H,W (default: input size)")->delimiter(',');
  c_pl->add_option("--out", pl.out, "uint8 label map")->required();
  c_pl->callback([&] { action = [&] { return PseudoLabelsCmd(pl); }; });

  EvalMiouArgs em;
  auto* c_em = app.add_subcommand("eval-miou", "all / base / novel mIoU of label maps");
  c_em->add_option("--pred", em.pred, "directory of predicted label maps")->required();
  c_em->add_option("--gt", em.gt, "directory of GT label maps")->required();
  c_em->add_option("--fold", em.fold, "fold 0-5")->required();
  c_em->callback([&] { action = [&] { return EvalMiouCmd(em); }; });

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "full pipeline over a sample manifest");
  c_run->add_option("--manifest", run.manifest, "pipeline manifest JSON")->required();
  c_run->add_option("--out", run.out, "output directory")->required();
  run.overrides.Register(c_run);
  c_run->callback([&] { action = [&] { return RunCmd(run); }; });

  TauSweepArgs sweep;
  auto* c_sweep = app.add_subcommand("tau-sweep", "mIoU across boundary thresholds");
  c_sweep->add_option("--manifest", sweep.manifest, "pipeline manifest JSON")->required();
  c_sweep->add_option("--taus", sweep.taus, "thresholds (default 0.1,...,0.9)")->delimiter(',');
  c_sweep->add_option("--out", sweep.out, "output JSON (default: stdout)");
  sweep.overrides.Register(c_sweep);
  c_sweep->callback([&] { action = [&] { return TauSweepCmd(sweep); }; });

  RelabelArgs rl;
  auto* c_rl = app.add_subcommand("self-train-relabel",
                                  "flip GT background pixels predicted as novel categories");
  c_rl->add_option("--gt", rl.gt, "GT label map")->required();
  c_rl->add_option("--pred", rl.pred, "predicted label map")->required();
  c_rl->add_option("--fold", rl.fold, "fold 0-5")->required();
  c_rl->add_option("--out", rl.out, "relabelled map")->required();
  c_rl->callback([&] { action = [&] { return SelfTrainRelabelCmd(rl); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    return action();
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace
}  // namespace retab::cli

int main(int argc, char** argv) { return retab::cli::Main(argc, argv); }
