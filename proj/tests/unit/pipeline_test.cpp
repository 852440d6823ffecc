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

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixture_io.hpp"
#include "fixtures.hpp"
#include "retab/error.hpp"
#include <nlohmann/json.hpp>

namespace retab {
namespace {

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("retab_pipeline_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::vector<SampleSpec> RandomSpecs(int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<SampleSpec> specs;
    for (int k = 0; k < count; ++k) {
      specs.push_back(testing::WriteSampleFiles(dir_ / "in", "s" + std::to_string(k),
                                                testing::RandomSample(rng, 5, 6)));
    }
    return LoadPipelineManifest(testing::WriteManifest(dir_ / "in", specs));
  }

  std::filesystem::path dir_;
};

TEST(PipelineConfigTest, DefaultsAndValidation) {
  const PipelineConfig c = ConfigFromJson("{}");
  EXPECT_EQ(c.tau, 0.5);
  EXPECT_EQ(c.gamma, 5.0);
  EXPECT_EQ(c.beta, 8.0);
  EXPECT_EQ(c.iters, 16);
  EXPECT_EQ(c.bg_alpha, 16.0);
  EXPECT_EQ(c.strategy, Strategy::kBtp);
  EXPECT_NO_THROW(c.Validate());

  const PipelineConfig d = ConfigFromJson(R"({"tau": 0.3, "strategy": "one-stage", "fold": 2})");
  EXPECT_EQ(d.tau, 0.3);
  EXPECT_EQ(d.strategy, Strategy::kOneStage);
  EXPECT_EQ(d.fold, 2);

  try {
    ConfigFromJson(R"({"beta": 0.5})").Validate();
    FAIL() << "expected a validation error";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
  EXPECT_THROW(ConfigFromJson(R"({"betta": 2})"), ArgumentError);
  EXPECT_THROW(ConfigFromJson("[1]"), Error);
}

TEST(PipelineConfigTest, JsonRoundTrip) {
  PipelineConfig c;
  c.tau = 0.1;
  c.stage2_iters = 3;
  c.strategy = Strategy::kNbdBd;
  const PipelineConfig back = ConfigFromJson(ConfigToJson(c));
  EXPECT_EQ(back.tau, 0.1);
  EXPECT_EQ(back.stage2_iters, 3);
  EXPECT_EQ(back.strategy, Strategy::kNbdBd);
  EXPECT_EQ(ConfigToJson(back), ConfigToJson(c));
}

TEST(ProcessSampleTest, PlantedFixtureOrdering) {
  const SampleInputs in = testing::PlantedTwoRegionFixture();
  const CategorySplit split = FoldCategories(0);
  auto miou = [&](Strategy s) {
    PipelineConfig c;
    c.strategy = s;
    ConfusionMatrix cm(21);
    cm.Accumulate(ProcessSample(c, in).pseudo_labels, *in.gt);
    return *MiouGroups(cm, split).all;
  };
  const double btp = miou(Strategy::kBtp);
  const double one = miou(Strategy::kOneStage);
  const double nbd = miou(Strategy::kNbdBd);
  EXPECT_EQ(btp, 1.0);
  EXPECT_NEAR(one, (0.75 + 2.0 / 3.0) / 2.0, 1e-12);
  EXPECT_EQ(nbd, 0.5);
}

TEST(ProcessSampleTest, OutputSizeAndShapeChecks) {
  SampleInputs in = testing::PlantedTwoRegionFixture();
  in.gt.reset();
  in.output_size = std::pair{12, 9};
  const SampleOutputs out = ProcessSample(PipelineConfig{}, in);
  EXPECT_EQ(out.pseudo_labels.height(), 12);
  EXPECT_EQ(out.pseudo_labels.width(), 9);
  EXPECT_EQ(out.revised.height(), 6);
  in.features = FeatureMap(5, 6, 1, std::vector<double>(30));
  EXPECT_THROW(ProcessSample(PipelineConfig{}, in), ArgumentError);
}

TEST_F(PipelineTest, SmokeAndDeterminism) {
  const auto specs = RandomSpecs(3, 21);
  PipelineConfig c;
  c.threads = 2;
  const PipelineResult a = RunPipeline(c, specs, dir_ / "a");
  const PipelineResult b = RunPipeline(c, specs, dir_ / "b");
  EXPECT_EQ(a.failed(), 0u);
  EXPECT_EQ(a.evaluated, 3u);
  EXPECT_EQ(a.confusion, b.confusion);
  for (const auto& s : specs) {
    for (const char* name : {"revised.npy", "pseudo_label.npy"}) {
      const auto pa = dir_ / "a" / s.id / name;
      ASSERT_TRUE(std::filesystem::exists(pa)) << pa;
      EXPECT_EQ(Slurp(pa), Slurp(dir_ / "b" / s.id / name));
    }
    EXPECT_EQ(ToLabelMap(ReadTensor(dir_ / "a" / s.id / "pseudo_label.npy")).width(), 12);
  }
  EXPECT_EQ(Slurp(dir_ / "a" / "metrics.json"), Slurp(dir_ / "b" / "metrics.json"));
  const auto metrics = nlohmann::json::parse(Slurp(dir_ / "a" / "metrics.json"));
  EXPECT_TRUE(metrics.contains("all"));
  EXPECT_EQ(metrics["per_category"].size(), 21u);
  const auto config = nlohmann::json::parse(Slurp(dir_ / "a" / "config.json"));
  EXPECT_EQ(config["tau"], 0.5);
}

TEST_F(PipelineTest, ThreadCountDoesNotChangeResults) {
  const auto specs = RandomSpecs(5, 22);
  PipelineConfig one;
  one.threads = 1;
  PipelineConfig many;
  many.threads = 4;
  EXPECT_EQ(RunPipeline(one, specs, std::nullopt).confusion,
            RunPipeline(many, specs, std::nullopt).confusion);
}

TEST_F(PipelineTest, FailuresAreIsolated) {
  auto specs = RandomSpecs(3, 23);
  specs[1].cam = dir_ / "in" / "missing.npy";
  {
    std::ofstream(dir_ / "in" / "s2_features.npy") << "garbage";
  }
  const PipelineResult r = RunPipeline(PipelineConfig{}, specs, dir_ / "out");
  EXPECT_EQ(r.failed(), 2u);
  EXPECT_EQ(r.evaluated, 1u);
  EXPECT_TRUE(r.samples[0].ok());
  EXPECT_FALSE(r.samples[1].ok());
  EXPECT_FALSE(r.samples[2].ok());
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out" / "s0" / "pseudo_label.npy"));
  const auto metrics = nlohmann::json::parse(Slurp(dir_ / "out" / "metrics.json"));
  EXPECT_FALSE(metrics["samples"][1]["ok"].get<bool>());
}

TEST_F(PipelineTest, SingletonSweepMatchesRun) {
  const auto specs = RandomSpecs(2, 24);
  PipelineConfig c;
  c.tau = 0.5;
  const PipelineResult run = RunPipeline(c, specs, std::nullopt);
  const auto rows = TauSweep(c, specs, {0.5});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].result.confusion, run.confusion);
  EXPECT_EQ(rows[0].result.metrics->all, run.metrics->all);
}

TEST_F(PipelineTest, NineValueSweep) {
  const auto specs = RandomSpecs(2, 25);
  const std::vector<double> taus = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const auto rows = TauSweep(PipelineConfig{}, specs, taus);
  ASSERT_EQ(rows.size(), 9u);
  const auto table = nlohmann::json::parse(SweepToJson(rows));
  ASSERT_EQ(table.size(), 9u);
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_EQ(rows[k].tau, taus[k]);
    EXPECT_EQ(table[k]["tau"].dump(), FormatDouble(taus[k]));
  }
  for (const auto& s : specs) {
    const SampleInputs in = LoadSample(s);
    const RegionMask lo = BinarizeBoundary(in.boundary, 0.1);
    const RegionMask hi = BinarizeBoundary(in.boundary, 0.9);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (hi.is_boundary(i)) EXPECT_TRUE(lo.is_boundary(i));
    }
  }
}

TEST_F(PipelineTest, SweepNeedsGt) {
  auto specs = RandomSpecs(1, 26);
  specs[0].gt.reset();
  EXPECT_THROW(TauSweep(PipelineConfig{}, specs, {0.5}), ArgumentError);
}

TEST_F(PipelineTest, PlantedFixtureThroughFiles) {
  const auto spec = testing::WriteSampleFiles(dir_ / "in", "planted",
                                              testing::PlantedTwoRegionFixture());
  const auto specs = LoadPipelineManifest(testing::WriteManifest(dir_ / "in", {spec}));
  PipelineConfig btp;
  PipelineConfig one;
  one.strategy = Strategy::kOneStage;
  const double b = *RunPipeline(btp, specs, std::nullopt).metrics->all;
  const double o = *RunPipeline(one, specs, std::nullopt).metrics->all;
  EXPECT_GE(b, o);
  EXPECT_EQ(b, 1.0);
}

TEST(LoadPipelineManifestTest, Errors) {
  const auto dir = std::filesystem::temp_directory_path() / "retab_manifest_errors";
  std::filesystem::create_directories(dir);
  EXPECT_THROW(LoadPipelineManifest(dir / "missing.json"), IoError);
  std::ofstream(dir / "bad.json") << R"({"samples": [{"id": "a"}]})";
  EXPECT_THROW(LoadPipelineManifest(dir / "bad.json"), FormatError);
  std::ofstream(dir / "slash.json")
      << R"({"samples": [{"id": "../x", "cam": "c", "features": "f", "boundary": "b", "categories": [1]}]})";
  EXPECT_THROW(LoadPipelineManifest(dir / "slash.json"), FormatError);
  std::filesystem::remove_all(dir);
}

TEST(ResolveThreadsTest, ClampsToSamples) {
  PipelineConfig c;
  c.threads = 8;
  EXPECT_EQ(ResolveThreads(c, 3), 3);
  EXPECT_EQ(ResolveThreads(c, 0), 1);
  c.threads = 0;
  ::setenv("RETAB_THREADS", "2", 1);
  EXPECT_EQ(ResolveThreads(c, 10), 2);
  ::unsetenv("RETAB_THREADS");
}

}  // namespace
}  // namespace retab
