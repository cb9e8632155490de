// tests/pipeline_test.cc

// Copyright 2026 The ssdscreen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "ssd/error.h"
#include "ssd/pipeline.h"
#include "test_util.h"

namespace {

ssd::ExperimentData SmallData(std::uint64_t seed = 3) {
  ssd::SyntheticSpec spec;
  spec.n_td = 10;
  spec.n_ssd = 10;
  spec.words_per_speaker = 8;
  spec.dim = 10;
  spec.seed = seed;
  auto corpus = ssd::SynthGenerate(spec);
  ssd::ExperimentData data;
  data.manifest = corpus.manifest;
  data.features = corpus.features;
  data.alignment = corpus.alignment;
  data.lexicon = corpus.lexicon;
  return data;
}

ssd::ExperimentConfig SmallConfig() {
  auto c = ssd::ExperimentConfig::Parse(
      "data.manifest = m.tsv\n"
      "data.features = f.ssdf\n"
      "data.alignment = a.txt\n"
      "data.lexicon = l.txt\n"
      "frontend.n_ceps = 10\n"
      "ivector.components = 4\n"
      "ivector.rank = 4\n"
      "ivector.tv_iters = 3\n"
      "ivector.ubm_iters = 4\n"
      "posterior.epochs = 20\n"
      "fusion.max_pairs = 400\n");
  return c;
}

}  // namespace

TEST_CASE("config parsing, overrides and hashing") {
  auto c = ssd::ExperimentConfig::Parse("# comment\nexperiment.folds = 4\r\nbackend.lda = true\n");
  CHECK(c.n_folds == 4);
  CHECK(c.backend.use_lda);
  auto d = ssd::ExperimentConfig::Parse(c.Canonical());
  CHECK(d.Canonical() == c.Canonical());
  CHECK(d.Hash() == c.Hash());
  d.Set("backend.c", "0.5");
  CHECK(d.Hash() != c.Hash());
  CHECK_THROWS_WITH_AS(ssd::ExperimentConfig::Parse("a\nno.such.key = 1\n", "x.cfg"),
                       doctest::Contains("x.cfg:1"), ssd::ValidationError);
  CHECK_THROWS_WITH_AS(ssd::ExperimentConfig::Parse("no.such.key = 1\n"),
                       doctest::Contains("unknown config key"), ssd::ValidationError);
  CHECK_THROWS_AS(ssd::ExperimentConfig::Parse("experiment.folds = many\n"), ssd::ValidationError);
  CHECK_THROWS_AS(ssd::ExperimentConfig::Parse("experiment.representation = xvector\n"),
                  ssd::ValidationError);
}

TEST_CASE("config validation names what is missing") {
  ssd::ExperimentConfig c;
  CHECK_THROWS_WITH_AS(c.Validate(), doctest::Contains("data.manifest"), ssd::ValidationError);
  c.manifest = "m.tsv";
  CHECK_THROWS_WITH_AS(c.Validate(), doctest::Contains("data.alignment"), ssd::ValidationError);
  c.representation = ssd::Representation::kIvectorMfcc;
  c.Validate();
}

TEST_CASE("relative data paths resolve against the config file") {
  ssd::testing::TempDir dir("cfg");
  {
    std::ofstream(dir.File("exp.cfg")) << "data.manifest = sub/m.tsv\n";
  }
  auto c = ssd::ExperimentConfig::FromFile(dir.File("exp.cfg"));
  CHECK(c.Resolve(c.manifest) == (dir.Path() / "sub/m.tsv").string());
  CHECK(c.Resolve("/abs/x") == "/abs/x");
}

TEST_CASE("leak guard") {
  std::vector<std::string> test{"a", "b"};
  ssd::LeakGuard guard(test);
  std::vector<std::string> clean{"c", "d"}, dirty{"c", "b"};
  guard.CheckTraining(clean, "UBM");
  CHECK_THROWS_WITH_AS(guard.CheckTraining(dirty, "UBM"),
                       doctest::Contains("test speaker b reached training stage 'UBM'"),
                       ssd::LeakError);
}

TEST_CASE("crossval aborts on a corrupted fold plan") {
  auto data = SmallData();
  auto config = SmallConfig();
  config.representation = ssd::Representation::kIvectorMfcc;
  auto plan = ssd::MakeFolds(data.manifest, 5, 0);
  plan.test_speakers[1].push_back(plan.test_speakers[0].front());
  std::sort(plan.test_speakers[1].begin(), plan.test_speakers[1].end());
  CHECK_THROWS_AS(ssd::RunCrossval(config, data, plan), ssd::LeakError);

  auto unsorted = ssd::MakeFolds(data.manifest, 5, 0);
  unsorted.test_speakers[1].push_back(unsorted.test_speakers[0].front());
  std::reverse(unsorted.test_speakers[1].begin(), unsorted.test_speakers[1].end());
  CHECK_THROWS_AS(ssd::RunCrossval(config, data, unsorted), ssd::LeakError);

  auto missing = ssd::MakeFolds(data.manifest, 5, 0);
  missing.test_speakers[3].pop_back();
  CHECK_THROWS_AS(ssd::RunCrossval(config, data, missing), ssd::ValidationError);
}

TEST_CASE("every frame-based representation and fusion runs") {
  auto data = SmallData();
  using R = ssd::Representation;
  using F = ssd::Fusion;
  for (auto [rep, fusion] : {std::pair{R::kIvectorMfcc, F::kSubject},
                             std::pair{R::kIvectorPhoneLpr, F::kSubject},
                             std::pair{R::kIvectorAttributeLpr, F::kSubject},
                             std::pair{R::kIvectorAttributeLpr, F::kWordMajority},
                             std::pair{R::kIvectorMfcc, F::kPhoneStack}}) {
    auto config = SmallConfig();
    config.representation = rep;
    config.fusion = fusion;
    auto report = ssd::RunCrossval(config, data);
    REQUIRE(report.folds.size() == 5);
    std::size_t speakers = 0;
    for (const auto &f : report.folds) {
      speakers += f.test_speakers.size();
      CHECK(f.metrics.uar >= 0.0);
      CHECK(f.metrics.uar <= 1.0);
    }
    CHECK(speakers == 20);
    CHECK(report.mean_uar >= 0.0);
  }
}

TEST_CASE("reports are byte-identical across runs") {
  auto data = SmallData();
  auto config = SmallConfig();
  auto a = ssd::RunCrossval(config, data).ToJson();
  auto b = ssd::RunCrossval(config, data).ToJson();
  CHECK(a == b);
  auto j = nlohmann::json::parse(a);
  CHECK(j.at("config_hash").get<std::string>().size() == 16);
  REQUIRE(j.at("folds").size() == 5);
  for (const char *key : {"fold", "uar", "macro_f1", "tp", "fp", "tn", "fn"})
    CHECK(j.at("folds")[0].contains(key));
  for (const char *key : {"mean_uar", "std_uar", "mean_macro_f1", "std_macro_f1"})
    CHECK(j.contains(key));
  auto text = ssd::RunCrossval(config, data).ToText();
  CHECK(text.find("mean") != std::string::npos);
}

TEST_CASE("std across folds is the sample deviation") {
  auto data = SmallData(4);
  auto config = SmallConfig();
  config.representation = ssd::Representation::kIvectorMfcc;
  auto r = ssd::RunCrossval(config, data);
  double mean = 0, ss = 0;
  for (const auto &f : r.folds) mean += f.metrics.uar / 5.0;
  for (const auto &f : r.folds) ss += (f.metrics.uar - mean) * (f.metrics.uar - mean);
  CHECK(r.mean_uar == doctest::Approx(mean).epsilon(1e-12));
  CHECK(r.std_uar == doctest::Approx(std::sqrt(ss / 4.0)).epsilon(1e-12));
}

TEST_CASE("functional representation reads audio") {
  ssd::testing::TempDir dir("fn");
  std::ofstream manifest(dir.File("m.tsv"));
  manifest << "speaker_id\tdiagnosis\tword_id\tpath\n";
  std::mt19937_64 rng(40);
  std::normal_distribution<double> g(0.0, 0.02);
  for (int s = 0; s < 10; ++s)
    for (int w = 0; w < 2; ++w) {
      bool ssd_speaker = s >= 5;
      ssd::AudioBuffer a;
      double f0 = ssd_speaker ? 260.0 + 10 * s : 180.0 + 10 * s;
      for (int i = 0; i < 4800; ++i)
        a.samples.push_back(0.3 * std::sin(2 * std::numbers::pi * f0 * i / 16000.0) + g(rng));
      std::string name = "s" + std::to_string(s) + "_" + std::to_string(w) + ".wav";
      ssd::WriteWav(dir.File(name), a);
      manifest << "s" << s << '\t' << (ssd_speaker ? "SSD" : "TD") << "\tw" << w << '\t' << name
               << '\n';
    }
  manifest.close();
  auto config = ssd::ExperimentConfig::Parse("data.manifest = m.tsv\n"
                                             "experiment.representation = functional\n");
  config.base_dir = dir.Path().string();
  auto data = ssd::LoadExperimentData(config);
  CHECK(data.features.empty());
  auto report = ssd::RunCrossval(config, data);
  CHECK(report.folds.size() == 5);
  config.fusion = ssd::Fusion::kWordMajority;
  CHECK(ssd::RunCrossval(config, data).folds.size() == 5);
}
