// tests/corpus_test.cc

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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ssd/archive.h"
#include "ssd/corpus.h"
#include "ssd/error.h"
#include "test_util.h"

namespace {

const char *kHeader = "speaker_id\tdiagnosis\tword_id\tpath\tannotation\n";

ssd::Manifest Speakers(int n_td, int n_ssd, int words = 1) {
  ssd::Manifest m;
  for (int s = 0; s < n_td + n_ssd; ++s)
    for (int w = 0; w < words; ++w) {
      ssd::ManifestEntry e;
      e.speaker_id = (s < n_td ? "td" : "ssd") + std::to_string(s);
      e.diagnosis = s < n_td ? ssd::Diagnosis::kTd : ssd::Diagnosis::kSsd;
      e.word_id = "w" + std::to_string(w);
      m.push_back(e);
    }
  return m;
}

// Collapses frame labels into the phone sequence they realize.
std::vector<std::string> Runs(const std::vector<std::string> &frames) {
  std::vector<std::string> out;
  for (const auto &f : frames)
    if (out.empty() || out.back() != f) out.push_back(f);
  return out;
}

ssd::SyntheticSpec SmallSpec() {
  ssd::SyntheticSpec spec;
  spec.n_td = 4;
  spec.n_ssd = 4;
  spec.words_per_speaker = 12;
  spec.dim = 8;
  spec.seed = 5;
  return spec;
}

}  // namespace

TEST_CASE("manifest parsing") {
  std::string text = std::string(kHeader) + "c1\tTD\tw1\ta.wav\t\nc2\tSSD\tw1\tb.wav\t1\n";
  auto m = ssd::ParseManifest(text);
  REQUIRE(m.size() == 2);
  CHECK(m[1].diagnosis == ssd::Diagnosis::kSsd);
  CHECK(m[1].error_annotation == true);
  CHECK_FALSE(m[0].error_annotation.has_value());

  std::string crlf;
  for (char c : text) crlf += c == '\n' ? std::string("\r\n") : std::string(1, c);
  auto m2 = ssd::ParseManifest(crlf);
  REQUIRE(m2.size() == 2);
  CHECK(m2[0].path == "a.wav");
  CHECK(m2[1].Key() == "c2/w1");

  std::string bad = std::string(kHeader) + "c1\tTD\tw1\ta.wav\t\nc2\tXX\tw1\tb.wav\t\n";
  CHECK_THROWS_WITH_AS(ssd::ParseManifest(bad, "m.tsv"), doctest::Contains("m.tsv:3"),
                       ssd::ValidationError);
  CHECK_THROWS_AS(ssd::ParseManifest("speaker_id\tpath\n"), ssd::FormatError);
}

TEST_CASE("manifest file round trip") {
  ssd::testing::TempDir dir("man");
  auto m = Speakers(2, 1, 2);
  m[0].error_annotation = false;
  m[2].age_band = "4";
  ssd::WriteManifest(dir.File("m.tsv"), m);
  auto back = ssd::LoadManifest(dir.File("m.tsv"));
  REQUIRE(back.size() == m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(back[i].Key() == m[i].Key());
    CHECK(back[i].error_annotation == m[i].error_annotation);
    CHECK(back[i].age_band == m[i].age_band);
  }
}

TEST_CASE("folds divide evenly when counts allow") {
  auto plan = ssd::MakeFolds(Speakers(10, 10), 5, 3);
  for (const auto &fold : plan.test_speakers) {
    int td = 0, ssd_n = 0;
    for (const auto &s : fold) (s.rfind("td", 0) == 0 ? td : ssd_n)++;
    CHECK(td == 2);
    CHECK(ssd_n == 2);
  }
}

TEST_CASE("folds partition speakers and keep the class ratio") {
  auto manifest = Speakers(265, 150);
  std::vector<std::string> all;
  for (const auto &[id, dx] : ssd::SpeakerDiagnoses(manifest)) all.push_back(id);
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    auto plan = ssd::MakeFolds(manifest, 5, seed);
    plan.ValidatePartition(all);
    std::set<std::string> seen;
    for (const auto &fold : plan.test_speakers) {
      double td = 0;
      for (const auto &s : fold) {
        CHECK(seen.insert(s).second);
        td += s.rfind("td", 0) == 0;
      }
      double ratio = td / (fold.size() - td);
      CHECK(std::abs(ratio / (265.0 / 150.0) - 1.0) <= 0.10);
    }
    CHECK(seen.size() == all.size());
  }
  auto a = ssd::MakeFolds(manifest, 5, 7), b = ssd::MakeFolds(manifest, 5, 7);
  CHECK(a.test_speakers == b.test_speakers);
}

TEST_CASE("corrupted fold plans are caught") {
  auto manifest = Speakers(5, 5);
  std::vector<std::string> all;
  for (const auto &[id, dx] : ssd::SpeakerDiagnoses(manifest)) all.push_back(id);
  auto plan = ssd::MakeFolds(manifest, 5, 0);
  auto dup = plan;
  dup.test_speakers[1].push_back(dup.test_speakers[0][0]);
  CHECK_THROWS_AS(dup.ValidatePartition(all), ssd::ValidationError);
  auto lost = plan;
  lost.test_speakers[2].pop_back();
  CHECK_THROWS_AS(lost.ValidatePartition(all), ssd::ValidationError);
}

TEST_CASE("subject utterance assembly") {
  ssd::FeatureArchive ar;
  ssd::Manifest entries;
  for (int w = 0; w < 3; ++w) {
    ssd::ManifestEntry e;
    e.speaker_id = "s";
    e.word_id = "w" + std::to_string(w);
    entries.push_back(e);
    ar[e.Key()] = ssd::testing::Features(ssd::Matrix::Constant(100, 2, w), ssd::FeatureKind::kFilterbank, e.Key());
  }
  auto full = ssd::AssembleSubjectUtterance(entries, ar);
  CHECK(full.NumFrames() == 300);
  CHECK(full.frames(250, 0) == 2.0);

  auto shuffled = entries;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(ssd::AssembleSubjectUtterance(shuffled, ar).frames == full.frames);

  ar.erase("s/w1");
  auto partial = ssd::AssembleSubjectUtterance(entries, ar);
  CHECK(partial.NumFrames() == 200);
  CHECK(partial.frames(150, 0) == 2.0);

  CHECK_THROWS_WITH_AS(ssd::AssembleSubjectUtterance(entries, {}),
                       doctest::Contains("speaker s"), ssd::ValidationError);
}

TEST_CASE("synthetic corpus is reproducible") {
  auto a = ssd::SynthGenerate(SmallSpec()), b = ssd::SynthGenerate(SmallSpec());
  CHECK(ssd::SerializeFeatureArchive(a.features) == ssd::SerializeFeatureArchive(b.features));
  CHECK(a.alignment == b.alignment);
  auto spec = SmallSpec();
  spec.seed = 6;
  CHECK(ssd::SerializeFeatureArchive(ssd::SynthGenerate(spec).features) !=
        ssd::SerializeFeatureArchive(a.features));
}

TEST_CASE("annotations follow the substitutions that happened") {
  auto map = ssd::AttributeMap::Default();
  auto corpus = ssd::SynthGenerate(SmallSpec(), map);
  REQUIRE(corpus.manifest.size() == 8 * 12);
  int positives = 0;
  for (const auto &e : corpus.manifest) {
    auto realized = Runs(corpus.alignment.at(e.Key()));
    const auto &canonical = corpus.lexicon.at(e.word_id);
    REQUIRE(realized.size() == canonical.size());
    REQUIRE(static_cast<std::size_t>(corpus.features.at(e.Key()).NumFrames()) ==
            corpus.alignment.at(e.Key()).size());
    bool changed = false;
    for (std::size_t i = 0; i < canonical.size(); ++i) {
      if (realized[i] == canonical[i]) continue;
      changed = true;
      // Every change is a one-attribute confusion.
      int p = map.Inventory().IndexOf(canonical[i]), q = map.Inventory().IndexOf(realized[i]);
      auto partners = map.ConfusablePartners(p);
      CHECK(std::find(partners.begin(), partners.end(), q) != partners.end());
    }
    CHECK(e.error_annotation == changed);
    if (e.diagnosis == ssd::Diagnosis::kTd) CHECK_FALSE(changed);
    positives += changed;
  }
  CHECK(positives > 0);
}

TEST_CASE("rate zero leaves SSD speakers unchanged and rate one saturates") {
  auto spec = SmallSpec();
  spec.substitution_rate = 0.0;
  for (const auto &e : ssd::SynthGenerate(spec).manifest) CHECK(e.error_annotation == false);
  spec.substitution_rate = 1.0;
  for (const auto &e : ssd::SynthGenerate(spec).manifest)
    CHECK(e.error_annotation == (e.diagnosis == ssd::Diagnosis::kSsd));
}

TEST_CASE("backing and de-affrication are among the error patterns") {
  auto corpus = ssd::SynthGenerate(SmallSpec());
  auto has = [&](const std::string &from, const std::string &to) {
    const auto &v = corpus.partners.at(from);
    return std::find(v.begin(), v.end(), to) != v.end();
  };
  CHECK(has("t", "k"));
  CHECK(has("tsʰ", "s"));
}

TEST_CASE("written corpus reloads") {
  ssd::testing::TempDir dir("syn");
  auto corpus = ssd::SynthGenerate(SmallSpec());
  ssd::WriteSyntheticCorpus(dir.Path().string(), corpus);
  auto manifest = ssd::LoadManifest(dir.File("manifest.tsv"));
  CHECK(manifest.size() == corpus.manifest.size());
  CHECK(ssd::SerializeFeatureArchive(ssd::ReadFeatureArchive(dir.File("features.ssdf"))) ==
        ssd::SerializeFeatureArchive(corpus.features));
  CHECK(ssd::ReadLexicon(dir.File("lexicon.txt")) == corpus.lexicon);
  CHECK(ssd::ReadLabels(dir.File("labels.tsv")).size() == 8);
}

TEST_CASE("invalid synthetic specs") {
  auto spec = SmallSpec();
  spec.substitution_rate = 1.5;
  CHECK_THROWS_AS(ssd::SynthGenerate(spec), ssd::ValidationError);
  spec = SmallSpec();
  spec.consonants = {"aː"};
  CHECK_THROWS_AS(ssd::SynthGenerate(spec), ssd::ValidationError);
  spec.consonants = {"l"};  // no phone differs from /l/ in a single attribute
  CHECK_THROWS_WITH_AS(ssd::SynthGenerate(spec), doctest::Contains("no confusable partner"),
                       ssd::ValidationError);
}
