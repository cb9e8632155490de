// tests/archive_test.cc

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

#include <fstream>
#include <random>

#include "doctest.h"
#include "ssd/archive.h"
#include "ssd/error.h"
#include "test_util.h"

using ssd::testing::Gaussian;
using ssd::testing::TempDir;

namespace {

ssd::FeatureArchive Sample(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ssd::FeatureArchive ar;
  for (const char *id : {"spk1/w1", "spk1/w2", "spk2/w1"}) {
    ssd::FeatureMatrix m;
    m.utterance_id = id;
    m.kind = ssd::FeatureKind::kMfcc;
    m.frame_shift = 0.01;
    m.frames = Gaussian(7, 5, rng).cast<float>().cast<double>();
    ar[id] = m;
  }
  return ar;
}

}  // namespace

TEST_CASE("feature archive round-trips float-representable frames exactly") {
  auto ar = Sample(1);
  auto back = ssd::ParseFeatureArchive(ssd::SerializeFeatureArchive(ar));
  REQUIRE(back.size() == ar.size());
  for (const auto &[id, m] : ar) {
    const auto &b = back.at(id);
    CHECK(b.kind == m.kind);
    CHECK(b.frame_shift == m.frame_shift);
    CHECK(b.frames == m.frames);
  }
}

TEST_CASE("archive header carries magic and version") {
  std::string bytes = ssd::SerializeFeatureArchive(Sample(2));
  CHECK(bytes.substr(0, 4) == "SSDF");
  CHECK(static_cast<unsigned char>(bytes[4]) == ssd::kArchiveVersion);
}

TEST_CASE("damaged archives raise format errors") {
  std::string bytes = ssd::SerializeFeatureArchive(Sample(3));
  for (std::size_t cut : {std::size_t{2}, std::size_t{9}, bytes.size() / 2, bytes.size() - 1})
    CHECK_THROWS_AS(ssd::ParseFeatureArchive(bytes.substr(0, cut)), ssd::FormatError);
  CHECK_THROWS_AS(ssd::ParseFeatureArchive(bytes + "x"), ssd::FormatError);
  std::string wrong_version = bytes;
  wrong_version[4] = 9;
  CHECK_THROWS_AS(ssd::ParseFeatureArchive(wrong_version), ssd::FormatError);
}

TEST_CASE("representation archive keeps doubles bit-exact") {
  TempDir dir("rep");
  ssd::RepresentationArchive ar;
  ar["a"] = {"a", ssd::RepresentationKind::kIvector, ssd::Vector::LinSpaced(5, 0.1, 1.0 / 3.0)};
  ar["b"] = {"b", ssd::RepresentationKind::kAccuracyStack, ssd::Vector::Constant(2, 0.5)};
  ssd::WriteRepresentationArchive(dir.File("r.ssdr"), ar);
  auto back = ssd::ReadRepresentationArchive(dir.File("r.ssdr"));
  REQUIRE(back.size() == 2);
  CHECK(back.at("a").values == ar["a"].values);
  CHECK(back.at("b").kind == ssd::RepresentationKind::kAccuracyStack);
}

TEST_CASE("labels and alignments round-trip") {
  TempDir dir("lab");
  std::map<std::string, int> labels{{"td01", 0}, {"ssd01", 1}};
  ssd::WriteLabels(dir.File("l.tsv"), labels);
  CHECK(ssd::ReadLabels(dir.File("l.tsv")) == labels);
  std::ofstream(dir.File("named.tsv")) << "x\tSSD\ny\tTD\n";
  CHECK(ssd::ReadLabels(dir.File("named.tsv")) == std::map<std::string, int>{{"x", 1}, {"y", 0}});
  std::ofstream(dir.File("bad.tsv")) << "x\tmaybe\n";
  CHECK_THROWS_AS(ssd::ReadLabels(dir.File("bad.tsv")), ssd::FormatError);

  ssd::Alignment al{{"s/w", {"pʰ", "pʰ", "a", "a"}}, {"s/v", {"kʷ", "ɔ"}}};
  ssd::WriteAlignment(dir.File("a.txt"), al);
  CHECK(ssd::ReadAlignment(dir.File("a.txt")) == al);
}
