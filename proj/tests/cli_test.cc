// tests/cli_test.cc

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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "test_util.h"

namespace {

struct Run {
  int code = -1;
  std::string err;
};

std::string Slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run Cli(const ssd::testing::TempDir &dir, const std::string &args) {
  std::string err = dir.File("stderr.txt");
  std::string cmd = std::string(SSD_SCREEN_BIN) + " -q " + args + " > /dev/null 2> " + err;
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, Slurp(err)};
}

const char *kSmall =
    " --set ivector.components=4 --set ivector.rank=4 --set ivector.tv_iters=3"
    " --set posterior.epochs=20";

}  // namespace

TEST_CASE("usage errors exit 2") {
  ssd::testing::TempDir dir("cli");
  CHECK(Cli(dir, "crossval --no-such-flag").code == 2);
  CHECK(Cli(dir, "").code == 2);
  CHECK(Cli(dir, "frobnicate").code == 2);
}

TEST_CASE("synth then crossval gives a full, reproducible report") {
  ssd::testing::TempDir dir("cli");
  std::string d = dir.File("corpus");
  REQUIRE(Cli(dir, "synth --out-dir " + d + " --td 6 --ssd 6 --words 6 --dim 8 --seed 2").code == 0);
  std::string base = "crossval --config " + d + "/experiment.cfg" + kSmall;
  REQUIRE(Cli(dir, base + " --out " + dir.File("a.json") + " --text " + dir.File("a.txt")).code == 0);
  REQUIRE(Cli(dir, base + " --out " + dir.File("b.json")).code == 0);
  std::string a = Slurp(dir.File("a.json"));
  CHECK(a == Slurp(dir.File("b.json")));
  auto j = nlohmann::json::parse(a);
  CHECK(j.at("folds").size() == 5);
  std::string text = Slurp(dir.File("a.txt"));
  int rows = 0;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) rows += line.rfind("   ", 0) == 0;
  CHECK(rows == 5);
  CHECK(text.find("\nmean ") != std::string::npos);

  CHECK(Cli(dir, base + " --set experiment.representation=ivector-mfcc --out " + dir.File("c.json")).code == 0);
  CHECK(Cli(dir, base + " --set no.such=1").code == 1);
}

TEST_CASE("step-by-step tools and the missing-speaker error") {
  ssd::testing::TempDir dir("cli");
  std::string d = dir.File("corpus");
  REQUIRE(Cli(dir, "synth --out-dir " + d + " --td 5 --ssd 5 --words 4 --dim 6 --seed 3").code == 0);
  std::string feats = " --features " + d + "/features.ssdf";
  REQUIRE(Cli(dir, "train-ubm" + feats + " --out " + dir.File("ubm.bin") + " --components 4 --iters 3").code == 0);
  REQUIRE(Cli(dir, "train-tv" + feats + " --model " + dir.File("ubm.bin") + " --out " +
                       dir.File("tv.bin") + " --rank 3 --iters 2 --manifest " + d + "/manifest.tsv")
              .code == 0);
  REQUIRE(Cli(dir, "extract" + feats + " --model " + dir.File("tv.bin") + " --out " +
                       dir.File("iv.ssdr") + " --manifest " + d + "/manifest.tsv")
              .code == 0);
  REQUIRE(Cli(dir, "train-backend --reps " + dir.File("iv.ssdr") + " --labels " + d +
                       "/labels.tsv --out " + dir.File("be.json") + " --lda")
              .code == 0);
  REQUIRE(Cli(dir, "evaluate --backend " + dir.File("be.json") + " --reps " + dir.File("iv.ssdr") +
                       " --labels " + d + "/labels.tsv --json " + dir.File("m.json"))
              .code == 0);
  auto m = nlohmann::json::parse(Slurp(dir.File("m.json")));
  CHECK(m.contains("mean_uar"));

  // A speaker listed in the manifest whose words never made it into the archive.
  {
    std::ofstream(d + "/manifest.tsv", std::ios::app) << "ghost07\tSSD\tw001\tx.wav\t\t\n";
  }
  Run r = Cli(dir, "extract" + feats + " --model " + dir.File("tv.bin") + " --out " +
                       dir.File("g.ssdr") + " --manifest " + d + "/manifest.tsv --speaker ghost07");
  CHECK(r.code == 1);
  CHECK(r.err.find("ghost07") != std::string::npos);

  r = Cli(dir, "train-ubm --features " + dir.File("absent.ssdf") + " --out " + dir.File("x.bin"));
  CHECK(r.code == 1);
}

TEST_CASE("posterior and lpr tools") {
  ssd::testing::TempDir dir("cli");
  std::string d = dir.File("corpus");
  REQUIRE(Cli(dir, "synth --out-dir " + d + " --td 3 --ssd 3 --words 3 --dim 6 --seed 4").code == 0);
  REQUIRE(Cli(dir, "train-posterior --features " + d + "/features.ssdf --alignment " + d +
                       "/alignment.txt --out " + dir.File("post.json") + " --epochs 5")
              .code == 0);
  REQUIRE(Cli(dir, "lpr --features " + d + "/features.ssdf --model " + dir.File("post.json") +
                       " --out " + dir.File("lpr.ssdf"))
              .code == 0);
  CHECK(Cli(dir, "lpr --out " + dir.File("x.ssdf")).code != 0);
}
