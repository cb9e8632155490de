// tests/ivector_test.cc

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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "ssd/error.h"
#include "ssd/ivector.h"
#include "test_util.h"

using ssd::testing::Gaussian;

namespace {

ssd::TotalVariability TinyModel(std::mt19937_64 &rng) {
  ssd::TotalVariability tv;
  tv.n_components = 2;
  tv.dim = 2;
  tv.m = Gaussian(4, 1, rng).col(0);
  tv.t = Gaussian(4, 2, rng, 0.7);
  tv.sigma = (Gaussian(4, 1, rng).array().abs() + 0.5).matrix().col(0);
  return tv;
}

ssd::BaumWelchStats RandomStats(std::mt19937_64 &rng, int c, int d) {
  std::uniform_real_distribution<double> occ(0.5, 40.0);
  ssd::BaumWelchStats s = ssd::ZeroStats(c, d);
  for (int i = 0; i < c; ++i) s.n(i) = occ(rng);
  s.f = Gaussian(c, d, rng, 3.0);
  return s;
}

}  // namespace

TEST_CASE("extracted i-vector is the posterior maximum") {
  std::mt19937_64 rng(21);
  auto tv = TinyModel(rng);
  for (int trial = 0; trial < 20; ++trial) {
    auto stats = RandomStats(rng, 2, 2);
    auto w = ssd::ExtractIvector(tv, stats).w;
    auto oracle = ssd::oracle::IvectorArgmax(tv, stats);
    CHECK(std::abs(w(0) - oracle[0]) < 1e-4);
    CHECK(std::abs(w(1) - oracle[1]) < 1e-4);
  }
}

TEST_CASE("empty utterances and zero T give the prior mean") {
  std::mt19937_64 rng(22);
  auto tv = TinyModel(rng);
  CHECK(ssd::ExtractIvector(tv, ssd::ZeroStats(2, 2)).w.norm() == 0.0);
  tv.t.setZero();
  CHECK(ssd::ExtractIvector(tv, RandomStats(rng, 2, 2)).w.norm() == 0.0);
}

TEST_CASE("i-vector is linear in first-order stats") {
  std::mt19937_64 rng(23);
  auto tv = TinyModel(rng);
  auto s = RandomStats(rng, 2, 2);
  auto w = ssd::ExtractIvector(tv, s).w;
  for (double alpha : {-2.0, 0.3, 7.0}) {
    auto scaled = s;
    scaled.f *= alpha;
    CHECK((ssd::ExtractIvector(tv, scaled).w - alpha * w).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("posterior precision minus identity is positive semidefinite") {
  std::mt19937_64 rng(24);
  ssd::TotalVariability tv;
  tv.n_components = 4;
  tv.dim = 3;
  tv.m = ssd::Vector::Zero(12);
  tv.t = Gaussian(12, 5, rng);
  tv.sigma = ssd::Vector::Constant(12, 0.8);
  for (int trial = 0; trial < 10; ++trial) {
    auto post = ssd::IvectorPosteriorOf(tv, RandomStats(rng, 4, 3));
    Eigen::SelfAdjointEigenSolver<ssd::Matrix> es(post.precision - ssd::Matrix::Identity(5, 5));
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
  }
}

TEST_CASE("length normalization yields unit norm") {
  std::mt19937_64 rng(25);
  auto tv = TinyModel(rng);
  auto iv = ssd::ExtractIvector(tv, RandomStats(rng, 2, 2), true);
  CHECK(iv.w.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("TV training recovers the generating subspace") {
  auto fx = ssd::oracle::MakeTvFixture(7);
  ssd::TvOptions opts;
  opts.rank = 2;
  opts.n_iters = 30;
  auto trained = ssd::TrainTv(fx.ubm, fx.stats, opts);
  CHECK(ssd::oracle::MaxPrincipalAngleDeg(trained.tv.t, fx.t_true) < 5.0);
  for (std::size_t i = 1; i < trained.objective.size(); ++i) {
    double prev = trained.objective[i - 1];
    CHECK(trained.objective[i] >= prev - 1e-6 * std::abs(prev));
  }
}

TEST_CASE("duplicating the training set leaves T unchanged") {
  auto fx = ssd::oracle::MakeTvFixture(8, 40, 50);
  ssd::TvOptions opts;
  opts.rank = 2;
  opts.n_iters = 5;
  auto doubled = fx.stats;
  doubled.insert(doubled.end(), fx.stats.begin(), fx.stats.end());
  auto a = ssd::TrainTv(fx.ubm, fx.stats, opts).tv.t;
  auto b = ssd::TrainTv(fx.ubm, doubled, opts).tv.t;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("zero-initialized T stays at the prior") {
  auto fx = ssd::oracle::MakeTvFixture(9, 10, 20);
  auto tv = ssd::TotalVariability::FromUbm(fx.ubm, 2);
  for (const auto &s : fx.stats) CHECK(ssd::ExtractIvector(tv, s).w.norm() == 0.0);
}

TEST_CASE("model files round-trip") {
  ssd::testing::TempDir dir("ivm");
  auto fx = ssd::oracle::MakeTvFixture(10, 10, 20);
  ssd::TvOptions opts;
  opts.rank = 2;
  opts.n_iters = 2;
  ssd::IvectorModel model{fx.ubm, ssd::TrainTv(fx.ubm, fx.stats, opts).tv};
  ssd::SaveIvectorModel(dir.File("m.bin"), model);
  auto back = ssd::LoadIvectorModel(dir.File("m.bin"));
  CHECK(back.ubm.Means() == model.ubm.Means());
  REQUIRE(back.tv.has_value());
  CHECK(back.tv->t == model.tv->t);
  CHECK(back.tv->sigma == model.tv->sigma);

  ssd::IvectorModel ubm_only{fx.ubm, std::nullopt};
  ssd::SaveIvectorModel(dir.File("u.bin"), ubm_only);
  CHECK_FALSE(ssd::LoadIvectorModel(dir.File("u.bin")).tv.has_value());
}

TEST_CASE("mismatched statistics are rejected") {
  std::mt19937_64 rng(26);
  auto tv = TinyModel(rng);
  CHECK_THROWS_AS(ssd::ExtractIvector(tv, ssd::ZeroStats(3, 2)), ssd::DimensionError);
}
