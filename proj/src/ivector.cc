// src/ivector.cc

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

#include "ssd/ivector.h"

#include <cmath>
#include <random>

#include "binary_io.h"
#include "ssd/error.h"
#include "ssd/log.h"
#include "ssd/parallel.h"
#include "text_util.h"

namespace ssd {

TotalVariability TotalVariability::FromUbm(const DiagGmm &ubm, int rank) {
  TotalVariability tv;
  tv.n_components = ubm.NumComponents();
  tv.dim = ubm.Dim();
  const Eigen::Index cd = static_cast<Eigen::Index>(tv.n_components) * tv.dim;
  if (rank < 0 || rank > cd)
    throw ValidationError("i-vector rank " + std::to_string(rank) + " must lie in [0, " +
                          std::to_string(cd) + "]");
  tv.m.resize(cd);
  tv.sigma.resize(cd);
  for (int c = 0; c < tv.n_components; ++c) {
    tv.m.segment(static_cast<Eigen::Index>(c) * tv.dim, tv.dim) = ubm.Means().row(c).transpose();
    tv.sigma.segment(static_cast<Eigen::Index>(c) * tv.dim, tv.dim) =
        ubm.Variances().row(c).transpose();
  }
  tv.t = Matrix::Zero(cd, rank);
  return tv;
}

namespace {

Vector Flatten(const Matrix &f) {
  Vector v(f.size());
  for (Eigen::Index c = 0; c < f.rows(); ++c) v.segment(c * f.cols(), f.cols()) = f.row(c).transpose();
  return v;
}

void CheckStats(const TotalVariability &tv, const BaumWelchStats &stats) {
  if (stats.n.size() != tv.n_components || stats.f.rows() != tv.n_components ||
      stats.f.cols() != tv.dim)
    throw DimensionError("statistics are " + std::to_string(stats.f.rows()) + "x" +
                         std::to_string(stats.f.cols()) + ", model expects " +
                         std::to_string(tv.n_components) + "x" + std::to_string(tv.dim));
}

}  // namespace

IvectorExtractor::IvectorExtractor(const TotalVariability &tv)
    : n_components_(tv.n_components), dim_(tv.dim), rank_(tv.Rank()) {
  t_over_sigma_ = tv.sigma.cwiseInverse().asDiagonal() * tv.t;
  quad_.resize(static_cast<std::size_t>(tv.n_components));
  for (int c = 0; c < tv.n_components; ++c) {
    auto rows = t_over_sigma_.middleRows(static_cast<Eigen::Index>(c) * tv.dim, tv.dim);
    quad_[c] = tv.Block(c).transpose() * rows;
  }
}

IvectorPosterior IvectorExtractor::Posterior(const BaumWelchStats &stats) const {
  if (stats.n.size() != n_components_ || stats.f.rows() != n_components_ ||
      stats.f.cols() != dim_)
    throw DimensionError("statistics are " + std::to_string(stats.f.rows()) + "x" +
                         std::to_string(stats.f.cols()) + ", model expects " +
                         std::to_string(n_components_) + "x" + std::to_string(dim_));
  const int r = rank_;
  IvectorPosterior post;
  post.precision = Matrix::Identity(r, r);
  for (int c = 0; c < n_components_; ++c)
    if (stats.n(c) != 0.0) post.precision += stats.n(c) * quad_[c];
  Vector b = t_over_sigma_.transpose() * Flatten(stats.f);
  post.mean = post.precision.llt().solve(b);
  return post;
}

IVector IvectorExtractor::Extract(const BaumWelchStats &stats, bool length_normalize) const {
  IVector iv;
  iv.w = Posterior(stats).mean;
  if (length_normalize) {
    double norm = iv.w.norm();
    if (norm > 0) iv.w /= norm;
  }
  return iv;
}

IvectorPosterior IvectorPosteriorOf(const TotalVariability &tv, const BaumWelchStats &stats) {
  return IvectorExtractor(tv).Posterior(stats);
}

IVector ExtractIvector(const TotalVariability &tv, const BaumWelchStats &stats,
                       bool length_normalize) {
  return IvectorExtractor(tv).Extract(stats, length_normalize);
}

namespace {

struct EStepResult {
  Vector mean;
  Matrix cov;  // L^-1
  double objective = 0.0;
};

EStepResult EStep(const IvectorExtractor &extractor, const TotalVariability &tv,
                  const BaumWelchStats &stats) {
  IvectorPosterior post = extractor.Posterior(stats);
  Eigen::LLT<Matrix> llt(post.precision);
  EStepResult r;
  r.mean = post.mean;
  r.cov = llt.solve(Matrix::Identity(tv.Rank(), tv.Rank()));
  Vector b = post.precision * post.mean;
  double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  r.objective = 0.5 * (b.dot(post.mean) - logdet);
  return r;
}

std::vector<EStepResult> EStepAll(const TotalVariability &tv,
                                  std::span<const BaumWelchStats> stats) {
  IvectorExtractor extractor(tv);
  std::vector<EStepResult> results(stats.size());
  ParallelFor(stats.size(), [&](std::size_t i) { results[i] = EStep(extractor, tv, stats[i]); });
  return results;
}

}  // namespace

double TvObjective(const TotalVariability &tv, std::span<const BaumWelchStats> stats) {
  double total = 0.0;
  for (const auto &r : EStepAll(tv, stats)) total += r.objective;
  return total;
}

TvTraining TrainTvFrom(TotalVariability init, std::span<const BaumWelchStats> stats, int n_iters) {
  for (const auto &s : stats) CheckStats(init, s);
  TvTraining result;
  result.tv = std::move(init);
  TotalVariability &tv = result.tv;
  const int r = tv.Rank(), c_max = tv.n_components, d = tv.dim;
  for (int it = 0; it <= n_iters; ++it) {
    std::vector<EStepResult> e = EStepAll(tv, stats);
    double objective = 0.0;
    for (const auto &x : e) objective += x.objective;
    result.objective.push_back(objective);
    SSD_VLOG << "TV iteration " << it << " objective " << objective;
    if (it == n_iters || r == 0) break;

    std::vector<Matrix> a(static_cast<std::size_t>(c_max), Matrix::Zero(r, r));
    Matrix cross = Matrix::Zero(tv.SuperDim(), r);
    for (std::size_t i = 0; i < stats.size(); ++i) {
      Matrix second = e[i].cov + e[i].mean * e[i].mean.transpose();
      for (int c = 0; c < c_max; ++c)
        if (stats[i].n(c) != 0.0) a[c] += stats[i].n(c) * second;
      cross.noalias() += Flatten(stats[i].f) * e[i].mean.transpose();
    }
    for (int c = 0; c < c_max; ++c) {
      Eigen::LLT<Matrix> llt(a[c]);
      if (llt.info() != Eigen::Success) {
        ++result.regularized_solves;
        SSD_VLOG << "TV M-step: component " << c << " normal matrix is singular, adding 1e-8 I";
        llt.compute(a[c] + 1e-8 * Matrix::Identity(r, r));
      }
      auto rows = cross.middleRows(static_cast<Eigen::Index>(c) * d, d);
      tv.t.middleRows(static_cast<Eigen::Index>(c) * d, d) = llt.solve(rows.transpose()).transpose();
    }
  }
  if (result.regularized_solves > 0)
    SSD_LOG << "TV training regularized " << result.regularized_solves << " singular solves";
  return result;
}

TvTraining TrainTv(const DiagGmm &ubm, std::span<const BaumWelchStats> stats,
                   const TvOptions &options) {
  if (stats.size() < 2) throw ValidationError("TrainTv needs at least 2 utterances");
  TotalVariability tv = TotalVariability::FromUbm(ubm, options.rank);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double scale = 0.1 * std::sqrt(tv.sigma.mean());
  for (Eigen::Index i = 0; i < tv.t.rows(); ++i)
    for (Eigen::Index j = 0; j < tv.t.cols(); ++j) tv.t(i, j) = scale * normal(rng);
  return TrainTvFrom(std::move(tv), stats, options.n_iters);
}

void SaveIvectorModel(const std::string &path, const IvectorModel &model) {
  const DiagGmm &ubm = model.ubm;
  const int c_max = ubm.NumComponents(), d = ubm.Dim();
  TotalVariability tv = model.tv ? *model.tv : TotalVariability::FromUbm(ubm, 0);
  if (tv.n_components != c_max || tv.dim != d)
    throw DimensionError("SaveIvectorModel: TV model does not match the UBM");
  internal::ByteWriter w;
  w.Bytes("SSDI");
  w.Put<std::uint8_t>(1);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(c_max));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(d));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(tv.Rank()));
  for (int c = 0; c < c_max; ++c) w.Put<double>(ubm.Weights()(c));
  for (int c = 0; c < c_max; ++c)
    for (int j = 0; j < d; ++j) w.Put<double>(ubm.Means()(c, j));
  for (int c = 0; c < c_max; ++c)
    for (int j = 0; j < d; ++j) w.Put<double>(ubm.Variances()(c, j));
  for (Eigen::Index i = 0; i < tv.m.size(); ++i) w.Put<double>(tv.m(i));
  for (Eigen::Index i = 0; i < tv.t.rows(); ++i)
    for (Eigen::Index j = 0; j < tv.t.cols(); ++j) w.Put<double>(tv.t(i, j));
  for (Eigen::Index i = 0; i < tv.sigma.size(); ++i) w.Put<double>(tv.sigma(i));
  internal::WriteFile(path, w.Data());
}

IvectorModel LoadIvectorModel(const std::string &path) {
  std::string bytes = internal::ReadFile(path);
  internal::ByteReader rd(bytes, path);
  rd.Expect("SSDI");
  auto version = rd.Get<std::uint8_t>();
  if (version != 1) throw FormatError(path + ": unsupported version " + std::to_string(version));
  auto c_max = rd.Get<std::uint32_t>();
  auto d = rd.Get<std::uint32_t>();
  auto r = rd.Get<std::uint32_t>();
  const std::size_t cd = static_cast<std::size_t>(c_max) * d;
  rd.Need((c_max + 4 * cd + cd * r) * sizeof(double));
  Vector weights(c_max);
  Matrix means(c_max, d), vars(c_max, d);
  for (std::uint32_t c = 0; c < c_max; ++c) weights(c) = rd.Get<double>();
  for (std::uint32_t c = 0; c < c_max; ++c)
    for (std::uint32_t j = 0; j < d; ++j) means(c, j) = rd.Get<double>();
  for (std::uint32_t c = 0; c < c_max; ++c)
    for (std::uint32_t j = 0; j < d; ++j) vars(c, j) = rd.Get<double>();
  IvectorModel model;
  model.ubm = DiagGmm(weights, means, vars);
  TotalVariability tv = TotalVariability::FromUbm(model.ubm, static_cast<int>(r));
  for (std::size_t i = 0; i < cd; ++i) tv.m(static_cast<Eigen::Index>(i)) = rd.Get<double>();
  for (std::size_t i = 0; i < cd; ++i)
    for (std::uint32_t j = 0; j < r; ++j) tv.t(static_cast<Eigen::Index>(i), j) = rd.Get<double>();
  for (std::size_t i = 0; i < cd; ++i) tv.sigma(static_cast<Eigen::Index>(i)) = rd.Get<double>();
  if (!rd.AtEnd()) throw FormatError(path + ": trailing bytes");
  if (r > 0) model.tv = std::move(tv);
  return model;
}

}  // namespace ssd
