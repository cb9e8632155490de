// src/gmm.cc

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

#include "ssd/gmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "ssd/error.h"
#include "ssd/log.h"

namespace ssd {

DiagGmm::DiagGmm(Vector weights, Matrix means, Matrix variances)
    : weights_(std::move(weights)), means_(std::move(means)), variances_(std::move(variances)) {
  if (weights_.size() < 1) throw ValidationError("DiagGmm needs at least one component");
  if (means_.rows() != weights_.size() || variances_.rows() != weights_.size() ||
      variances_.cols() != means_.cols() || means_.cols() < 1)
    throw DimensionError("DiagGmm: inconsistent parameter shapes");
  if ((weights_.array() < 0).any() || std::abs(weights_.sum() - 1.0) > 1e-9)
    throw ValidationError("DiagGmm: weights must be non-negative and sum to 1");
  if (!(variances_.array() > 0).all() || !variances_.allFinite() || !means_.allFinite())
    throw ValidationError("DiagGmm: variances must be positive and parameters finite");
  Precompute();
}

void DiagGmm::Precompute() {
  const int c_max = NumComponents();
  const double d = Dim();
  inv_vars_ = variances_.cwiseInverse();
  means_inv_vars_ = means_.cwiseProduct(inv_vars_);
  log_consts_.resize(c_max);
  for (int c = 0; c < c_max; ++c) {
    double lw = weights_(c) > 0 ? std::log(weights_(c)) : -std::numeric_limits<double>::infinity();
    log_consts_(c) = lw - 0.5 * (d * std::log(2.0 * std::numbers::pi) +
                                 variances_.row(c).array().log().sum() +
                                 means_.row(c).dot(means_inv_vars_.row(c)));
  }
}

Matrix DiagGmm::ComponentLogLikelihoods(const Matrix &frames) const {
  if (frames.cols() != Dim())
    throw DimensionError("DiagGmm: frames have dimension " + std::to_string(frames.cols()) +
                         ", model has " + std::to_string(Dim()));
  Matrix ll = frames * means_inv_vars_.transpose();
  ll.noalias() -= 0.5 * (frames.array().square().matrix() * inv_vars_.transpose());
  ll.rowwise() += log_consts_.transpose();
  return ll;
}

Vector DiagGmm::LogLikelihood(const Matrix &frames, Matrix *posteriors) const {
  Matrix ll = ComponentLogLikelihoods(frames);
  Vector total(ll.rows());
  for (Eigen::Index t = 0; t < ll.rows(); ++t) {
    double mx = ll.row(t).maxCoeff();
    auto shifted = (ll.row(t).array() - mx).exp();
    double s = shifted.sum();
    total(t) = mx + std::log(s);
    if (posteriors) ll.row(t) = shifted / s;
  }
  if (posteriors) *posteriors = std::move(ll);
  return total;
}

namespace {

// Seeded k-means++ followed by Lloyd iterations. Returns centers and the
// final assignment of every row of `x`.
Matrix KMeans(const Matrix &x, int k, int iters, std::mt19937_64 &rng,
              std::vector<int> *assignment) {
  const Eigen::Index n = x.rows();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix centers(k, x.cols());
  auto first = static_cast<Eigen::Index>(unif(rng) * static_cast<double>(n));
  centers.row(0) = x.row(std::min(first, n - 1));
  Vector dist = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = dist.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      double r = unif(rng) * total, acc = 0.0;
      for (pick = 0; pick < n - 1; ++pick) {
        acc += dist(pick);
        if (acc > r) break;
      }
    } else {
      pick = std::min(static_cast<Eigen::Index>(unif(rng) * static_cast<double>(n)), n - 1);
    }
    centers.row(c) = x.row(pick);
    dist = dist.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  assignment->assign(static_cast<std::size_t>(n), 0);
  for (int it = 0; it <= iters; ++it) {
    // Squared distances via |x|^2 - 2 x.c + |c|^2.
    Matrix cross = x * centers.transpose();
    Vector cnorm = centers.rowwise().squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best;
      (cnorm.transpose() - 2.0 * cross.row(i)).minCoeff(&best);
      (*assignment)[i] = static_cast<int>(best);
    }
    if (it == iters) break;
    Matrix sums = Matrix::Zero(k, x.cols());
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row((*assignment)[i]) += x.row(i);
      counts((*assignment)[i]) += 1.0;
    }
    for (int c = 0; c < k; ++c)
      if (counts(c) > 0) centers.row(c) = sums.row(c) / counts(c);
  }
  return centers;
}

}  // namespace

UbmTraining TrainUbm(std::span<const FeatureMatrix> features, const UbmOptions &options) {
  const int k = options.n_components;
  if (k < 1) throw ValidationError("TrainUbm: n_components must be >= 1");
  Eigen::Index total = 0, dim = -1;
  for (const auto &f : features) {
    if (dim < 0) dim = f.Dim();
    if (f.Dim() != dim) throw DimensionError("TrainUbm: inconsistent feature dimensions");
    total += f.NumFrames();
  }
  if (total < 10 * static_cast<Eigen::Index>(k))
    throw ValidationError("TrainUbm: " + std::to_string(total) + " frames is too few for " +
                          std::to_string(k) + " components (need >= 10 per component)");
  Matrix x(total, dim);
  Eigen::Index row = 0;
  for (const auto &f : features) {
    x.middleRows(row, f.NumFrames()) = f.frames;
    row += f.NumFrames();
  }
  if (!x.allFinite()) throw ValidationError("TrainUbm: non-finite features");

  Vector global_mean = x.colwise().mean().transpose();
  Vector global_var = (x.rowwise() - global_mean.transpose()).colwise().squaredNorm().transpose() /
                      static_cast<double>(total);
  Vector floor = (options.variance_floor_scale * global_var).cwiseMax(1e-10);

  std::mt19937_64 rng(options.seed);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t n_sub = std::min<std::size_t>(idx.size(), std::max<std::size_t>(options.kmeans_subsample, k));
  if (n_sub < idx.size()) {
    for (std::size_t i = 0; i < n_sub; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(n_sub);
    std::sort(idx.begin(), idx.end());
  }
  Matrix sub(static_cast<Eigen::Index>(idx.size()), dim);
  for (std::size_t i = 0; i < idx.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);

  std::vector<int> assign;
  Matrix means = KMeans(sub, k, options.kmeans_iters, rng, &assign);
  Matrix vars = Matrix::Zero(k, dim);
  Vector counts = Vector::Zero(k);
  for (Eigen::Index i = 0; i < sub.rows(); ++i) {
    int c = assign[static_cast<std::size_t>(i)];
    vars.row(c) += (sub.row(i) - means.row(c)).array().square().matrix();
    counts(c) += 1.0;
  }
  Vector weights(k);
  for (int c = 0; c < k; ++c) {
    if (counts(c) >= 2)
      vars.row(c) /= counts(c);
    else
      vars.row(c) = global_var.transpose();
    vars.row(c) = vars.row(c).cwiseMax(floor.transpose());
    weights(c) = (counts(c) + 1.0) / (static_cast<double>(sub.rows()) + k);
  }
  weights /= weights.sum();

  UbmTraining result;
  result.gmm = DiagGmm(weights, means, vars);
  Matrix post;
  const Matrix x_sq = x.array().square().matrix();
  for (int it = 0; it <= options.n_iters; ++it) {
    double ll = result.gmm.LogLikelihood(x, &post).sum();
    result.log_likelihoods.push_back(ll);
    SSD_VLOG << "UBM iteration " << it << " log-likelihood per frame "
             << ll / static_cast<double>(total);
    if (it == options.n_iters) break;
    Vector occ = post.colwise().sum().transpose();
    Matrix s1 = post.transpose() * x;
    Matrix s2 = post.transpose() * x_sq;
    Matrix new_means = result.gmm.Means();
    Matrix new_vars = result.gmm.Variances();
    for (int c = 0; c < k; ++c) {
      if (occ(c) < 1e-10) continue;
      new_means.row(c) = s1.row(c) / occ(c);
      new_vars.row(c) = (s2.row(c) / occ(c) - new_means.row(c).array().square().matrix())
                            .cwiseMax(floor.transpose());
    }
    Vector new_weights = occ / occ.sum();
    result.gmm = DiagGmm(new_weights, new_means, new_vars);
  }
  return result;
}

BaumWelchStats &BaumWelchStats::operator+=(const BaumWelchStats &other) {
  if (n.size() != other.n.size() || f.rows() != other.f.rows() || f.cols() != other.f.cols())
    throw DimensionError("BaumWelchStats: shape mismatch");
  n += other.n;
  f += other.f;
  total_frames += other.total_frames;
  return *this;
}

BaumWelchStats ZeroStats(int n_components, int dim) {
  BaumWelchStats s;
  s.n = Vector::Zero(n_components);
  s.f = Matrix::Zero(n_components, dim);
  return s;
}

BaumWelchStats AccumulateStats(const DiagGmm &ubm, const FeatureMatrix &features) {
  if (features.Dim() != ubm.Dim())
    throw DimensionError("AccumulateStats: features have dimension " +
                         std::to_string(features.Dim()) + ", UBM has " + std::to_string(ubm.Dim()));
  BaumWelchStats s = ZeroStats(ubm.NumComponents(), ubm.Dim());
  if (features.NumFrames() == 0) return s;
  Matrix post;
  ubm.LogLikelihood(features.frames, &post);
  s.n = post.colwise().sum().transpose();
  s.f = post.transpose() * features.frames;
  s.f -= s.n.asDiagonal() * ubm.Means();
  s.total_frames = static_cast<double>(features.NumFrames());
  return s;
}

}  // namespace ssd
