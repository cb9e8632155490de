// include/ssd/gmm.h

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

#ifndef SSD_GMM_H_
#define SSD_GMM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ssd/types.h"

namespace ssd {

/// Diagonal-covariance Gaussian mixture; the universal background model.
class DiagGmm {
 public:
  DiagGmm() = default;
  /// Throws ValidationError unless weights form a simplex (within 1e-9),
  /// shapes agree and every variance is positive.
  DiagGmm(Vector weights, Matrix means, Matrix variances);

  int NumComponents() const { return static_cast<int>(weights_.size()); }
  int Dim() const { return static_cast<int>(means_.cols()); }
  const Vector &Weights() const { return weights_; }
  const Matrix &Means() const { return means_; }
  const Matrix &Variances() const { return variances_; }

  /// T x C matrix of log(w_c N(x_t; mu_c, Sigma_c)).
  Matrix ComponentLogLikelihoods(const Matrix &frames) const;
  /// Per-frame log-likelihood, and (optionally) T x C responsibilities.
  Vector LogLikelihood(const Matrix &frames, Matrix *posteriors = nullptr) const;

 private:
  void Precompute();

  Vector weights_;
  Matrix means_;
  Matrix variances_;
  Matrix inv_vars_;          // C x D
  Matrix means_inv_vars_;    // C x D
  Vector log_consts_;        // C
};

struct UbmOptions {
  int n_components = 256;
  int n_iters = 20;
  std::uint64_t seed = 0;
  /// Variance floor as a fraction of the global per-dimension variance.
  double variance_floor_scale = 1e-3;
  std::size_t kmeans_subsample = 100000;
  int kmeans_iters = 10;
};

struct UbmTraining {
  DiagGmm gmm;
  /// Total data log-likelihood of the initial model and after every EM
  /// iteration (n_iters + 1 values).
  std::vector<double> log_likelihoods;
};

/// EM training of a diagonal GMM, initialized by seeded k-means++ plus Lloyd
/// iterations on a frame subsample. Needs at least 10 frames per component.
UbmTraining TrainUbm(std::span<const FeatureMatrix> features, const UbmOptions &options = {});

/// Zeroth- and centered first-order Baum-Welch statistics of one utterance.
struct BaumWelchStats {
  Vector n;  // C
  Matrix f;  // C x D, f_c = sum_t gamma_t(c) (x_t - m_c)
  double total_frames = 0.0;

  BaumWelchStats &operator+=(const BaumWelchStats &other);
};

BaumWelchStats ZeroStats(int n_components, int dim);

BaumWelchStats AccumulateStats(const DiagGmm &ubm, const FeatureMatrix &features);

}  // namespace ssd

#endif  // SSD_GMM_H_
