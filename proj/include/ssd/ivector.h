// include/ssd/ivector.h

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

#ifndef SSD_IVECTOR_H_
#define SSD_IVECTOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssd/gmm.h"
#include "ssd/types.h"

namespace ssd {

/// Total-variability model mu = m + T w. Row block c of `t` (rows
/// [c*D, (c+1)*D)) is T_c; `sigma` stacks the UBM variances.
struct TotalVariability {
  int n_components = 0;
  int dim = 0;
  Vector m;      // C*D
  Matrix t;      // C*D x R
  Vector sigma;  // C*D

  int Rank() const { return static_cast<int>(t.cols()); }
  Eigen::Index SuperDim() const { return m.size(); }
  auto Block(int c) const { return t.middleRows(static_cast<Eigen::Index>(c) * dim, dim); }

  /// Zero matrix of the given rank on top of a UBM.
  static TotalVariability FromUbm(const DiagGmm &ubm, int rank);
};

/// Posterior of w given one utterance's statistics.
struct IvectorPosterior {
  Vector mean;       // w-hat
  Matrix precision;  // L = I + sum_c N_c T_c' Sigma_c^-1 T_c
};

IvectorPosterior IvectorPosteriorOf(const TotalVariability &tv, const BaumWelchStats &stats);

struct IVector {
  Vector w;
  std::string source_id;
  FeatureKind kind = FeatureKind::kMfcc;
};

/// Caches T_c' Sigma_c^-1 T_c for repeated extraction with one model.
class IvectorExtractor {
 public:
  explicit IvectorExtractor(const TotalVariability &tv);

  IvectorPosterior Posterior(const BaumWelchStats &stats) const;
  IVector Extract(const BaumWelchStats &stats, bool length_normalize = false) const;

 private:
  int n_components_;
  int dim_;
  int rank_;
  Matrix t_over_sigma_;      // C*D x R, rows of T divided by sigma
  std::vector<Matrix> quad_;  // per component R x R
};

/// Posterior mean of w. With `length_normalize` the result is scaled to
/// unit Euclidean norm (left at zero when it is zero).
IVector ExtractIvector(const TotalVariability &tv, const BaumWelchStats &stats,
                       bool length_normalize = false);

struct TvOptions {
  int rank = 100;
  int n_iters = 10;
  std::uint64_t seed = 0;
};

struct TvTraining {
  TotalVariability tv;
  /// Log marginal likelihood of the statistics, up to a T-independent
  /// constant: sum_i (b_i' L_i^-1 b_i - log|L_i|) / 2 with
  /// b_i = sum_c T_c' Sigma_c^-1 F_ic. One value for the initial model and
  /// one after every iteration; EM keeps it non-decreasing.
  std::vector<double> objective;
  int regularized_solves = 0;
};

/// EM for T over per-utterance statistics. T starts from seeded Gaussian
/// entries scaled by 0.1 * sqrt(mean UBM variance).
TvTraining TrainTv(const DiagGmm &ubm, std::span<const BaumWelchStats> stats,
                   const TvOptions &options = {});

/// One EM pass from an explicit starting point; exposed for tests.
TvTraining TrainTvFrom(TotalVariability init, std::span<const BaumWelchStats> stats, int n_iters);

/// Log marginal likelihood (see TvTraining::objective) of a statistics set.
double TvObjective(const TotalVariability &tv, std::span<const BaumWelchStats> stats);

// Model file layout (little-endian):
//   "SSDI" | version u8 (=1) | C u32 | D u32 | R u32 |
//   weights C f64 | means C*D f64 | variances C*D f64 |
//   m C*D f64 | T C*D*R f64 (row-major) | sigma C*D f64
// A UBM-only file has R = 0; m and sigma are still written.
struct IvectorModel {
  DiagGmm ubm;
  std::optional<TotalVariability> tv;
};

void SaveIvectorModel(const std::string &path, const IvectorModel &model);
IvectorModel LoadIvectorModel(const std::string &path);

}  // namespace ssd

#endif  // SSD_IVECTOR_H_
