// include/ssd/paralinguistics.h

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

#ifndef SSD_PARALINGUISTICS_H_
#define SSD_PARALINGUISTICS_H_

#include <array>
#include <span>
#include <string_view>

#include "ssd/types.h"
#include "ssd/wav.h"

namespace ssd {

/// Frame-level low-level descriptors, in column order of LldTrack::values.
enum class Lld : int {
  kLogEnergy = 0,
  kPitch,             // Hz, 0 when unvoiced
  kZeroCrossingRate,  // sign changes per sample pair
  kSpectralCentroid,  // Hz
  kSpectralSlope,     // d log(power) / d kHz, least squares
  kBandRatioLow,      // share of power below 1 kHz
  kBandRatioMid,      // share of power in [1, 4) kHz
  kJitter,            // |P_t - P_{t-1}| / P_t over consecutive voiced frames
  kShimmer,           // |A_t - A_{t-1}| / A_t over consecutive voiced frames
};

inline constexpr int kNumLlds = 9;
inline constexpr int kNumFunctionals = 6;  // mean, std, p20, p50, p80, slope
inline constexpr int kFunctionalDim = kNumLlds * kNumFunctionals + 1;

std::string_view LldName(Lld lld);

/// Pitch, jitter and shimmer; their functionals only use voiced frames.
bool IsPitchDerived(Lld lld);

struct LldOptions {
  double frame_length = 0.025;
  double frame_shift = 0.010;
  double log_floor = 1e-10;
  double pitch_min = 60.0;
  double pitch_max = 500.0;
  /// Minimum normalized cross-correlation peak for a voiced frame.
  double voicing_threshold = 0.6;
};

struct LldTrack {
  Matrix values;  // T x kNumLlds
  double frame_shift = 0.01;

  Eigen::Index NumFrames() const { return values.rows(); }
  bool Voiced(Eigen::Index t) const { return values(t, static_cast<int>(Lld::kPitch)) > 0.0; }
};

/// Framing matches the filter-bank front-end (no pre-emphasis). Pitch is the
/// lag of the normalized cross-correlation maximum in [pitch_min,
/// pitch_max]; among lags within 90% of that maximum the shortest local
/// peak wins, which suppresses period-doubling errors.
LldTrack ComputeLlds(const AudioBuffer &audio, const LldOptions &options = {});

/// Linear-interpolation percentile of `values` (q in [0, 1]): rank q (n - 1)
/// in the sorted sample, interpolated between neighbouring order statistics.
double Percentile(std::span<const double> values, double q);

/// Least-squares slope of `values` against `times`; 0 for fewer than two
/// points or constant times.
double LinearSlope(std::span<const double> times, std::span<const double> values);

/// For each LLD in order: mean, standard deviation (population), 20th, 50th
/// and 80th percentiles, slope per frame. The last entry is the voiced-frame
/// fraction. Pitch-derived LLDs use voiced frames only and are all zero when
/// no frame is voiced. Requires at least 2 frames.
Vector ApplyFunctionals(const LldTrack &track);

}  // namespace ssd

#endif  // SSD_PARALINGUISTICS_H_
