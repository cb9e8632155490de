// include/ssd/frontend.h

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

#ifndef SSD_FRONTEND_H_
#define SSD_FRONTEND_H_

#include <span>
#include <vector>

#include "ssd/types.h"
#include "ssd/wav.h"

namespace ssd {

struct FbankOptions {
  double frame_length = 0.025;  // seconds
  double frame_shift = 0.010;   // seconds
  int n_mels = 80;
  double preemphasis = 0.97;
  double log_floor = 1e-10;
  double low_freq = 20.0;  // lowest filter edge, Hz; the highest is Nyquist
};

/// Number of frames for `num_samples` samples: 1 + (n - frame) / shift, or 0
/// when the signal is shorter than one frame.
Eigen::Index NumFrames(Eigen::Index num_samples, Eigen::Index frame_samples,
                       Eigen::Index shift_samples);

double HzToMel(double hz);
double MelToHz(double mel);

/// Triangular mel filters sampled on the FFT bins, one row per band. Each
/// triangle spans [f_{k}, f_{k+2}] with apex at f_{k+1}, where f are n_mels+2
/// points equally spaced on the mel scale between low_freq and Nyquist, and
/// is scaled by 2 / (f_{k+2} - f_{k}) so its continuous area is one.
Matrix MelFilterbank(int n_mels, int fft_size, int sample_rate, double low_freq);

/// Apex frequency of every band, in Hz.
std::vector<double> MelCenterFrequencies(int n_mels, int sample_rate,
                                         double low_freq);

/// Log mel filter-bank energies. Pipeline per frame: signal-level
/// pre-emphasis y[n] = x[n] - a x[n-1] (x[-1] = 0), Hamming window, power
/// spectrum over the next power of two, mel filters, log(max(E, floor)).
FeatureMatrix ComputeFilterbank(const AudioBuffer &audio,
                                const FbankOptions &opts = {});

/// Orthonormal DCT-II basis, n x n, row k holds coefficient k.
Matrix DctMatrix(int n);

/// Keeps DCT coefficients 0..n_ceps-1 of every log-mel frame.
FeatureMatrix ComputeMfcc(const FeatureMatrix &fbank, int n_ceps);

struct CmvnStats {
  Vector mean;
  Vector variance;
};

/// Per-dimension mean and (population) variance.
CmvnStats ComputeCmvnStats(const FeatureMatrix &features);

/// Subtracts the mean and divides by the standard deviation; dimensions
/// whose variance is numerically zero are only centered.
FeatureMatrix ApplyCmvn(const FeatureMatrix &features, const CmvnStats &stats);

struct CmvnResult {
  FeatureMatrix features;
  CmvnStats stats;
};

/// Normalizes an utterance with its own statistics. Requires T >= 2.
CmvnResult Cmvn(const FeatureMatrix &features);

/// Stacks frames in order. All parts must share kind, dimension and frame
/// shift; the result id joins the constituent ids with '+'.
FeatureMatrix ConcatUtterances(std::span<const FeatureMatrix> parts);

/// Appends delta and delta-delta coefficients (regression window `window`),
/// tripling the dimension.
FeatureMatrix AppendDeltas(const FeatureMatrix &features, int window = 2);

}  // namespace ssd

#endif  // SSD_FRONTEND_H_
