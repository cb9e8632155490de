// src/paralinguistics.cc

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

#include "ssd/paralinguistics.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spectrum.h"
#include "ssd/error.h"
#include "ssd/frontend.h"

namespace ssd {

std::string_view LldName(Lld lld) {
  switch (lld) {
    case Lld::kLogEnergy: return "log_energy";
    case Lld::kPitch: return "pitch";
    case Lld::kZeroCrossingRate: return "zcr";
    case Lld::kSpectralCentroid: return "spectral_centroid";
    case Lld::kSpectralSlope: return "spectral_slope";
    case Lld::kBandRatioLow: return "band_ratio_0_1k";
    case Lld::kBandRatioMid: return "band_ratio_1k_4k";
    case Lld::kJitter: return "jitter";
    case Lld::kShimmer: return "shimmer";
  }
  return "unknown";
}

bool IsPitchDerived(Lld lld) {
  return lld == Lld::kPitch || lld == Lld::kJitter || lld == Lld::kShimmer;
}

namespace {

// Returns the pitch in Hz, or 0 for an unvoiced frame.
double EstimatePitch(std::span<const double> x, int sample_rate, const LldOptions &opt) {
  const auto n = static_cast<int>(x.size());
  int min_lag = std::max(2, static_cast<int>(std::floor(sample_rate / opt.pitch_max)));
  int max_lag = std::min(n - 2, static_cast<int>(std::ceil(sample_rate / opt.pitch_min)));
  if (max_lag <= min_lag) return 0.0;
  std::vector<double> ncc(static_cast<std::size_t>(max_lag + 2), 0.0);
  double best = 0.0;
  for (int lag = min_lag - 1; lag <= max_lag + 1 && lag < n; ++lag) {
    double xy = 0, xx = 0, yy = 0;
    for (int i = 0; i + lag < n; ++i) {
      xy += x[i] * x[i + lag];
      xx += x[i] * x[i];
      yy += x[i + lag] * x[i + lag];
    }
    double v = (xx > 0 && yy > 0) ? xy / std::sqrt(xx * yy) : 0.0;
    ncc[static_cast<std::size_t>(lag)] = v;
    if (lag >= min_lag && lag <= max_lag) best = std::max(best, v);
  }
  if (best < opt.voicing_threshold) return 0.0;
  for (int lag = min_lag; lag <= max_lag; ++lag) {
    double v = ncc[lag];
    if (v >= 0.9 * best && v >= ncc[lag - 1] && v >= ncc[lag + 1]) {
      // Parabolic refinement of the peak position.
      double a = ncc[lag - 1], c = ncc[lag + 1];
      double denom = a - 2.0 * v + c;
      double offset = denom < 0 ? 0.5 * (a - c) / denom : 0.0;
      return sample_rate / (lag + std::clamp(offset, -0.5, 0.5));
    }
  }
  return 0.0;
}

}  // namespace

LldTrack ComputeLlds(const AudioBuffer &audio, const LldOptions &options) {
  audio.Validate();
  if (!(options.frame_shift > 0) || options.frame_length < options.frame_shift)
    throw ValidationError("frame length must be >= frame shift > 0");
  const auto frame = static_cast<Eigen::Index>(std::lround(options.frame_length * audio.sample_rate));
  const auto shift = static_cast<Eigen::Index>(std::lround(options.frame_shift * audio.sample_rate));
  const auto n = static_cast<Eigen::Index>(audio.samples.size());
  const Eigen::Index num_frames = NumFrames(n, frame, shift);
  if (num_frames < 1)
    throw ValidationError("audio (" + std::to_string(n) + " samples) is shorter than one frame");

  const int fft_size = internal::NextPowerOfTwo(static_cast<int>(frame));
  internal::PowerSpectrum spectrum(fft_size);
  const std::vector<double> window = internal::HammingWindow(static_cast<int>(frame));
  const int bins = spectrum.NumBins();
  std::vector<double> freq_khz(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) freq_khz[k] = k * static_cast<double>(audio.sample_rate) / fft_size / 1000.0;

  LldTrack track;
  track.frame_shift = options.frame_shift;
  track.values = Matrix::Zero(num_frames, kNumLlds);
  std::vector<double> windowed(static_cast<std::size_t>(frame)), power, log_power(freq_khz.size());
  double prev_period = 0.0, prev_amp = 0.0;
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    std::span<const double> x(audio.samples.data() + t * shift, static_cast<std::size_t>(frame));
    auto row = track.values.row(t);

    double energy = 0.0, peak = 0.0;
    int crossings = 0;
    for (Eigen::Index i = 0; i < frame; ++i) {
      energy += x[i] * x[i];
      peak = std::max(peak, std::abs(x[i]));
      if (i > 0 && ((x[i] >= 0) != (x[i - 1] >= 0))) ++crossings;
      windowed[i] = x[i] * window[i];
    }
    row(static_cast<int>(Lld::kLogEnergy)) = std::log(std::max(energy, options.log_floor));
    row(static_cast<int>(Lld::kZeroCrossingRate)) = crossings / static_cast<double>(frame - 1);

    spectrum.Compute(windowed, &power);
    double total = 0.0, weighted = 0.0, low = 0.0, mid = 0.0;
    for (int k = 0; k < bins; ++k) {
      total += power[k];
      weighted += power[k] * freq_khz[k] * 1000.0;
      if (freq_khz[k] < 1.0)
        low += power[k];
      else if (freq_khz[k] < 4.0)
        mid += power[k];
      log_power[k] = std::log(power[k] + options.log_floor);
    }
    if (total > 0) {
      row(static_cast<int>(Lld::kSpectralCentroid)) = weighted / total;
      row(static_cast<int>(Lld::kBandRatioLow)) = low / total;
      row(static_cast<int>(Lld::kBandRatioMid)) = mid / total;
    }
    row(static_cast<int>(Lld::kSpectralSlope)) = LinearSlope(freq_khz, log_power);

    double pitch = energy > options.log_floor ? EstimatePitch(x, audio.sample_rate, options) : 0.0;
    row(static_cast<int>(Lld::kPitch)) = pitch;
    if (pitch > 0) {
      double period = 1.0 / pitch;
      if (prev_period > 0) {
        row(static_cast<int>(Lld::kJitter)) = std::abs(period - prev_period) / period;
        if (peak > 0) row(static_cast<int>(Lld::kShimmer)) = std::abs(peak - prev_amp) / peak;
      }
      prev_period = period;
      prev_amp = peak;
    } else {
      prev_period = 0.0;
      prev_amp = 0.0;
    }
  }
  return track;
}

double Percentile(std::span<const double> values, double q) {
  if (values.empty()) throw ValidationError("Percentile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double rank = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(rank));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double LinearSlope(std::span<const double> times, std::span<const double> values) {
  const std::size_t n = std::min(times.size(), values.size());
  if (n < 2) return 0.0;
  double mt = 0, mv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += times[i];
    mv += values[i];
  }
  mt /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (times[i] - mt) * (values[i] - mv);
    sxx += (times[i] - mt) * (times[i] - mt);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

Vector ApplyFunctionals(const LldTrack &track) {
  const Eigen::Index frames = track.NumFrames();
  if (frames < 2)
    throw ValidationError("functionals need at least 2 frames, got " + std::to_string(frames));
  if (track.values.cols() != kNumLlds) throw DimensionError("LLD track has the wrong width");
  Vector out = Vector::Zero(kFunctionalDim);
  std::vector<double> times, vals;
  Eigen::Index voiced = 0;
  for (Eigen::Index t = 0; t < frames; ++t) voiced += track.Voiced(t);

  for (int l = 0; l < kNumLlds; ++l) {
    bool pitch_like = IsPitchDerived(static_cast<Lld>(l));
    times.clear();
    vals.clear();
    for (Eigen::Index t = 0; t < frames; ++t) {
      if (pitch_like && !track.Voiced(t)) continue;
      times.push_back(static_cast<double>(t));
      vals.push_back(track.values(t, l));
    }
    if (vals.empty()) continue;
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size());
    auto f = out.segment(l * kNumFunctionals, kNumFunctionals);
    f(0) = mean;
    f(1) = std::sqrt(var);
    f(2) = Percentile(vals, 0.2);
    f(3) = Percentile(vals, 0.5);
    f(4) = Percentile(vals, 0.8);
    f(5) = LinearSlope(times, vals);
  }
  out(kFunctionalDim - 1) = static_cast<double>(voiced) / static_cast<double>(frames);
  return out;
}

}  // namespace ssd
