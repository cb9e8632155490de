// src/frontend.cc

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

#include "ssd/frontend.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectrum.h"
#include "ssd/error.h"

namespace ssd {

std::string_view ToString(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kFilterbank: return "filterbank";
    case FeatureKind::kMfcc: return "mfcc";
    case FeatureKind::kLpr: return "lpr";
    case FeatureKind::kEmbedding: return "embedding";
    case FeatureKind::kPosterior: return "posterior";
  }
  return "unknown";
}

FeatureKind FeatureKindFromString(std::string_view name) {
  for (auto k : {FeatureKind::kFilterbank, FeatureKind::kMfcc, FeatureKind::kLpr,
                 FeatureKind::kEmbedding, FeatureKind::kPosterior})
    if (ToString(k) == name) return k;
  throw ValidationError("unknown feature kind: " + std::string(name));
}

void FeatureMatrix::Validate() const {
  if (frames.rows() < 1 || frames.cols() < 1)
    throw ValidationError("feature matrix '" + utterance_id + "' is empty");
  if (!frames.allFinite())
    throw ValidationError("feature matrix '" + utterance_id +
                          "' has non-finite entries");
}

Eigen::Index NumFrames(Eigen::Index num_samples, Eigen::Index frame_samples,
                       Eigen::Index shift_samples) {
  if (num_samples < frame_samples) return 0;
  return 1 + (num_samples - frame_samples) / shift_samples;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

std::vector<double> MelEdges(int n_mels, int sample_rate, double low_freq) {
  double lo = HzToMel(low_freq), hi = HzToMel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<std::size_t>(n_mels + 2));
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = MelToHz(lo + (hi - lo) * i / (n_mels + 1));
  return edges;
}

struct Framing {
  Eigen::Index frame = 0, shift = 0;
};

Framing CheckFraming(const AudioBuffer &audio, double frame_length, double frame_shift) {
  if (!(frame_shift > 0) || frame_length < frame_shift)
    throw ValidationError("frame length must be >= frame shift > 0");
  Framing f;
  f.frame = std::lround(frame_length * audio.sample_rate);
  f.shift = std::lround(frame_shift * audio.sample_rate);
  if (f.shift < 1) throw ValidationError("frame shift is shorter than one sample");
  return f;
}

}  // namespace

std::vector<double> MelCenterFrequencies(int n_mels, int sample_rate, double low_freq) {
  auto edges = MelEdges(n_mels, sample_rate, low_freq);
  return {edges.begin() + 1, edges.end() - 1};
}

Matrix MelFilterbank(int n_mels, int fft_size, int sample_rate, double low_freq) {
  if (n_mels < 1) throw ValidationError("n_mels must be >= 1");
  if (low_freq < 0 || low_freq >= sample_rate / 2.0)
    throw ValidationError("low_freq must lie in [0, Nyquist)");
  auto edges = MelEdges(n_mels, sample_rate, low_freq);
  int bins = fft_size / 2 + 1;
  Matrix banks = Matrix::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    double scale = 2.0 / (right - left);
    for (int k = 0; k < bins; ++k) {
      double f = static_cast<double>(k) * sample_rate / fft_size;
      double w = 0.0;
      if (f > left && f <= center)
        w = (f - left) / (center - left);
      else if (f > center && f < right)
        w = (right - f) / (right - center);
      banks(m, k) = w * scale;
    }
  }
  return banks;
}

FeatureMatrix ComputeFilterbank(const AudioBuffer &audio, const FbankOptions &opts) {
  audio.Validate();
  Framing framing = CheckFraming(audio, opts.frame_length, opts.frame_shift);
  auto n = static_cast<Eigen::Index>(audio.samples.size());
  Eigen::Index num_frames = NumFrames(n, framing.frame, framing.shift);
  if (num_frames < 1)
    throw ValidationError("audio (" + std::to_string(n) +
                          " samples) is shorter than one frame");

  std::vector<double> emphasized(audio.samples.size());
  for (Eigen::Index i = 0; i < n; ++i)
    emphasized[i] = audio.samples[i] - (i > 0 ? opts.preemphasis * audio.samples[i - 1] : 0.0);

  int fft_size = internal::NextPowerOfTwo(static_cast<int>(framing.frame));
  internal::PowerSpectrum spectrum(fft_size);
  Matrix banks = MelFilterbank(opts.n_mels, fft_size, audio.sample_rate, opts.low_freq);
  std::vector<double> window = internal::HammingWindow(static_cast<int>(framing.frame));

  FeatureMatrix out;
  out.kind = FeatureKind::kFilterbank;
  out.frame_shift = opts.frame_shift;
  out.frames.resize(num_frames, opts.n_mels);
  std::vector<double> frame(static_cast<std::size_t>(framing.frame));
  std::vector<double> power;
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    const double *src = emphasized.data() + t * framing.shift;
    for (Eigen::Index i = 0; i < framing.frame; ++i) frame[i] = src[i] * window[i];
    spectrum.Compute(frame, &power);
    Eigen::Map<const Vector> p(power.data(), static_cast<Eigen::Index>(power.size()));
    Vector energies = banks * p;
    for (int m = 0; m < opts.n_mels; ++m)
      out.frames(t, m) = std::log(std::max(energies(m), opts.log_floor));
  }
  return out;
}

Matrix DctMatrix(int n) {
  Matrix dct(n, n);
  for (int k = 0; k < n; ++k) {
    double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int i = 0; i < n; ++i)
      dct(k, i) = scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
  }
  return dct;
}

FeatureMatrix ComputeMfcc(const FeatureMatrix &fbank, int n_ceps) {
  if (fbank.kind != FeatureKind::kFilterbank)
    throw ValidationError("ComputeMfcc expects filter-bank features, got " +
                          std::string(ToString(fbank.kind)));
  auto n_mels = static_cast<int>(fbank.Dim());
  if (n_ceps < 1 || n_ceps > n_mels)
    throw DimensionError("n_ceps must lie in [1, " + std::to_string(n_mels) + "], got " +
                         std::to_string(n_ceps));
  Matrix dct = DctMatrix(n_mels).topRows(n_ceps);
  FeatureMatrix out;
  out.kind = FeatureKind::kMfcc;
  out.frame_shift = fbank.frame_shift;
  out.utterance_id = fbank.utterance_id;
  out.frames = fbank.frames * dct.transpose();
  return out;
}

CmvnStats ComputeCmvnStats(const FeatureMatrix &features) {
  CmvnStats stats;
  auto t = static_cast<double>(features.NumFrames());
  stats.mean = features.frames.colwise().sum().transpose() / t;
  Matrix centered = features.frames.rowwise() - stats.mean.transpose();
  stats.variance = centered.colwise().squaredNorm().transpose() / t;
  return stats;
}

FeatureMatrix ApplyCmvn(const FeatureMatrix &features, const CmvnStats &stats) {
  if (stats.mean.size() != features.Dim() || stats.variance.size() != features.Dim())
    throw DimensionError("CMVN stats have dimension " + std::to_string(stats.mean.size()) +
                         ", features have " + std::to_string(features.Dim()));
  FeatureMatrix out = features;
  for (Eigen::Index d = 0; d < features.Dim(); ++d) {
    double mean = stats.mean(d), var = stats.variance(d);
    auto col = out.frames.col(d);
    col.array() -= mean;
    if (var > 1e-12 * std::max(1.0, mean * mean)) col /= std::sqrt(var);
  }
  return out;
}

CmvnResult Cmvn(const FeatureMatrix &features) {
  if (features.NumFrames() < 2)
    throw ValidationError("CMVN needs at least 2 frames, got " +
                          std::to_string(features.NumFrames()));
  CmvnResult r;
  r.stats = ComputeCmvnStats(features);
  r.features = ApplyCmvn(features, r.stats);
  return r;
}

FeatureMatrix ConcatUtterances(std::span<const FeatureMatrix> parts) {
  if (parts.empty()) throw ValidationError("ConcatUtterances: no parts");
  const FeatureMatrix &first = parts.front();
  Eigen::Index total = 0;
  std::string id;
  for (const auto &p : parts) {
    if (p.kind != first.kind)
      throw ValidationError("ConcatUtterances: mixed feature kinds (" +
                            std::string(ToString(p.kind)) + " vs " +
                            std::string(ToString(first.kind)) + ")");
    if (p.Dim() != first.Dim())
      throw DimensionError("ConcatUtterances: dimension mismatch (" +
                           std::to_string(p.Dim()) + " vs " + std::to_string(first.Dim()) + ")");
    if (p.frame_shift != first.frame_shift)
      throw ValidationError("ConcatUtterances: mixed frame shifts");
    total += p.NumFrames();
    if (!id.empty()) id += '+';
    id += p.utterance_id;
  }
  FeatureMatrix out;
  out.kind = first.kind;
  out.frame_shift = first.frame_shift;
  out.utterance_id = std::move(id);
  out.frames.resize(total, first.Dim());
  Eigen::Index row = 0;
  for (const auto &p : parts) {
    out.frames.middleRows(row, p.NumFrames()) = p.frames;
    row += p.NumFrames();
  }
  return out;
}

FeatureMatrix AppendDeltas(const FeatureMatrix &features, int window) {
  if (window < 1) throw ValidationError("delta window must be >= 1");
  const Eigen::Index t_max = features.NumFrames(), dim = features.Dim();
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += 2.0 * n * n;
  auto delta = [&](const Matrix &in) {
    Matrix out = Matrix::Zero(t_max, in.cols());
    for (Eigen::Index t = 0; t < t_max; ++t) {
      for (int n = 1; n <= window; ++n) {
        Eigen::Index fwd = std::min<Eigen::Index>(t + n, t_max - 1);
        Eigen::Index back = std::max<Eigen::Index>(t - n, 0);
        out.row(t) += n * (in.row(fwd) - in.row(back));
      }
    }
    return Matrix(out / denom);
  };
  Matrix d1 = delta(features.frames);
  Matrix d2 = delta(d1);
  FeatureMatrix out = features;
  out.frames.resize(t_max, 3 * dim);
  out.frames << features.frames, d1, d2;
  return out;
}

}  // namespace ssd
