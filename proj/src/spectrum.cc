// src/spectrum.cc

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

#include "spectrum.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace ssd::internal {

namespace {
// The FFTW planner is not re-entrant.
std::mutex g_planner_mutex;
}  // namespace

PowerSpectrum::PowerSpectrum(int fft_size) : n_(fft_size) {
  std::lock_guard<std::mutex> lock(g_planner_mutex);
  in_ = fftw_alloc_real(static_cast<std::size_t>(n_));
  spec_ = fftw_alloc_complex(static_cast<std::size_t>(n_ / 2 + 1));
  plan_ = fftw_plan_dft_r2c_1d(n_, in_, spec_, FFTW_ESTIMATE);
}

PowerSpectrum::~PowerSpectrum() {
  std::lock_guard<std::mutex> lock(g_planner_mutex);
  fftw_destroy_plan(plan_);
  fftw_free(spec_);
  fftw_free(in_);
}

void PowerSpectrum::Compute(std::span<const double> frame, std::vector<double> *out) {
  std::fill(in_, in_ + n_, 0.0);
  std::copy(frame.begin(), frame.end(), in_);
  fftw_execute(plan_);
  out->resize(static_cast<std::size_t>(NumBins()));
  for (int k = 0; k < NumBins(); ++k)
    (*out)[k] = spec_[k][0] * spec_[k][0] + spec_[k][1] * spec_[k][1];
}

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> HammingWindow(int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (n == 1) return w;
  for (int i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  return w;
}

}  // namespace ssd::internal
