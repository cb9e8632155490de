// src/spectrum.h

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

#ifndef SSD_SRC_SPECTRUM_H_
#define SSD_SRC_SPECTRUM_H_

#include <fftw3.h>

#include <span>
#include <vector>

namespace ssd::internal {

/// Power spectrum |X_k|^2, k = 0..n/2, of a zero-padded real frame. Owns an
/// FFTW plan and its buffers; one instance per thread.
class PowerSpectrum {
 public:
  explicit PowerSpectrum(int fft_size);
  ~PowerSpectrum();
  PowerSpectrum(const PowerSpectrum &) = delete;
  PowerSpectrum &operator=(const PowerSpectrum &) = delete;

  int FftSize() const { return n_; }
  int NumBins() const { return n_ / 2 + 1; }

  /// `frame` must not be longer than the FFT size; `out` gets NumBins().
  void Compute(std::span<const double> frame, std::vector<double> *out);

 private:
  int n_;
  double *in_;
  fftw_complex *spec_;
  fftw_plan plan_;
};

int NextPowerOfTwo(int n);

std::vector<double> HammingWindow(int n);

}  // namespace ssd::internal

#endif  // SSD_SRC_SPECTRUM_H_
