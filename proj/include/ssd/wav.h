// include/ssd/wav.h

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

#ifndef SSD_WAV_H_
#define SSD_WAV_H_

#include <span>
#include <string>
#include <vector>

namespace ssd {

/// Mono waveform with samples scaled to [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;

  double Duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  /// Throws ValidationError on a non-positive rate, a non-finite sample or a
  /// sample outside [-1, 1].
  void Validate() const;
};

/// Reads a RIFF/WAVE file holding 16-bit PCM mono audio; sample values are
/// divided by 32768. Any other encoding raises UnsupportedEncodingError
/// naming the property that was rejected.
AudioBuffer LoadWav(const std::string &path);

/// Writes 16-bit PCM mono. Samples are clipped to [-1, 1) and rounded.
void WriteWav(const std::string &path, const AudioBuffer &audio);

/// Joins buffers that share one sample rate.
AudioBuffer ConcatAudio(std::span<const AudioBuffer> parts);

}  // namespace ssd

#endif  // SSD_WAV_H_
