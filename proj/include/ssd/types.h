// include/ssd/types.h

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

#ifndef SSD_TYPES_H_
#define SSD_TYPES_H_

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>

namespace ssd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class FeatureKind : std::uint8_t {
  kFilterbank = 0,
  kMfcc = 1,
  kLpr = 2,
  kEmbedding = 3,
  kPosterior = 4,
};

std::string_view ToString(FeatureKind kind);
/// Throws ValidationError on an unknown name.
FeatureKind FeatureKindFromString(std::string_view name);

/// Frame-level features of one utterance: `frames` is T x D, one row per
/// frame.
struct FeatureMatrix {
  Matrix frames;
  double frame_shift = 0.01;
  FeatureKind kind = FeatureKind::kFilterbank;
  std::string utterance_id;

  Eigen::Index NumFrames() const { return frames.rows(); }
  Eigen::Index Dim() const { return frames.cols(); }

  /// Throws ValidationError unless T >= 1, D >= 1 and all entries are finite.
  void Validate() const;
};

enum class RepresentationKind : std::uint8_t {
  kIvector = 0,
  kFunctional = 1,
  kAccuracyStack = 2,
  kProjected = 3,
};

std::string_view ToString(RepresentationKind kind);
RepresentationKind RepresentationKindFromString(std::string_view name);

/// Fixed-dimension vector describing one utterance, word or speaker.
struct SpeakerRepresentation {
  std::string id;
  RepresentationKind kind = RepresentationKind::kIvector;
  Vector values;
};

/// Binary diagnosis; the positive class is the disordered one.
enum class Diagnosis : std::uint8_t { kTd = 0, kSsd = 1 };

inline int ToLabel(Diagnosis d) { return d == Diagnosis::kSsd ? 1 : 0; }

}  // namespace ssd

#endif  // SSD_TYPES_H_
