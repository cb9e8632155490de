// include/ssd/archive.h

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

#ifndef SSD_ARCHIVE_H_
#define SSD_ARCHIVE_H_

#include <map>
#include <string>
#include <vector>

#include "ssd/types.h"

namespace ssd {

// Feature archive layout (all integers and floats little-endian):
//   "SSDF" | version u8 (=1) | count u32
//   per entry: id_len u32 | id bytes (UTF-8) | kind u8 | frame_shift f64 |
//              T u32 | D u32 | T*D f32, row-major
// Entries are written in id order.
//
// Representation archive layout:
//   "SSDR" | version u8 (=1) | count u32
//   per entry: id_len u32 | id bytes | kind u8 | dim u32 | dim f64

using FeatureArchive = std::map<std::string, FeatureMatrix>;
using RepresentationArchive = std::map<std::string, SpeakerRepresentation>;

inline constexpr std::uint8_t kArchiveVersion = 1;

/// Entry ids come from FeatureMatrix::utterance_id (the map key must match).
void WriteFeatureArchive(const std::string &path, const FeatureArchive &archive);
std::string SerializeFeatureArchive(const FeatureArchive &archive);

/// Throws IoError / FormatError; never reads past the end of the buffer.
FeatureArchive ReadFeatureArchive(const std::string &path);
FeatureArchive ParseFeatureArchive(const std::string &bytes);

void WriteRepresentationArchive(const std::string &path,
                                const RepresentationArchive &archive);
RepresentationArchive ReadRepresentationArchive(const std::string &path);

/// Label sidecar: one `id<TAB>label` line per entry, label 0 (TD) or 1
/// (SSD); the tokens TD and SSD are accepted on input.
void WriteLabels(const std::string &path, const std::map<std::string, int> &labels);
std::map<std::string, int> ReadLabels(const std::string &path);

/// Frame alignment: `utterance_id<TAB>label label ...`, one phone label per
/// frame, space separated.
using Alignment = std::map<std::string, std::vector<std::string>>;
void WriteAlignment(const std::string &path, const Alignment &alignment);
Alignment ReadAlignment(const std::string &path);

}  // namespace ssd

#endif  // SSD_ARCHIVE_H_
