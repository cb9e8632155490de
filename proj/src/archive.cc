// src/archive.cc

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

#include "ssd/archive.h"

#include <sstream>

#include "binary_io.h"
#include "ssd/error.h"
#include "text_util.h"

namespace ssd {

std::string_view ToString(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::kIvector: return "ivector";
    case RepresentationKind::kFunctional: return "functional";
    case RepresentationKind::kAccuracyStack: return "accuracy-stack";
    case RepresentationKind::kProjected: return "projected";
  }
  return "unknown";
}

RepresentationKind RepresentationKindFromString(std::string_view name) {
  for (auto k : {RepresentationKind::kIvector, RepresentationKind::kFunctional,
                 RepresentationKind::kAccuracyStack, RepresentationKind::kProjected})
    if (ToString(k) == name) return k;
  throw ValidationError("unknown representation kind: " + std::string(name));
}

std::string SerializeFeatureArchive(const FeatureArchive &archive) {
  internal::ByteWriter w;
  w.Bytes("SSDF");
  w.Put<std::uint8_t>(kArchiveVersion);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(archive.size()));
  for (const auto &[id, m] : archive) {
    if (id != m.utterance_id)
      throw ValidationError("archive key '" + id + "' differs from utterance id '" +
                            m.utterance_id + "'");
    w.String(id);
    w.Put<std::uint8_t>(static_cast<std::uint8_t>(m.kind));
    w.Put<double>(m.frame_shift);
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(m.NumFrames()));
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(m.Dim()));
    for (Eigen::Index t = 0; t < m.NumFrames(); ++t)
      for (Eigen::Index d = 0; d < m.Dim(); ++d)
        w.Put<float>(static_cast<float>(m.frames(t, d)));
  }
  return w.Take();
}

void WriteFeatureArchive(const std::string &path, const FeatureArchive &archive) {
  internal::WriteFile(path, SerializeFeatureArchive(archive));
}

FeatureArchive ParseFeatureArchive(const std::string &bytes) {
  internal::ByteReader r(bytes, "feature archive");
  r.Expect("SSDF");
  auto version = r.Get<std::uint8_t>();
  if (version != kArchiveVersion)
    throw FormatError("feature archive: unsupported version " + std::to_string(version));
  auto count = r.Get<std::uint32_t>();
  FeatureArchive archive;
  for (std::uint32_t e = 0; e < count; ++e) {
    FeatureMatrix m;
    m.utterance_id = r.String();
    auto kind = r.Get<std::uint8_t>();
    if (kind > static_cast<std::uint8_t>(FeatureKind::kPosterior))
      throw FormatError("feature archive: entry '" + m.utterance_id +
                        "' has unknown kind tag " + std::to_string(kind));
    m.kind = static_cast<FeatureKind>(kind);
    m.frame_shift = r.Get<double>();
    auto rows = r.Get<std::uint32_t>();
    auto cols = r.Get<std::uint32_t>();
    r.Need(static_cast<std::size_t>(rows) * cols * sizeof(float));
    m.frames.resize(rows, cols);
    for (std::uint32_t t = 0; t < rows; ++t)
      for (std::uint32_t d = 0; d < cols; ++d) m.frames(t, d) = r.Get<float>();
    std::string id = m.utterance_id;
    if (!archive.emplace(id, std::move(m)).second)
      throw FormatError("feature archive: duplicate id '" + id + "'");
  }
  if (!r.AtEnd()) throw FormatError("feature archive: trailing bytes");
  return archive;
}

FeatureArchive ReadFeatureArchive(const std::string &path) {
  try {
    return ParseFeatureArchive(internal::ReadFile(path));
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteRepresentationArchive(const std::string &path,
                                const RepresentationArchive &archive) {
  internal::ByteWriter w;
  w.Bytes("SSDR");
  w.Put<std::uint8_t>(kArchiveVersion);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(archive.size()));
  for (const auto &[id, rep] : archive) {
    w.String(id);
    w.Put<std::uint8_t>(static_cast<std::uint8_t>(rep.kind));
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(rep.values.size()));
    for (Eigen::Index i = 0; i < rep.values.size(); ++i) w.Put<double>(rep.values(i));
  }
  internal::WriteFile(path, w.Data());
}

RepresentationArchive ReadRepresentationArchive(const std::string &path) {
  std::string bytes = internal::ReadFile(path);
  internal::ByteReader r(bytes, path);
  r.Expect("SSDR");
  auto version = r.Get<std::uint8_t>();
  if (version != kArchiveVersion)
    throw FormatError(path + ": unsupported version " + std::to_string(version));
  auto count = r.Get<std::uint32_t>();
  RepresentationArchive archive;
  for (std::uint32_t e = 0; e < count; ++e) {
    SpeakerRepresentation rep;
    rep.id = r.String();
    auto kind = r.Get<std::uint8_t>();
    if (kind > static_cast<std::uint8_t>(RepresentationKind::kProjected))
      throw FormatError(path + ": unknown representation kind " + std::to_string(kind));
    rep.kind = static_cast<RepresentationKind>(kind);
    auto dim = r.Get<std::uint32_t>();
    r.Need(static_cast<std::size_t>(dim) * sizeof(double));
    rep.values.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) rep.values(i) = r.Get<double>();
    std::string id = rep.id;
    archive.emplace(id, std::move(rep));
  }
  if (!r.AtEnd()) throw FormatError(path + ": trailing bytes");
  return archive;
}

void WriteLabels(const std::string &path, const std::map<std::string, int> &labels) {
  std::ostringstream out;
  for (const auto &[id, label] : labels) out << id << '\t' << label << '\n';
  internal::WriteFile(path, out.str());
}

std::map<std::string, int> ReadLabels(const std::string &path) {
  std::map<std::string, int> labels;
  auto lines = internal::ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (internal::Trim(lines[i]).empty()) continue;
    auto fields = internal::Split(lines[i], '\t');
    std::string where = path + ":" + std::to_string(i + 1);
    if (fields.size() != 2) throw FormatError(where + ": expected id<TAB>label");
    std::string tok = internal::Trim(fields[1]);
    int label;
    if (tok == "1" || tok == "SSD")
      label = 1;
    else if (tok == "0" || tok == "TD")
      label = 0;
    else
      throw FormatError(where + ": unknown label '" + tok + "'");
    labels[fields[0]] = label;
  }
  return labels;
}

void WriteAlignment(const std::string &path, const Alignment &alignment) {
  std::ostringstream out;
  for (const auto &[id, labels] : alignment) {
    out << id << '\t';
    for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? " " : "") << labels[i];
    out << '\n';
  }
  internal::WriteFile(path, out.str());
}

Alignment ReadAlignment(const std::string &path) {
  Alignment alignment;
  auto lines = internal::ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (internal::Trim(lines[i]).empty()) continue;
    std::size_t tab = lines[i].find('\t');
    if (tab == std::string::npos)
      throw FormatError(path + ":" + std::to_string(i + 1) + ": expected id<TAB>labels");
    alignment[lines[i].substr(0, tab)] = internal::SplitWhitespace(lines[i].substr(tab + 1));
  }
  return alignment;
}

}  // namespace ssd
