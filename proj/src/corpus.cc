// src/corpus.cc

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

#include "ssd/corpus.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "ssd/error.h"
#include "ssd/frontend.h"
#include "ssd/log.h"
#include "text_util.h"

namespace ssd {

namespace {

Diagnosis ParseDiagnosis(const std::string &tok, const std::string &where) {
  if (tok == "TD") return Diagnosis::kTd;
  if (tok == "SSD") return Diagnosis::kSsd;
  throw ValidationError(where + ": unknown diagnosis '" + tok + "' (expected TD or SSD)");
}

}  // namespace

Manifest ParseManifest(const std::string &text, const std::string &source) {
  auto lines = internal::SplitLines(text);
  std::size_t first = 0;
  while (first < lines.size() && internal::Trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw FormatError(source + ": empty manifest");

  std::map<std::string, std::size_t> column;
  auto header = internal::Split(lines[first], '\t');
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = internal::Trim(header[i]);
    if (!column.emplace(name, i).second)
      throw FormatError(source + ":" + std::to_string(first + 1) + ": duplicate column " + name);
  }
  for (const char *required : {"speaker_id", "diagnosis", "word_id", "path"})
    if (!column.count(required))
      throw FormatError(source + ":" + std::to_string(first + 1) + ": header lacks column " +
                        required);

  Manifest manifest;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (internal::Trim(lines[i]).empty()) continue;
    std::string where = source + ":" + std::to_string(i + 1);
    auto fields = internal::Split(lines[i], '\t');
    if (fields.size() != header.size())
      throw FormatError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    auto get = [&](const char *name) { return internal::Trim(fields[column.at(name)]); };
    ManifestEntry e;
    e.speaker_id = get("speaker_id");
    e.word_id = get("word_id");
    e.path = get("path");
    if (e.speaker_id.empty() || e.word_id.empty())
      throw ValidationError(where + ": empty speaker_id or word_id");
    e.diagnosis = ParseDiagnosis(get("diagnosis"), where);
    if (column.count("annotation")) {
      std::string a = get("annotation");
      if (a == "1")
        e.error_annotation = true;
      else if (a == "0")
        e.error_annotation = false;
      else if (!a.empty())
        throw ValidationError(where + ": annotation must be 0, 1 or empty, got '" + a + "'");
    }
    if (column.count("age_band")) {
      std::string a = get("age_band");
      if (!a.empty()) e.age_band = a;
    }
    manifest.push_back(std::move(e));
  }
  return manifest;
}

Manifest LoadManifest(const std::string &path) {
  return ParseManifest(internal::ReadFile(path), path);
}

void WriteManifest(const std::string &path, const Manifest &manifest) {
  std::ostringstream out;
  out << "speaker_id\tdiagnosis\tword_id\tpath\tannotation\tage_band\n";
  for (const auto &e : manifest) {
    out << e.speaker_id << '\t' << (e.diagnosis == Diagnosis::kSsd ? "SSD" : "TD") << '\t'
        << e.word_id << '\t' << e.path << '\t';
    if (e.error_annotation) out << (*e.error_annotation ? '1' : '0');
    out << '\t' << e.age_band.value_or("") << '\n';
  }
  internal::WriteFile(path, out.str());
}

std::map<std::string, Diagnosis> SpeakerDiagnoses(const Manifest &manifest) {
  std::map<std::string, Diagnosis> out;
  for (const auto &e : manifest) {
    auto [it, inserted] = out.emplace(e.speaker_id, e.diagnosis);
    if (!inserted && it->second != e.diagnosis)
      throw ValidationError("speaker " + e.speaker_id + " is listed with both diagnoses");
  }
  return out;
}

Manifest EntriesOf(const Manifest &manifest, const std::string &speaker_id) {
  Manifest out;
  for (const auto &e : manifest)
    if (e.speaker_id == speaker_id) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------

int FoldPlan::FoldOf(const std::string &speaker_id) const {
  for (std::size_t f = 0; f < test_speakers.size(); ++f)
    if (std::find(test_speakers[f].begin(), test_speakers[f].end(), speaker_id) !=
        test_speakers[f].end())
      return static_cast<int>(f);
  return -1;
}

std::vector<std::string> FoldPlan::TrainSpeakers(int fold) const {
  std::vector<std::string> out;
  for (std::size_t f = 0; f < test_speakers.size(); ++f)
    if (static_cast<int>(f) != fold)
      out.insert(out.end(), test_speakers[f].begin(), test_speakers[f].end());
  std::sort(out.begin(), out.end());
  return out;
}

void FoldPlan::ValidatePartition(std::span<const std::string> speakers) const {
  if (static_cast<int>(test_speakers.size()) != n_folds)
    throw ValidationError("fold plan lists " + std::to_string(test_speakers.size()) +
                          " folds, expected " + std::to_string(n_folds));
  std::map<std::string, int> seen;
  for (const auto &fold : test_speakers)
    for (const auto &s : fold)
      if (++seen[s] > 1) throw ValidationError("speaker " + s + " appears in two folds");
  for (const auto &s : speakers)
    if (!seen.count(s)) throw ValidationError("speaker " + s + " is in no fold");
  if (seen.size() != speakers.size())
    throw ValidationError("fold plan names speakers missing from the manifest");
}

FoldPlan MakeFolds(const Manifest &manifest, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw ValidationError("need at least 2 folds");
  std::vector<std::string> td, ssd;
  for (const auto &[id, dx] : SpeakerDiagnoses(manifest))
    (dx == Diagnosis::kSsd ? ssd : td).push_back(id);
  if (static_cast<int>(td.size()) < n_folds || static_cast<int>(ssd.size()) < n_folds)
    throw ValidationError("too few speakers for " + std::to_string(n_folds) + " folds: " +
                          std::to_string(td.size()) + " TD, " + std::to_string(ssd.size()) +
                          " SSD");
  std::mt19937_64 rng(seed);
  std::shuffle(td.begin(), td.end(), rng);
  std::shuffle(ssd.begin(), ssd.end(), rng);
  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.test_speakers.resize(n_folds);
  std::size_t slot = 0;
  for (const auto *group : {&td, &ssd})
    for (const auto &s : *group) plan.test_speakers[slot++ % n_folds].push_back(s);
  for (auto &fold : plan.test_speakers) std::sort(fold.begin(), fold.end());
  return plan;
}

FeatureMatrix AssembleSubjectUtterance(std::span<const ManifestEntry> entries,
                                       const FeatureArchive &features) {
  if (entries.empty()) throw ValidationError("no manifest entries for speaker");
  std::vector<const ManifestEntry *> ordered;
  for (const auto &e : entries) ordered.push_back(&e);
  std::sort(ordered.begin(), ordered.end(),
            [](const ManifestEntry *a, const ManifestEntry *b) { return a->word_id < b->word_id; });
  std::vector<FeatureMatrix> parts;
  int missing = 0;
  for (const auto *e : ordered) {
    auto it = features.find(e->Key());
    if (it == features.end()) {
      ++missing;
      continue;
    }
    parts.push_back(it->second);
  }
  const std::string &speaker = entries.front().speaker_id;
  if (parts.empty()) throw ValidationError("no features found for speaker " + speaker);
  if (missing > 0)
    SSD_LOG << "speaker " << speaker << ": " << missing << " of " << entries.size()
            << " words have no features";
  return ConcatUtterances(parts);
}

void WriteLexicon(const std::string &path, const Lexicon &lexicon) {
  Alignment as_alignment(lexicon.begin(), lexicon.end());
  WriteAlignment(path, as_alignment);
}

Lexicon ReadLexicon(const std::string &path) {
  Alignment a = ReadAlignment(path);
  return Lexicon(a.begin(), a.end());
}

}  // namespace ssd
