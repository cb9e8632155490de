// include/ssd/corpus.h

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

#ifndef SSD_CORPUS_H_
#define SSD_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssd/archive.h"
#include "ssd/attributes.h"
#include "ssd/types.h"

namespace ssd {

struct ManifestEntry {
  std::string speaker_id;
  Diagnosis diagnosis = Diagnosis::kTd;
  std::string word_id;
  /// Audio file, or the feature-archive id of the word when features are
  /// supplied directly.
  std::string path;
  std::optional<bool> error_annotation;
  std::optional<std::string> age_band;

  /// Archive key of the word: "speaker_id/word_id".
  std::string Key() const { return speaker_id + "/" + word_id; }
};

using Manifest = std::vector<ManifestEntry>;

/// Tab-separated with a header naming at least speaker_id, diagnosis,
/// word_id and path; annotation and age_band are optional. Columns may come
/// in any order. Diagnosis is TD or SSD, annotation 0 or 1 (empty = unset).
/// Errors carry the 1-based line number.
Manifest LoadManifest(const std::string &path);
Manifest ParseManifest(const std::string &text, const std::string &source = "manifest");
void WriteManifest(const std::string &path, const Manifest &manifest);

/// Speaker -> diagnosis. Throws ValidationError when one speaker appears
/// with two diagnoses.
std::map<std::string, Diagnosis> SpeakerDiagnoses(const Manifest &manifest);

/// Entries of one speaker.
Manifest EntriesOf(const Manifest &manifest, const std::string &speaker_id);

struct FoldPlan {
  int n_folds = 5;
  /// Test speakers of every fold (MakeFolds sorts them; any order is accepted).
  std::vector<std::vector<std::string>> test_speakers;

  /// First fold listing the speaker, or -1.
  int FoldOf(const std::string &speaker_id) const;
  /// Speakers of every other fold.
  std::vector<std::string> TrainSpeakers(int fold) const;
  /// Throws ValidationError unless the folds partition `speakers`.
  void ValidatePartition(std::span<const std::string> speakers) const;
};

/// Speaker-disjoint folds stratified by diagnosis. Each class is shuffled
/// with the seed and dealt round-robin; the SSD deal continues where the TD
/// deal stopped so fold sizes stay balanced. Needs n_folds speakers per
/// class.
FoldPlan MakeFolds(const Manifest &manifest, int n_folds = 5, std::uint64_t seed = 0);

/// Concatenates the speaker's words in lexicographic word_id order. Words
/// without an archive entry are skipped and counted in the log; a speaker
/// with none raises ValidationError naming the speaker.
FeatureMatrix AssembleSubjectUtterance(std::span<const ManifestEntry> entries,
                                       const FeatureArchive &features);

/// Canonical phone sequence of every word: `word_id<TAB>phone phone ...`.
using Lexicon = std::map<std::string, std::vector<std::string>>;
void WriteLexicon(const std::string &path, const Lexicon &lexicon);
Lexicon ReadLexicon(const std::string &path);

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SyntheticSpec {
  int n_td = 40;
  int n_ssd = 24;
  int words_per_speaker = 30;
  /// Syllables (consonant + vowel) per word, drawn uniformly.
  int min_syllables = 1;
  int max_syllables = 3;
  /// Probability that an SSD speaker realizes a consonant as its confusable
  /// partner.
  double substitution_rate = 0.3;
  /// Per-attribute overrides; a consonant uses the largest override among
  /// its attributes, or substitution_rate when none applies.
  std::map<std::string, double> attribute_rates;
  /// Consonants used in the lexicon; empty selects every consonant of the
  /// map that has a confusable partner.
  std::vector<std::string> consonants;
  /// Phonological processes as `From>To` attribute rewrites (backing,
  /// de-affrication, ...). A consonant's error partners are its confusable
  /// partners reached by one of these rewrites; a consonant no process
  /// applies to gets one seeded random confusable partner instead.
  std::vector<std::string> error_processes = {"Alveolar>Velar", "Affricate>Fricative",
                                              "Aspirated>Unaspirated", "Fricative>Plosive",
                                              "Labio-Velar>Velar"};
  /// How an SSD speaker realizes a substituted consonant. With
  /// `shift_attributes` off the partner phone is produced exactly. With it on
  /// only the attribute prototypes are exchanged and the target's own phone
  /// offset is kept: a distortion along the one contrast that changed.
  bool shift_attributes = true;

  int dim = 24;
  /// Each attribute contributes a random prototype of this norm scale to the
  /// mean of every phone carrying it.
  double attribute_scale = 3.0;
  /// Phone-specific offset on top of the attribute prototypes.
  double phone_scale = 3.0;
  double noise = 1.0;
  /// Speaker variability: frames are (I + warp G_s) mu + offset b_s.
  double speaker_warp = 0.15;
  double speaker_offset = 0.5;
  /// Norm of a fixed per-speaker, per-phone deviation of the emission mean
  /// (idiosyncratic pronunciation that carries no diagnostic information).
  double speaker_phone_scale = 2.0;
  int consonant_frames_min = 4, consonant_frames_max = 8;
  int vowel_frames_min = 5, vowel_frames_max = 10;
  double frame_shift = 0.01;
  std::uint64_t seed = 0;

  /// Throws ValidationError on counts below 1 or probabilities outside [0, 1].
  void Validate() const;
};

struct SyntheticCorpus {
  Manifest manifest;
  FeatureArchive features;  // kind = filterbank, keyed by ManifestEntry::Key
  Alignment alignment;      // realized phone of every frame
  Lexicon lexicon;          // canonical phones of every word
  /// Error partners of every consonant (shared by all SSD speakers); an
  /// erroneous token picks one of them uniformly.
  std::map<std::string, std::vector<std::string>> partners;
};

/// Emits every word of every speaker in feature space. SSD speakers replace
/// consonants by their confusable partner with the configured probability;
/// a word is annotated 1 iff at least one substitution happened in it.
SyntheticCorpus SynthGenerate(const SyntheticSpec &spec,
                              const AttributeMap &map = AttributeMap::Default());

/// Writes manifest.tsv, features.ssdf, alignment.txt, lexicon.txt and
/// labels.tsv into `dir` (created when missing).
void WriteSyntheticCorpus(const std::string &dir, const SyntheticCorpus &corpus);

}  // namespace ssd

#endif  // SSD_CORPUS_H_
