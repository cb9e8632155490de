// include/ssd/pipeline.h

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

#ifndef SSD_PIPELINE_H_
#define SSD_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ssd/archive.h"
#include "ssd/attributes.h"
#include "ssd/backend.h"
#include "ssd/corpus.h"
#include "ssd/frontend.h"
#include "ssd/ivector.h"
#include "ssd/paralinguistics.h"

namespace ssd {

enum class Representation : std::uint8_t {
  kIvectorMfcc,
  kIvectorPhoneLpr,
  kIvectorAttributeLpr,
  kFunctional,
};
std::string_view ToString(Representation r);
Representation RepresentationFromString(std::string_view name);

enum class Fusion : std::uint8_t { kSubject, kWordMajority, kPhoneStack };
std::string_view ToString(Fusion f);
Fusion FusionFromString(std::string_view name);

/// Everything a cross-validation run depends on. The text form is flat
/// `section.key = value` lines; '#' starts a comment.
struct ExperimentConfig {
  // data.*
  std::string manifest;
  std::string features;  // feature archive keyed by speaker/word; empty = read audio
  std::string alignment;
  std::string lexicon;
  std::string attribute_table;  // empty = built-in table

  // experiment.*
  Representation representation = Representation::kIvectorAttributeLpr;
  Fusion fusion = Fusion::kSubject;
  int n_folds = 5;
  std::uint64_t seed = 0;

  // frontend.*
  FbankOptions fbank;
  int n_ceps = 20;
  bool deltas = false;
  /// Speaker-level mean/variance normalization of the input frames.
  bool cmvn = true;

  // posterior.* and lpr.*
  FrameClassifierOptions posterior;
  bool lpr_cmvn = true;
  double lpr_epsilon = kDefaultLprEpsilon;

  // ivector.*
  UbmOptions ubm;
  TvOptions tv;
  bool length_normalize = false;

  // backend.*
  BackendOptions backend;

  // fusion.*
  PairTrainingOptions pairs;

  // paralinguistics.*
  LldOptions lld;

  /// Directory that relative data paths are resolved against; set by
  /// FromFile and not part of the canonical text.
  std::string base_dir;

  static ExperimentConfig Parse(const std::string &text, const std::string &source = "config");
  static ExperimentConfig FromFile(const std::string &path);
  /// `path` resolved against base_dir when relative.
  std::string Resolve(const std::string &path) const;
  /// Assigns one `section.key`; throws ValidationError for unknown keys or
  /// malformed values.
  void Set(const std::string &key, const std::string &value);
  /// Every setting, sorted by key, one `key = value` per line. Parsing this
  /// text reproduces the config.
  std::string Canonical() const;
  /// 64-bit FNV-1a of Canonical().
  std::uint64_t Hash() const;
  /// Throws ValidationError for unsupported representation/fusion pairs or
  /// missing inputs.
  void Validate() const;
};

/// Inputs of an experiment, loaded once.
struct ExperimentData {
  Manifest manifest;
  FeatureArchive features;  // per word, keyed by ManifestEntry::Key
  Alignment alignment;
  Lexicon lexicon;
  AttributeMap attributes = AttributeMap::Default();
};

/// Reads the files named in the config. Without a feature archive, log-mel
/// filter-bank features are computed from the manifest audio paths.
ExperimentData LoadExperimentData(const ExperimentConfig &config);

/// Filter-bank features of every manifest word computed from its audio.
FeatureArchive Featurize(const Manifest &manifest, const FbankOptions &options);

/// Records which speakers are held out and rejects any training stage that
/// touches one of them.
class LeakGuard {
 public:
  explicit LeakGuard(std::span<const std::string> test_speakers)
      : test_(test_speakers.begin(), test_speakers.end()) {}
  /// Throws LeakError naming the speaker and the stage.
  void CheckTraining(std::span<const std::string> speakers, const std::string &stage) const;

 private:
  std::set<std::string> test_;
};

struct FoldResult {
  int fold = 0;
  Metrics metrics;
  std::vector<std::string> test_speakers;
  std::vector<int> predictions;
};

struct CrossvalReport {
  std::uint64_t config_hash = 0;
  std::vector<FoldResult> folds;
  double mean_uar = 0, std_uar = 0;
  double mean_macro_f1 = 0, std_macro_f1 = 0;

  /// {config_hash, folds: [{fold, uar, macro_f1, tp, fp, tn, fn}], mean_uar,
  /// std_uar, mean_macro_f1, std_macro_f1}; std is the sample deviation
  /// over folds.
  std::string ToJson() const;
  std::string ToText() const;
};

/// Speaker-disjoint cross-validation. Every model (posterior classifier,
/// UBM, TV, pair classifier, back-end) is retrained inside each fold from
/// the training speakers only. With `plan` unset the folds come from
/// MakeFolds(manifest, n_folds, seed).
CrossvalReport RunCrossval(const ExperimentConfig &config, const ExperimentData &data,
                           const std::optional<FoldPlan> &plan = std::nullopt);

/// Config text for a corpus written by WriteSyntheticCorpus: data paths
/// relative to the corpus directory and the i-vector settings used on
/// synthetic data.
std::string SyntheticExperimentConfig(const SyntheticSpec &spec);

// ---------------------------------------------------------------------------
// Building blocks shared with the command-line tool.

/// Frames of one utterance per manifest word for the chosen representation,
/// before any fold-dependent stage: MFCC (plus deltas) for ivector-mfcc,
/// filter-bank input of the posterior classifier for the LPR variants.
/// Speaker-level CMVN is applied when enabled.
FeatureArchive PrepareFrames(const ExperimentConfig &config, const ExperimentData &data);

/// Normalizes every utterance of a speaker with statistics pooled over all
/// of that speaker's utterances.
FeatureArchive SpeakerCmvn(const Manifest &manifest, const FeatureArchive &features);

/// Posterior classifier trained on the frames of `speakers`, labelled by the
/// alignment.
FrameClassifier TrainPosteriorModel(const ExperimentConfig &config, const ExperimentData &data,
                                    const FeatureArchive &frames,
                                    std::span<const std::string> speakers);

/// Posteriors, LPR and (optionally) speaker CMVN for every utterance.
FeatureArchive LprFrames(const ExperimentConfig &config, const ExperimentData &data,
                         const FrameClassifier &model, const FeatureArchive &frames);

}  // namespace ssd

#endif  // SSD_PIPELINE_H_
