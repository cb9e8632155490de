// include/ssd/attributes.h

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

#ifndef SSD_ATTRIBUTES_H_
#define SSD_ATTRIBUTES_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssd/archive.h"
#include "ssd/types.h"

namespace ssd {

enum class AttributeCategory : std::uint8_t { kManner, kAspiration, kPlace, kVowel };

std::string_view ToString(AttributeCategory c);

/// Ordered phone labels; the index of a label is its classifier output slot.
class PhoneInventory {
 public:
  PhoneInventory() = default;
  /// Throws ValidationError on duplicate or empty labels.
  explicit PhoneInventory(std::vector<std::string> phones);

  /// The 33 Cantonese phones of the built-in attribute table: 19 consonants
  /// followed by 14 vowels.
  static PhoneInventory Default();

  int Size() const { return static_cast<int>(phones_.size()); }
  const std::vector<std::string> &Phones() const { return phones_; }
  const std::string &Label(int index) const { return phones_.at(index); }
  /// -1 when the label is not in the inventory.
  int IndexOf(std::string_view label) const;

 private:
  std::vector<std::string> phones_;
  std::map<std::string, int, std::less<>> index_;
};

/// Grouping of phones into speech attributes (manner, aspiration, place and
/// the vowel class). A phone carries at most one attribute per category and
/// vowels carry nothing but the vowel attribute.
class AttributeMap {
 public:
  static constexpr int kNumAttributes = 16;

  /// Parses `category<TAB>attribute<TAB>phone,phone,...` lines. Categories
  /// are Manner, Aspiration, Place and Vowel. When `inventory` is empty the
  /// phones are taken in order of first appearance; otherwise every table
  /// phone must belong to it and every inventory phone must be covered.
  static AttributeMap Parse(std::string_view definition,
                            const PhoneInventory &inventory = {});
  static AttributeMap FromFile(const std::string &path,
                               const PhoneInventory &inventory = {});
  /// The Cantonese table shipped with the library.
  static AttributeMap Default();

  int NumAttributes() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string> &AttributeNames() const { return names_; }
  AttributeCategory CategoryOf(int attribute) const { return categories_.at(attribute); }
  /// Throws ValidationError for an unknown name.
  int AttributeIndex(std::string_view name) const;

  const PhoneInventory &Inventory() const { return inventory_; }
  /// Sorted attribute indices of a phone.
  const std::vector<int> &AttributesOf(int phone) const { return phone_attributes_.at(phone); }
  std::vector<std::string> AttributeNamesOf(std::string_view phone) const;
  /// Attribute of `phone` in `category`, or -1.
  int ValueIn(int phone, AttributeCategory category) const;
  bool IsVowel(int phone) const;

  /// 0/1 multi-label target of a phone.
  Vector TargetVector(int phone) const;

  /// Phones that differ from `phone` in exactly one articulatory contrast:
  /// manner or place changes with the other kept, or aspiration flips with
  /// manner and place kept. Aspiration only counts when both phones carry
  /// it, so an affricate-to-fricative change (de-affrication) qualifies.
  std::vector<int> ConfusablePartners(int phone) const;

 private:
  std::vector<std::string> names_;
  std::vector<AttributeCategory> categories_;
  PhoneInventory inventory_;
  std::vector<std::vector<int>> phone_attributes_;
};

/// Text of the built-in table in the format accepted by AttributeMap::Parse.
std::string_view DefaultAttributeTable();

// ---------------------------------------------------------------------------
// Frame classifier

enum class TaskKind : std::uint8_t { kPhoneSoftmax = 0, kAttributeMultitask = 1 };

std::string_view ToString(TaskKind kind);
TaskKind TaskKindFromString(std::string_view name);

/// Linear frame-level classifier: a softmax over the phone inventory, or one
/// independent sigmoid per speech attribute.
struct FrameClassifier {
  TaskKind task = TaskKind::kPhoneSoftmax;
  Matrix weights;  // outputs x input dim
  Vector bias;     // outputs

  Eigen::Index InputDim() const { return weights.cols(); }
  Eigen::Index OutputDim() const { return weights.rows(); }
};

struct FrameClassifierOptions {
  double learning_rate = 1.0;
  int epochs = 100;
  std::uint64_t seed = 0;
  /// 0 selects deterministic full-batch gradient descent with step halving,
  /// whose loss never increases. A positive value selects seeded mini-batch
  /// SGD at a fixed learning rate.
  int batch_size = 0;
  double l2 = 0.0;
};

struct FrameClassifierTraining {
  FrameClassifier model;
  /// Mean training cross-entropy before training and after every epoch.
  std::vector<double> loss_history;
};

/// `labels[i]` holds one phone label per frame of `features[i]`.
FrameClassifierTraining TrainFrameClassifier(
    std::span<const FeatureMatrix> features,
    std::span<const std::vector<std::string>> labels, const AttributeMap &map,
    TaskKind task, const FrameClassifierOptions &options = {});

/// Per-frame posteriors (kind = posterior).
FeatureMatrix PredictPosteriors(const FrameClassifier &model, const FeatureMatrix &features);

void SaveFrameClassifier(const std::string &path, const FrameClassifier &model);
FrameClassifier LoadFrameClassifier(const std::string &path);

// ---------------------------------------------------------------------------
// Log-posterior ratio

inline constexpr double kDefaultLprEpsilon = 1e-6;

double Sigmoid(double x);

/// log(p' / (1 - p')) with p' = clamp(p, eps, 1 - eps). Throws
/// ValidationError when p is outside [0, 1].
double LogPosteriorRatio(double p, double eps = kDefaultLprEpsilon);

/// Element-wise LogPosteriorRatio (kind = lpr).
FeatureMatrix LprTransform(const FeatureMatrix &posteriors,
                           double eps = kDefaultLprEpsilon);

/// Throws ValidationError naming the utterance, frame and class of the first
/// entry outside [0, 1], or of a softmax row whose sum is off by more than
/// `tolerance`.
void ValidatePosteriors(const FeatureMatrix &posteriors, TaskKind layout,
                        double tolerance = 1e-6);

/// Reads a feature archive whose entries must all be posteriors satisfying
/// ValidatePosteriors.
FeatureArchive IngestPosteriors(const std::string &path, TaskKind layout);

}  // namespace ssd

#endif  // SSD_ATTRIBUTES_H_
