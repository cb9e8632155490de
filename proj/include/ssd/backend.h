// include/ssd/backend.h

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

#ifndef SSD_BACKEND_H_
#define SSD_BACKEND_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssd/types.h"

namespace ssd {

/// Row-wise samples with integer class labels (0 = TD, 1 = SSD for the
/// binary back-ends).
struct LabeledSet {
  Matrix x;
  std::vector<int> labels;

  Eigen::Index Size() const { return x.rows(); }
  Eigen::Index Dim() const { return x.cols(); }
};

// ---------------------------------------------------------------------------
// LDA

struct LdaModel {
  Matrix projection;   // D x K
  Matrix class_means;  // classes x K, in projected space
  std::vector<int> classes;
  Vector eigenvalues;  // K leading generalized eigenvalues, descending
  /// Set when there is (numerically) no between-class scatter.
  bool degenerate = false;

  Eigen::Index OutputDim() const { return projection.cols(); }
  Matrix Project(const Matrix &x) const { return x * projection; }
};

/// Fisher LDA: leading eigenvectors of (S_w + lambda I)^-1 S_b with
/// lambda = 1e-6 trace(S_w) / D. `k` = 0 selects classes - 1.
LdaModel LdaFit(const LabeledSet &data, int k = 0);

// ---------------------------------------------------------------------------
// Linear classifiers

struct LinearSvmModel {
  Vector weights;
  double bias = 0.0;
  double c_param = 1.0;

  Vector Decision(const Matrix &x) const;
  std::vector<int> Predict(const Matrix &x) const;
};

struct SvmOptions {
  double c_param = 1.0;
  /// Inverse-frequency class weights in the hinge term.
  bool balanced = false;
  int iterations = 20000;
};

/// (1/2)|w|^2 + C sum_i s_i max(0, 1 - y_i (w.x_i + b)), y in {-1, +1}.
double SvmObjective(const Vector &w, double b, const LabeledSet &data, double c_param,
                    std::span<const double> sample_weights = {});

/// Deterministic full-batch subgradient descent with step eta_0 / sqrt(k+1)
/// and iterate averaging over the second half of the budget. Returns
/// whichever of the averaged and the best visited iterate has the lower
/// objective.
LinearSvmModel SvmTrain(const LabeledSet &data, const SvmOptions &options = {});

struct LogisticModel {
  Vector weights;
  double bias = 0.0;
  double c_param = 1.0;
  std::vector<double> loss_history;

  Vector Probability(const Matrix &x) const;  // P(label = 1)
  std::vector<int> Predict(const Matrix &x) const;
};

struct LogisticOptions {
  double c_param = 1.0;
  bool balanced = false;
  int max_iters = 100;
  double tolerance = 1e-10;
};

/// (1/2)|w|^2 + C sum_i s_i log(1 + exp(-y_i (w.x_i + b))).
double LogisticObjective(const Vector &w, double b, const LabeledSet &data, double c_param,
                         std::span<const double> sample_weights = {});

/// Newton's method with backtracking; the recorded loss never increases.
LogisticModel LogregTrain(const LabeledSet &data, const LogisticOptions &options = {});

// ---------------------------------------------------------------------------
// Fusion

/// 1 when positive votes are at least as many as negative ones (ties go to
/// the disordered class).
int MajorityVote(std::span<const int> decisions);

/// |x - y|_1.
double L1Distance(const Vector &x, const Vector &y);

struct Segment {
  std::string consonant;
  std::string context;  // e.g. word and position; references match on it when set
  Vector embedding;
};

struct PairTrainingOptions {
  /// Different-consonant pairs drawn per same-consonant pair.
  double negative_ratio = 1.0;
  std::size_t max_pairs = 20000;
  std::uint64_t seed = 0;
  double c_param = 1.0;
};

/// LR on the one-dimensional L1-distance feature, trained on pairs of
/// reference segments: same consonant (label 0) versus different consonant
/// (label 1, "different").
LogisticModel TrainPairClassifier(std::span<const Segment> references,
                                  const PairTrainingOptions &options = {});

/// For every test segment, compares it with each reference of the same
/// consonant (and the same context when references with that context
/// exist). Accuracy of a consonant is the fraction of its pairs judged
/// "same". Throws ValidationError when a consonant has no references.
std::map<std::string, double> PairwiseCompare(std::span<const Segment> test,
                                              std::span<const Segment> references,
                                              const LogisticModel &pair_classifier);

struct AccuracyStack {
  Vector values;
  std::vector<bool> missing;
  bool any_missing = false;
};

inline constexpr double kMissingAccuracy = 0.5;

/// Places accuracies in `order`; absent consonants get 0.5 and are flagged.
AccuracyStack StackAccuracies(const std::map<std::string, double> &per_consonant,
                              std::span<const std::string> order);

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double recall_pos = 0, recall_neg = 0;
  double f1_pos = 0, f1_neg = 0;
  double uar = 0, macro_f1 = 0;
};

/// Positive class = 1 (disordered). UAR is the mean per-class recall and
/// macro F1 the mean per-class F1 (0 when precision + recall = 0).
Metrics Evaluate(std::span<const int> predictions, std::span<const int> truths);

// ---------------------------------------------------------------------------
// Back-end pipeline

enum class ClassifierKind : std::uint8_t { kSvm, kLogreg };

std::string_view ToString(ClassifierKind kind);
ClassifierKind ClassifierKindFromString(std::string_view name);

struct BackendOptions {
  bool use_lda = false;
  ClassifierKind classifier = ClassifierKind::kSvm;
  double c_param = 1.0;
  bool balanced = false;
  /// Standardize inputs with training mean and deviation before LDA and the
  /// classifier.
  bool standardize = true;
};

/// Optional standardization and LDA followed by a linear classifier.
struct Backend {
  BackendOptions options;
  Vector shift, scale;
  std::optional<LdaModel> lda;
  LinearSvmModel svm;
  LogisticModel logreg;

  Vector Score(const Matrix &x) const;
  std::vector<int> Predict(const Matrix &x) const;
};

Backend TrainBackend(const LabeledSet &data, const BackendOptions &options = {});

void SaveBackend(const std::string &path, const Backend &backend);
Backend LoadBackend(const std::string &path);

}  // namespace ssd

#endif  // SSD_BACKEND_H_
