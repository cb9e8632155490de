// src/backend.cc

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

#include "ssd/backend.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "json.hpp"
#include "ssd/attributes.h"
#include "ssd/error.h"
#include "text_util.h"

namespace ssd {

namespace {

void CheckBinary(const LabeledSet &data, const char *who) {
  if (static_cast<Eigen::Index>(data.labels.size()) != data.Size())
    throw ValidationError(std::string(who) + ": " + std::to_string(data.Size()) +
                          " samples but " + std::to_string(data.labels.size()) + " labels");
  bool pos = false, neg = false;
  for (int y : data.labels) {
    if (y != 0 && y != 1) throw ValidationError(std::string(who) + ": labels must be 0 or 1");
    (y ? pos : neg) = true;
  }
  if (!pos || !neg)
    throw ValidationError(std::string(who) + ": training data holds a single class");
  if (!data.x.allFinite()) throw ValidationError(std::string(who) + ": non-finite inputs");
}

std::vector<double> SampleWeights(const LabeledSet &data, bool balanced) {
  std::vector<double> s(data.labels.size(), 1.0);
  if (!balanced) return s;
  double n = static_cast<double>(data.labels.size());
  double n_pos = static_cast<double>(std::count(data.labels.begin(), data.labels.end(), 1));
  double n_neg = n - n_pos;
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = data.labels[i] ? n / (2.0 * n_pos) : n / (2.0 * n_neg);
  return s;
}

double Weight(std::span<const double> w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

double Sign(int label) { return label ? 1.0 : -1.0; }

}  // namespace

// ---------------------------------------------------------------------------

LdaModel LdaFit(const LabeledSet &data, int k) {
  if (static_cast<Eigen::Index>(data.labels.size()) != data.Size())
    throw ValidationError("LdaFit: label count does not match sample count");
  std::set<int> class_set(data.labels.begin(), data.labels.end());
  const int n_classes = static_cast<int>(class_set.size());
  if (n_classes < 2) throw ValidationError("LdaFit needs at least 2 classes");
  if (k == 0) k = n_classes - 1;
  if (k < 1 || k > n_classes - 1)
    throw ValidationError("LdaFit: k = " + std::to_string(k) + " must lie in [1, " +
                          std::to_string(n_classes - 1) + "]");
  const Eigen::Index d = data.Dim();
  LdaModel model;
  model.classes.assign(class_set.begin(), class_set.end());

  Vector mean = data.x.colwise().mean().transpose();
  Matrix sw = Matrix::Zero(d, d), sb = Matrix::Zero(d, d);
  std::vector<Vector> class_means;
  for (int cls : model.classes) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < data.labels.size(); ++i)
      if (data.labels[i] == cls) rows.push_back(static_cast<Eigen::Index>(i));
    if (rows.size() < 2)
      throw ValidationError("LdaFit: class " + std::to_string(cls) + " has fewer than 2 samples");
    Matrix xc(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) xc.row(static_cast<Eigen::Index>(i)) = data.x.row(rows[i]);
    Vector mc = xc.colwise().mean().transpose();
    Matrix centered = xc.rowwise() - mc.transpose();
    sw.noalias() += centered.transpose() * centered;
    Vector diff = mc - mean;
    sb.noalias() += static_cast<double>(rows.size()) * diff * diff.transpose();
    class_means.push_back(mc);
  }
  double lambda = 1e-6 * sw.trace() / static_cast<double>(d);
  if (!(lambda > 0)) lambda = 1e-12;
  Matrix sw_reg = sw + lambda * Matrix::Identity(d, d);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(sb, sw_reg);
  if (solver.info() != Eigen::Success) throw ValidationError("LdaFit: eigen-solver failed");
  model.projection.resize(d, k);
  model.eigenvalues.resize(k);
  for (int j = 0; j < k; ++j) {
    Eigen::Index src = d - 1 - j;
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index big;
    v.cwiseAbs().maxCoeff(&big);
    if (v(big) < 0) v = -v;
    model.projection.col(j) = v;
    model.eigenvalues(j) = solver.eigenvalues()(src);
  }
  model.degenerate = !(model.eigenvalues(0) > 1e-8);
  model.class_means.resize(n_classes, k);
  for (int c = 0; c < n_classes; ++c)
    model.class_means.row(c) = (class_means[c].transpose() * model.projection);
  return model;
}

// ---------------------------------------------------------------------------

Vector LinearSvmModel::Decision(const Matrix &x) const {
  return (x * weights).array() + bias;
}

std::vector<int> LinearSvmModel::Predict(const Matrix &x) const {
  Vector d = Decision(x);
  std::vector<int> out(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) out[i] = d(i) >= 0 ? 1 : 0;
  return out;
}

double SvmObjective(const Vector &w, double b, const LabeledSet &data, double c_param,
                    std::span<const double> sample_weights) {
  Vector f = (data.x * w).array() + b;
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    hinge += Weight(sample_weights, static_cast<std::size_t>(i)) *
             std::max(0.0, 1.0 - Sign(data.labels[i]) * f(i));
  return 0.5 * w.squaredNorm() + c_param * hinge;
}

LinearSvmModel SvmTrain(const LabeledSet &data, const SvmOptions &options) {
  CheckBinary(data, "SvmTrain");
  const Eigen::Index n = data.Size(), d = data.Dim();
  std::vector<double> s = SampleWeights(data, options.balanced);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = Sign(data.labels[i]);

  // The bias is unregularized, so descending on centred inputs and moving
  // the centre into b afterwards solves the same problem with a far better
  // conditioned bias coordinate.
  const Vector centre = data.x.colwise().mean().transpose();
  const LabeledSet centred{data.x.rowwise() - centre.transpose(), data.labels};
  const Matrix &x = centred.x;

  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) scale += s[i] * (x.row(i).squaredNorm() + 1.0);
  const double eta0 = 1.0 / (1.0 + options.c_param * scale / std::sqrt(static_cast<double>(n)));

  Vector w = Vector::Zero(d), w_avg = Vector::Zero(d), w_best = w;
  double b = 0.0, b_avg = 0.0, b_best = 0.0;
  double best = SvmObjective(w, b, centred, options.c_param, s);
  long averaged = 0;
  const int start_avg = options.iterations / 2;
  for (int k = 0; k < options.iterations; ++k) {
    Vector f = (x * w).array() + b;
    Vector coef = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (y(i) * f(i) < 1.0) coef(i) = -options.c_param * s[i] * y(i);
    Vector gw = w + x.transpose() * coef;
    double gb = coef.sum();
    double eta = eta0 / std::sqrt(k + 1.0);
    w -= eta * gw;
    b -= eta * gb;
    double obj = SvmObjective(w, b, centred, options.c_param, s);
    if (obj < best) {
      best = obj;
      w_best = w;
      b_best = b;
    }
    if (k >= start_avg) {
      ++averaged;
      w_avg += (w - w_avg) / static_cast<double>(averaged);
      b_avg += (b - b_avg) / static_cast<double>(averaged);
    }
  }
  LinearSvmModel model;
  model.c_param = options.c_param;
  if (averaged > 0 && SvmObjective(w_avg, b_avg, centred, options.c_param, s) < best) {
    model.weights = w_avg;
    model.bias = b_avg;
  } else {
    model.weights = w_best;
    model.bias = b_best;
  }
  model.bias -= model.weights.dot(centre);
  return model;
}

// ---------------------------------------------------------------------------

Vector LogisticModel::Probability(const Matrix &x) const {
  Vector f = (x * weights).array() + bias;
  return f.unaryExpr(&Sigmoid);
}

std::vector<int> LogisticModel::Predict(const Matrix &x) const {
  Vector p = Probability(x);
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = p(i) >= 0.5 ? 1 : 0;
  return out;
}

namespace {
double LogOnePlusExp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
}  // namespace

double LogisticObjective(const Vector &w, double b, const LabeledSet &data, double c_param,
                         std::span<const double> sample_weights) {
  Vector f = (data.x * w).array() + b;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    loss += Weight(sample_weights, static_cast<std::size_t>(i)) *
            LogOnePlusExp(-Sign(data.labels[i]) * f(i));
  return 0.5 * w.squaredNorm() + c_param * loss;
}

LogisticModel LogregTrain(const LabeledSet &data, const LogisticOptions &options) {
  CheckBinary(data, "LogregTrain");
  const Eigen::Index n = data.Size(), d = data.Dim();
  std::vector<double> s = SampleWeights(data, options.balanced);
  Matrix xa(n, d + 1);
  xa << data.x, Vector::Ones(n);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = Sign(data.labels[i]);

  Vector theta = Vector::Zero(d + 1);
  auto objective = [&](const Vector &th) {
    return LogisticObjective(th.head(d), th(d), data, options.c_param, s);
  };
  LogisticModel model;
  model.c_param = options.c_param;
  double loss = objective(theta);
  model.loss_history.push_back(loss);
  for (int it = 0; it < options.max_iters; ++it) {
    Vector f = xa * theta;
    Vector g = Vector::Zero(d + 1);
    g.head(d) = theta.head(d);
    Vector h_diag(n);
    Vector coef(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double p = Sigmoid(-y(i) * f(i));
      coef(i) = -options.c_param * s[i] * y(i) * p;
      h_diag(i) = options.c_param * s[i] * p * (1.0 - p);
    }
    g += xa.transpose() * coef;
    if (g.norm() < options.tolerance) break;
    Matrix h = xa.transpose() * h_diag.asDiagonal() * xa;
    h.diagonal().head(d).array() += 1.0;
    h(d, d) += 1e-12;
    Vector step = h.ldlt().solve(g);
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
      Vector trial = theta - t * step;
      double trial_loss = objective(trial);
      if (trial_loss <= loss - 1e-4 * t * g.dot(step)) {
        theta = trial;
        improved = trial_loss < loss;
        loss = trial_loss;
        break;
      }
    }
    model.loss_history.push_back(loss);
    if (!improved) break;
  }
  model.weights = theta.head(d);
  model.bias = theta(d);
  return model;
}

// ---------------------------------------------------------------------------

int MajorityVote(std::span<const int> decisions) {
  if (decisions.empty()) throw ValidationError("MajorityVote: no decisions");
  long pos = 0;
  for (int v : decisions) pos += v != 0;
  long neg = static_cast<long>(decisions.size()) - pos;
  return pos >= neg ? 1 : 0;
}

double L1Distance(const Vector &x, const Vector &y) {
  if (x.size() != y.size()) throw DimensionError("L1Distance: dimension mismatch");
  return (x - y).cwiseAbs().sum();
}

LogisticModel TrainPairClassifier(std::span<const Segment> references,
                                  const PairTrainingOptions &options) {
  std::map<std::string, std::vector<std::size_t>> by_unit;
  for (std::size_t i = 0; i < references.size(); ++i)
    by_unit[references[i].consonant + '\x1f' + references[i].context].push_back(i);
  std::vector<const std::vector<std::size_t> *> groups;
  for (const auto &[key, members] : by_unit)
    if (members.size() >= 2) groups.push_back(&members);
  if (groups.empty()) throw ValidationError("TrainPairClassifier: no same-unit reference pairs");

  std::mt19937_64 rng(options.seed);
  std::size_t n_same = static_cast<std::size_t>(
      static_cast<double>(options.max_pairs) / (1.0 + options.negative_ratio));
  n_same = std::max<std::size_t>(n_same, 1);
  auto n_diff = static_cast<std::size_t>(std::llround(options.negative_ratio * static_cast<double>(n_same)));

  std::vector<double> feature;
  std::vector<int> labels;
  std::uniform_int_distribution<std::size_t> pick_group(0, groups.size() - 1);
  for (std::size_t p = 0; p < n_same; ++p) {
    const auto &g = *groups[pick_group(rng)];
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    std::size_t a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    feature.push_back(L1Distance(references[g[a]].embedding, references[g[b]].embedding));
    labels.push_back(0);
  }
  std::uniform_int_distribution<std::size_t> pick_any(0, references.size() - 1);
  std::size_t attempts = 0;
  for (std::size_t p = 0; p < n_diff && attempts < 100 * (n_diff + 1); ++attempts) {
    std::size_t a = pick_any(rng), b = pick_any(rng);
    if (references[a].consonant == references[b].consonant) continue;
    feature.push_back(L1Distance(references[a].embedding, references[b].embedding));
    labels.push_back(1);
    ++p;
  }
  LabeledSet pairs;
  pairs.x = Eigen::Map<Vector>(feature.data(), static_cast<Eigen::Index>(feature.size()));
  pairs.labels = std::move(labels);
  LogisticOptions lo;
  lo.c_param = options.c_param;
  return LogregTrain(pairs, lo);
}

std::map<std::string, double> PairwiseCompare(std::span<const Segment> test,
                                              std::span<const Segment> references,
                                              const LogisticModel &pair_classifier) {
  if (pair_classifier.weights.size() != 1)
    throw DimensionError("PairwiseCompare: pair classifier must take the scalar L1 distance");
  std::map<std::string, std::vector<std::size_t>> by_consonant;
  std::map<std::string, std::vector<std::size_t>> by_unit;
  for (std::size_t i = 0; i < references.size(); ++i) {
    by_consonant[references[i].consonant].push_back(i);
    by_unit[references[i].consonant + '\x1f' + references[i].context].push_back(i);
  }
  std::map<std::string, std::pair<long, long>> counts;  // same, total
  for (const auto &seg : test) {
    const std::vector<std::size_t> *refs = nullptr;
    if (!seg.context.empty()) {
      auto it = by_unit.find(seg.consonant + '\x1f' + seg.context);
      if (it != by_unit.end()) refs = &it->second;
    }
    if (!refs) {
      auto it = by_consonant.find(seg.consonant);
      if (it == by_consonant.end())
        throw ValidationError("consonant '" + seg.consonant + "' has no reference embeddings");
      refs = &it->second;
    }
    auto &[same, total] = counts[seg.consonant];
    for (std::size_t r : *refs) {
      double dist = L1Distance(seg.embedding, references[r].embedding);
      double p_diff = Sigmoid(pair_classifier.weights(0) * dist + pair_classifier.bias);
      same += p_diff < 0.5;
      ++total;
    }
  }
  std::map<std::string, double> accuracy;
  for (const auto &[c, st] : counts)
    accuracy[c] = static_cast<double>(st.first) / static_cast<double>(st.second);
  return accuracy;
}

AccuracyStack StackAccuracies(const std::map<std::string, double> &per_consonant,
                              std::span<const std::string> order) {
  AccuracyStack stack;
  stack.values.resize(static_cast<Eigen::Index>(order.size()));
  stack.missing.assign(order.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = per_consonant.find(order[i]);
    if (it == per_consonant.end()) {
      stack.values(static_cast<Eigen::Index>(i)) = kMissingAccuracy;
      stack.missing[i] = true;
      stack.any_missing = true;
    } else {
      stack.values(static_cast<Eigen::Index>(i)) = it->second;
    }
  }
  return stack;
}

// ---------------------------------------------------------------------------

Metrics Evaluate(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.size() != truths.size())
    throw ValidationError("Evaluate: " + std::to_string(predictions.size()) +
                          " predictions but " + std::to_string(truths.size()) + " truths");
  Metrics m;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    int p = predictions[i], t = truths[i];
    if ((p != 0 && p != 1) || (t != 0 && t != 1))
      throw ValidationError("Evaluate: labels must be 0 or 1");
    if (t == 1)
      (p == 1 ? m.tp : m.fn)++;
    else
      (p == 1 ? m.fp : m.tn)++;
  }
  if (m.tp + m.fn == 0 || m.tn + m.fp == 0)
    throw ValidationError("Evaluate: truths contain a single class");
  // F1 = 2PR / (P + R) = 2tp / (2tp + fp + fn); the count form is one rounding.
  auto d = [](long v) { return static_cast<double>(v); };
  m.recall_pos = d(m.tp) / d(m.tp + m.fn);
  m.recall_neg = d(m.tn) / d(m.tn + m.fp);
  m.f1_pos = 2.0 * d(m.tp) / d(2 * m.tp + m.fp + m.fn);
  m.f1_neg = 2.0 * d(m.tn) / d(2 * m.tn + m.fn + m.fp);
  m.uar = 0.5 * (m.recall_pos + m.recall_neg);
  m.macro_f1 = 0.5 * (m.f1_pos + m.f1_neg);
  return m;
}

// ---------------------------------------------------------------------------

std::string_view ToString(ClassifierKind kind) {
  return kind == ClassifierKind::kSvm ? "svm" : "logreg";
}

ClassifierKind ClassifierKindFromString(std::string_view name) {
  if (name == "svm") return ClassifierKind::kSvm;
  if (name == "logreg" || name == "lr") return ClassifierKind::kLogreg;
  throw ValidationError("unknown classifier: " + std::string(name));
}

namespace {
Matrix Transform(const Backend &be, const Matrix &x) {
  if (x.cols() != be.shift.size())
    throw DimensionError("back-end expects dimension " + std::to_string(be.shift.size()) +
                         ", got " + std::to_string(x.cols()));
  Matrix z = (x.rowwise() - be.shift.transpose()) * be.scale.cwiseInverse().asDiagonal();
  return be.lda ? be.lda->Project(z) : z;
}
}  // namespace

Vector Backend::Score(const Matrix &x) const {
  Matrix z = Transform(*this, x);
  return options.classifier == ClassifierKind::kSvm ? svm.Decision(z)
                                                    : Vector(logreg.Probability(z).array() - 0.5);
}

std::vector<int> Backend::Predict(const Matrix &x) const {
  Vector s = Score(x);
  std::vector<int> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = s(i) >= 0 ? 1 : 0;
  return out;
}

Backend TrainBackend(const LabeledSet &data, const BackendOptions &options) {
  CheckBinary(data, "TrainBackend");
  Backend be;
  be.options = options;
  const Eigen::Index d = data.Dim();
  be.shift = Vector::Zero(d);
  be.scale = Vector::Ones(d);
  if (options.standardize) {
    be.shift = data.x.colwise().mean().transpose();
    Vector var = (data.x.rowwise() - be.shift.transpose()).colwise().squaredNorm().transpose() /
                 static_cast<double>(data.Size());
    for (Eigen::Index j = 0; j < d; ++j) be.scale(j) = var(j) > 1e-24 ? std::sqrt(var(j)) : 1.0;
  }
  LabeledSet z{(data.x.rowwise() - be.shift.transpose()) * be.scale.cwiseInverse().asDiagonal(),
               data.labels};
  if (options.use_lda) {
    be.lda = LdaFit(z);
    z.x = be.lda->Project(z.x);
  }
  if (options.classifier == ClassifierKind::kSvm) {
    SvmOptions so;
    so.c_param = options.c_param;
    so.balanced = options.balanced;
    be.svm = SvmTrain(z, so);
  } else {
    LogisticOptions lo;
    lo.c_param = options.c_param;
    lo.balanced = options.balanced;
    be.logreg = LogregTrain(z, lo);
  }
  return be;
}

namespace {
std::vector<double> ToStd(const Vector &v) { return {v.data(), v.data() + v.size()}; }
Vector FromStd(const std::vector<double> &v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace

void SaveBackend(const std::string &path, const Backend &be) {
  nlohmann::json j;
  j["format"] = "ssdscreen-backend";
  j["version"] = 1;
  j["classifier"] = std::string(ToString(be.options.classifier));
  j["c_param"] = be.options.c_param;
  j["balanced"] = be.options.balanced;
  j["standardize"] = be.options.standardize;
  j["shift"] = ToStd(be.shift);
  j["scale"] = ToStd(be.scale);
  if (be.lda) {
    const Matrix &p = be.lda->projection;
    j["lda"]["rows"] = p.rows();
    j["lda"]["cols"] = p.cols();
    std::vector<double> flat;
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c) flat.push_back(p(r, c));
    j["lda"]["projection"] = flat;
  }
  if (be.options.classifier == ClassifierKind::kSvm) {
    j["weights"] = ToStd(be.svm.weights);
    j["bias"] = be.svm.bias;
  } else {
    j["weights"] = ToStd(be.logreg.weights);
    j["bias"] = be.logreg.bias;
  }
  internal::WriteFile(path, j.dump(1));
}

Backend LoadBackend(const std::string &path) {
  try {
    auto j = nlohmann::json::parse(internal::ReadFile(path));
    if (j.at("format") != "ssdscreen-backend") throw FormatError(path + ": not a back-end file");
    Backend be;
    be.options.classifier = ClassifierKindFromString(j.at("classifier").get<std::string>());
    be.options.c_param = j.at("c_param").get<double>();
    be.options.balanced = j.at("balanced").get<bool>();
    be.options.standardize = j.at("standardize").get<bool>();
    be.shift = FromStd(j.at("shift").get<std::vector<double>>());
    be.scale = FromStd(j.at("scale").get<std::vector<double>>());
    if (j.contains("lda")) {
      auto rows = j["lda"].at("rows").get<Eigen::Index>();
      auto cols = j["lda"].at("cols").get<Eigen::Index>();
      auto flat = j["lda"].at("projection").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw FormatError(path + ": LDA shape mismatch");
      LdaModel lda;
      lda.projection.resize(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) lda.projection(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
      be.options.use_lda = true;
      be.lda = std::move(lda);
    }
    Vector w = FromStd(j.at("weights").get<std::vector<double>>());
    double b = j.at("bias").get<double>();
    if (be.options.classifier == ClassifierKind::kSvm) {
      be.svm.weights = w;
      be.svm.bias = b;
      be.svm.c_param = be.options.c_param;
    } else {
      be.logreg.weights = w;
      be.logreg.bias = b;
      be.logreg.c_param = be.options.c_param;
    }
    return be;
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace ssd
