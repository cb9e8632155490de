// src/attributes.cc

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

#include "ssd/attributes.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"
#include "ssd/error.h"
#include "ssd/log.h"
#include "text_util.h"

namespace ssd {

namespace {

// Speech attributes of Cantonese.
constexpr std::string_view kDefaultTable =
    "Manner\tPlosive\tp,pʰ,t,tʰ,k,kʰ,kʷ,kʷʰ\n"
    "Manner\tNasal\tm,n,ŋ\n"
    "Manner\tAffricate\tts,tsʰ\n"
    "Manner\tFricative\ts,f,h\n"
    "Manner\tGlide\tj,w\n"
    "Manner\tLiquid\tl\n"
    "Aspiration\tAspirated\tpʰ,tʰ,kʰ,kʷʰ,tsʰ\n"
    "Aspiration\tUnaspirated\tp,t,k,kʷ,ts\n"
    "Place\tAlveolar\tt,tʰ,ts,tsʰ,s,j\n"
    "Place\tLateral\tl\n"
    "Place\tLabial\tp,pʰ,w,m\n"
    "Place\tVelar\tk,kʰ,ŋ\n"
    "Place\tLabio-Velar\tkʷ,kʷʰ\n"
    "Place\tLabio-dental\tf\n"
    "Place\tVocal\th\n"
    "Vowel\tVowel/Semi-vowel\taː,iː,ɛː,e,œː,œ,ɔː,o,uː,yː,ɐ,ɪ,ɵ,ʊ\n";

AttributeCategory ParseCategory(const std::string &s, const std::string &where) {
  if (s == "Manner") return AttributeCategory::kManner;
  if (s == "Aspiration") return AttributeCategory::kAspiration;
  if (s == "Place") return AttributeCategory::kPlace;
  if (s == "Vowel" || s == "Vowel/Semi-vowel") return AttributeCategory::kVowel;
  throw ValidationError(where + ": unknown attribute category '" + s + "'");
}

}  // namespace

std::string_view DefaultAttributeTable() { return kDefaultTable; }

std::string_view ToString(AttributeCategory c) {
  switch (c) {
    case AttributeCategory::kManner: return "Manner";
    case AttributeCategory::kAspiration: return "Aspiration";
    case AttributeCategory::kPlace: return "Place";
    case AttributeCategory::kVowel: return "Vowel";
  }
  return "unknown";
}

PhoneInventory::PhoneInventory(std::vector<std::string> phones) : phones_(std::move(phones)) {
  for (int i = 0; i < Size(); ++i) {
    if (phones_[i].empty()) throw ValidationError("empty phone label in inventory");
    if (!index_.emplace(phones_[i], i).second)
      throw ValidationError("duplicate phone label in inventory: " + phones_[i]);
  }
}

PhoneInventory PhoneInventory::Default() { return AttributeMap::Default().Inventory(); }

int PhoneInventory::IndexOf(std::string_view label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

AttributeMap AttributeMap::Parse(std::string_view definition, const PhoneInventory &inventory) {
  AttributeMap map;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  std::vector<std::string> seen_phones;
  std::set<std::string> seen_set;
  auto lines = internal::Split(definition, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (internal::Trim(line).empty() || line[0] == '#') continue;
    std::string where = "attribute table line " + std::to_string(i + 1);
    auto fields = internal::Split(line, '\t');
    if (fields.size() != 3) throw ValidationError(where + ": expected 3 tab-separated fields");
    AttributeCategory category = ParseCategory(internal::Trim(fields[0]), where);
    std::string name = internal::Trim(fields[1]);
    if (name.empty()) throw ValidationError(where + ": empty attribute name");
    if (std::find(map.names_.begin(), map.names_.end(), name) != map.names_.end())
      throw ValidationError(where + ": duplicate attribute '" + name + "'");
    std::vector<std::string> phones;
    for (const auto &p : internal::Split(fields[2], ',')) {
      std::string label = internal::Trim(p);
      if (label.empty()) continue;
      phones.push_back(label);
      if (seen_set.insert(label).second) seen_phones.push_back(label);
    }
    map.names_.push_back(name);
    map.categories_.push_back(category);
    rows.emplace_back(static_cast<int>(map.names_.size()) - 1, std::move(phones));
  }
  if (map.NumAttributes() != kNumAttributes)
    throw ValidationError("attribute table defines " + std::to_string(map.NumAttributes()) +
                          " attributes, expected " + std::to_string(kNumAttributes));

  map.inventory_ = inventory.Size() > 0 ? inventory : PhoneInventory(seen_phones);
  map.phone_attributes_.assign(static_cast<std::size_t>(map.inventory_.Size()), {});
  for (const auto &[attr, phones] : rows) {
    for (const auto &label : phones) {
      int phone = map.inventory_.IndexOf(label);
      if (phone < 0)
        throw ValidationError("attribute '" + map.names_[attr] + "' lists unknown phone '" +
                              label + "'");
      auto &attrs = map.phone_attributes_[phone];
      for (int other : attrs) {
        if (other == attr) continue;
        if (map.categories_[other] == map.categories_[attr])
          throw ValidationError("phone '" + label + "' assigned two " +
                                std::string(ToString(map.categories_[attr])) +
                                " attributes (" + map.names_[other] + ", " +
                                map.names_[attr] + ")");
      }
      if (std::find(attrs.begin(), attrs.end(), attr) == attrs.end()) attrs.push_back(attr);
    }
  }
  for (int p = 0; p < map.inventory_.Size(); ++p) {
    auto &attrs = map.phone_attributes_[p];
    if (attrs.empty())
      throw ValidationError("phone '" + map.inventory_.Label(p) + "' has no attribute");
    std::sort(attrs.begin(), attrs.end());
    bool vowel = std::any_of(attrs.begin(), attrs.end(), [&](int a) {
      return map.categories_[a] == AttributeCategory::kVowel;
    });
    if (vowel && attrs.size() > 1)
      throw ValidationError("vowel '" + map.inventory_.Label(p) +
                            "' carries consonant attributes");
  }
  return map;
}

AttributeMap AttributeMap::FromFile(const std::string &path, const PhoneInventory &inventory) {
  return Parse(internal::ReadFile(path), inventory);
}

AttributeMap AttributeMap::Default() {
  static const AttributeMap kMap = Parse(kDefaultTable);
  return kMap;
}

int AttributeMap::AttributeIndex(std::string_view name) const {
  for (int i = 0; i < NumAttributes(); ++i)
    if (names_[i] == name) return i;
  throw ValidationError("unknown attribute: " + std::string(name));
}

std::vector<std::string> AttributeMap::AttributeNamesOf(std::string_view phone) const {
  int p = inventory_.IndexOf(phone);
  if (p < 0) throw ValidationError("unknown phone: " + std::string(phone));
  std::vector<std::string> out;
  for (int a : phone_attributes_[p]) out.push_back(names_[a]);
  return out;
}

int AttributeMap::ValueIn(int phone, AttributeCategory category) const {
  for (int a : phone_attributes_.at(phone))
    if (categories_[a] == category) return a;
  return -1;
}

bool AttributeMap::IsVowel(int phone) const {
  return ValueIn(phone, AttributeCategory::kVowel) >= 0;
}

Vector AttributeMap::TargetVector(int phone) const {
  Vector t = Vector::Zero(NumAttributes());
  for (int a : phone_attributes_.at(phone)) t(a) = 1.0;
  return t;
}

std::vector<int> AttributeMap::ConfusablePartners(int phone) const {
  std::vector<int> out;
  if (IsVowel(phone)) return out;
  int manner = ValueIn(phone, AttributeCategory::kManner);
  int place = ValueIn(phone, AttributeCategory::kPlace);
  int asp = ValueIn(phone, AttributeCategory::kAspiration);
  for (int q = 0; q < inventory_.Size(); ++q) {
    if (q == phone || IsVowel(q)) continue;
    int q_asp = ValueIn(q, AttributeCategory::kAspiration);
    int changes = (ValueIn(q, AttributeCategory::kManner) != manner) +
                  (ValueIn(q, AttributeCategory::kPlace) != place) +
                  (asp >= 0 && q_asp >= 0 && asp != q_asp);
    if (changes == 1) out.push_back(q);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view ToString(TaskKind kind) {
  return kind == TaskKind::kPhoneSoftmax ? "phone" : "attribute";
}

TaskKind TaskKindFromString(std::string_view name) {
  if (name == "phone") return TaskKind::kPhoneSoftmax;
  if (name == "attribute") return TaskKind::kAttributeMultitask;
  throw ValidationError("unknown task kind: " + std::string(name));
}

namespace {

void SoftmaxRows(Matrix *logits) {
  for (Eigen::Index r = 0; r < logits->rows(); ++r) {
    auto row = logits->row(r);
    double mx = row.maxCoeff();
    row = (row.array() - mx).exp();
    row /= row.sum();
  }
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct TrainingData {
  Matrix x;        // N x D
  Matrix targets;  // N x K (one-hot or multi-label)
};

double Loss(const FrameClassifier &m, const TrainingData &data, double l2, Matrix *grad_w,
            Vector *grad_b) {
  const auto n = static_cast<double>(data.x.rows());
  Matrix logits = data.x * m.weights.transpose();
  logits.rowwise() += m.bias.transpose();
  double loss = 0.0;
  Matrix residual;
  if (m.task == TaskKind::kPhoneSoftmax) {
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      auto row = logits.row(r);
      double mx = row.maxCoeff();
      double lse = mx + std::log((row.array() - mx).exp().sum());
      loss += lse - row.dot(data.targets.row(r));
    }
    if (grad_w) {
      SoftmaxRows(&logits);
      residual = logits - data.targets;
    }
  } else {
    for (Eigen::Index r = 0; r < logits.rows(); ++r)
      for (Eigen::Index k = 0; k < logits.cols(); ++k) {
        double z = logits(r, k);
        loss += Softplus(z) - data.targets(r, k) * z;
      }
    if (grad_w) residual = logits.unaryExpr(&Sigmoid) - data.targets;
  }
  loss = loss / n + 0.5 * l2 * m.weights.squaredNorm();
  if (grad_w) {
    *grad_w = residual.transpose() * data.x / n + l2 * m.weights;
    *grad_b = residual.colwise().sum().transpose() / n;
  }
  return loss;
}

}  // namespace

FrameClassifierTraining TrainFrameClassifier(std::span<const FeatureMatrix> features,
                                             std::span<const std::vector<std::string>> labels,
                                             const AttributeMap &map, TaskKind task,
                                             const FrameClassifierOptions &options) {
  if (features.size() != labels.size())
    throw ValidationError("TrainFrameClassifier: " + std::to_string(features.size()) +
                          " feature matrices but " + std::to_string(labels.size()) +
                          " label sequences");
  Eigen::Index total = 0, dim = -1;
  for (std::size_t u = 0; u < features.size(); ++u) {
    const auto &f = features[u];
    if (static_cast<std::size_t>(f.NumFrames()) != labels[u].size())
      throw ValidationError("utterance '" + f.utterance_id + "' has " +
                            std::to_string(f.NumFrames()) + " frames but " +
                            std::to_string(labels[u].size()) + " labels");
    if (dim < 0) dim = f.Dim();
    if (f.Dim() != dim) throw DimensionError("TrainFrameClassifier: inconsistent feature dims");
    total += f.NumFrames();
  }
  if (total == 0) throw ValidationError("TrainFrameClassifier: empty training set");

  const PhoneInventory &inv = map.Inventory();
  const int outputs = task == TaskKind::kPhoneSoftmax ? inv.Size() : map.NumAttributes();
  TrainingData data;
  data.x.resize(total, dim);
  data.targets = Matrix::Zero(total, outputs);
  std::set<int> classes;
  Eigen::Index row = 0;
  for (std::size_t u = 0; u < features.size(); ++u) {
    data.x.middleRows(row, features[u].NumFrames()) = features[u].frames;
    for (std::size_t t = 0; t < labels[u].size(); ++t, ++row) {
      int phone = inv.IndexOf(labels[u][t]);
      if (phone < 0)
        throw ValidationError("utterance '" + features[u].utterance_id + "' frame " +
                              std::to_string(t) + ": label '" + labels[u][t] +
                              "' is not in the phone inventory");
      classes.insert(phone);
      if (task == TaskKind::kPhoneSoftmax)
        data.targets(row, phone) = 1.0;
      else
        data.targets.row(row) = map.TargetVector(phone).transpose();
    }
  }
  if (task == TaskKind::kPhoneSoftmax && classes.size() < 2)
    throw ValidationError("TrainFrameClassifier: degenerate labels, only one phone class present");
  if (!data.x.allFinite()) throw ValidationError("TrainFrameClassifier: non-finite features");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 0.01);
  FrameClassifierTraining result;
  FrameClassifier &m = result.model;
  m.task = task;
  m.weights = Matrix::NullaryExpr(outputs, dim, [&]() { return normal(rng); });
  m.bias = Vector::Zero(outputs);

  Matrix gw;
  Vector gb;
  double loss = Loss(m, data, options.l2, &gw, &gb);
  result.loss_history.push_back(loss);

  if (options.batch_size <= 0) {
    double lr = options.learning_rate;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
      bool accepted = false;
      for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
        FrameClassifier trial = m;
        trial.weights -= lr * gw;
        trial.bias -= lr * gb;
        Matrix trial_gw;
        Vector trial_gb;
        double trial_loss = Loss(trial, data, options.l2, &trial_gw, &trial_gb);
        if (std::isfinite(trial_loss) && trial_loss <= loss) {
          m = std::move(trial);
          gw = std::move(trial_gw);
          gb = std::move(trial_gb);
          loss = trial_loss;
          lr *= 1.1;
          accepted = true;
        } else {
          lr *= 0.5;
        }
      }
      result.loss_history.push_back(loss);
      if (!accepted) break;
    }
  } else {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(options.batch_size)) {
        std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
        TrainingData batch;
        batch.x.resize(static_cast<Eigen::Index>(end - start), dim);
        batch.targets.resize(static_cast<Eigen::Index>(end - start), outputs);
        for (std::size_t i = start; i < end; ++i) {
          batch.x.row(static_cast<Eigen::Index>(i - start)) = data.x.row(order[i]);
          batch.targets.row(static_cast<Eigen::Index>(i - start)) = data.targets.row(order[i]);
        }
        Loss(m, batch, options.l2, &gw, &gb);
        m.weights -= options.learning_rate * gw;
        m.bias -= options.learning_rate * gb;
      }
      result.loss_history.push_back(Loss(m, data, options.l2, nullptr, nullptr));
    }
  }
  SSD_VLOG << "frame classifier (" << ToString(task) << ") loss "
           << result.loss_history.front() << " -> " << result.loss_history.back();
  return result;
}

FeatureMatrix PredictPosteriors(const FrameClassifier &model, const FeatureMatrix &features) {
  if (features.Dim() != model.InputDim())
    throw DimensionError("PredictPosteriors: features have dimension " +
                         std::to_string(features.Dim()) + ", model expects " +
                         std::to_string(model.InputDim()));
  FeatureMatrix out;
  out.kind = FeatureKind::kPosterior;
  out.frame_shift = features.frame_shift;
  out.utterance_id = features.utterance_id;
  out.frames = features.frames * model.weights.transpose();
  out.frames.rowwise() += model.bias.transpose();
  if (model.task == TaskKind::kPhoneSoftmax)
    SoftmaxRows(&out.frames);
  else
    out.frames = out.frames.unaryExpr(&Sigmoid);
  return out;
}

void SaveFrameClassifier(const std::string &path, const FrameClassifier &model) {
  nlohmann::json j;
  j["format"] = "ssdscreen-frame-classifier";
  j["version"] = 1;
  j["task"] = std::string(ToString(model.task));
  j["outputs"] = model.OutputDim();
  j["inputs"] = model.InputDim();
  std::vector<double> w(model.weights.size());
  for (Eigen::Index r = 0; r < model.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < model.weights.cols(); ++c)
      w[static_cast<std::size_t>(r * model.weights.cols() + c)] = model.weights(r, c);
  j["weights"] = w;
  j["bias"] = std::vector<double>(model.bias.data(), model.bias.data() + model.bias.size());
  internal::WriteFile(path, j.dump());
}

FrameClassifier LoadFrameClassifier(const std::string &path) {
  try {
    auto j = nlohmann::json::parse(internal::ReadFile(path));
    if (j.at("format") != "ssdscreen-frame-classifier")
      throw FormatError(path + ": not a frame classifier file");
    FrameClassifier m;
    m.task = TaskKindFromString(j.at("task").get<std::string>());
    auto rows = j.at("outputs").get<Eigen::Index>();
    auto cols = j.at("inputs").get<Eigen::Index>();
    auto w = j.at("weights").get<std::vector<double>>();
    auto b = j.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(b.size()) != rows)
      throw FormatError(path + ": weight shape mismatch");
    m.weights.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m.weights(r, c) = w[static_cast<std::size_t>(r * cols + c)];
    m.bias = Eigen::Map<Vector>(b.data(), rows);
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double LogPosteriorRatio(double p, double eps) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError("posterior " + std::to_string(p) + " outside [0, 1]");
  double q = std::clamp(p, eps, 1.0 - eps);
  return std::log(q / (1.0 - q));
}

FeatureMatrix LprTransform(const FeatureMatrix &posteriors, double eps) {
  FeatureMatrix out;
  out.kind = FeatureKind::kLpr;
  out.frame_shift = posteriors.frame_shift;
  out.utterance_id = posteriors.utterance_id;
  out.frames.resize(posteriors.NumFrames(), posteriors.Dim());
  for (Eigen::Index t = 0; t < posteriors.NumFrames(); ++t)
    for (Eigen::Index k = 0; k < posteriors.Dim(); ++k) {
      double p = posteriors.frames(t, k);
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("utterance '" + posteriors.utterance_id + "' frame " +
                              std::to_string(t) + " class " + std::to_string(k) +
                              ": posterior " + std::to_string(p) + " outside [0, 1]");
      out.frames(t, k) = LogPosteriorRatio(p, eps);
    }
  return out;
}

void ValidatePosteriors(const FeatureMatrix &posteriors, TaskKind layout, double tolerance) {
  for (Eigen::Index t = 0; t < posteriors.NumFrames(); ++t) {
    for (Eigen::Index k = 0; k < posteriors.Dim(); ++k) {
      double p = posteriors.frames(t, k);
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("utterance '" + posteriors.utterance_id + "' frame " +
                              std::to_string(t) + " class " + std::to_string(k) +
                              ": posterior " + std::to_string(p) + " outside [0, 1]");
    }
    if (layout == TaskKind::kPhoneSoftmax) {
      double sum = posteriors.frames.row(t).sum();
      if (std::abs(sum - 1.0) > tolerance)
        throw ValidationError("utterance '" + posteriors.utterance_id + "' frame " +
                              std::to_string(t) + ": posteriors sum to " +
                              std::to_string(sum));
    }
  }
}

FeatureArchive IngestPosteriors(const std::string &path, TaskKind layout) {
  FeatureArchive archive = ReadFeatureArchive(path);
  for (const auto &[id, m] : archive) {
    if (m.kind != FeatureKind::kPosterior)
      throw ValidationError(path + ": entry '" + id + "' has kind " +
                            std::string(ToString(m.kind)) + ", expected posterior");
    m.Validate();
    ValidatePosteriors(m, layout);
  }
  return archive;
}

}  // namespace ssd
