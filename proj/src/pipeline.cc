// src/pipeline.cc

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

#include "ssd/pipeline.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "ssd/error.h"
#include "ssd/log.h"
#include "ssd/parallel.h"
#include "ssd/wav.h"
#include "text_util.h"

namespace ssd {

std::string_view ToString(Representation r) {
  switch (r) {
    case Representation::kIvectorMfcc: return "ivector-mfcc";
    case Representation::kIvectorPhoneLpr: return "ivector-phone-lpr";
    case Representation::kIvectorAttributeLpr: return "ivector-attribute-lpr";
    case Representation::kFunctional: return "functional";
  }
  return "unknown";
}

Representation RepresentationFromString(std::string_view name) {
  for (auto r : {Representation::kIvectorMfcc, Representation::kIvectorPhoneLpr,
                 Representation::kIvectorAttributeLpr, Representation::kFunctional})
    if (name == ToString(r)) return r;
  throw ValidationError("unknown representation: " + std::string(name));
}

std::string_view ToString(Fusion f) {
  switch (f) {
    case Fusion::kSubject: return "subject";
    case Fusion::kWordMajority: return "word-majority";
    case Fusion::kPhoneStack: return "phone-stack";
  }
  return "unknown";
}

Fusion FusionFromString(std::string_view name) {
  for (auto f : {Fusion::kSubject, Fusion::kWordMajority, Fusion::kPhoneStack})
    if (name == ToString(f)) return f;
  throw ValidationError("unknown fusion: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(const std::string &key, const std::string &value) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v))
    throw ValidationError(key + ": expected a number, got '" + value + "'");
  return v;
}

long long ParseInt(const std::string &key, const std::string &value) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ValidationError(key + ": expected an integer, got '" + value + "'");
  return v;
}

bool ParseBool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw ValidationError(key + ": expected true or false, got '" + value + "'");
}

struct Field {
  const char *key;
  std::function<std::string(const ExperimentConfig &)> get;
  std::function<void(ExperimentConfig &, const std::string &, const std::string &)> set;
};

template <typename Member>
Field StringField(const char *key, Member member) {
  return {key, [member](const ExperimentConfig &c) { return member(const_cast<ExperimentConfig &>(c)); },
          [member](ExperimentConfig &c, const std::string &, const std::string &v) { member(c) = v; }};
}

template <typename Member>
Field DoubleField(const char *key, Member member) {
  return {key,
          [member](const ExperimentConfig &c) {
            return FormatDouble(member(const_cast<ExperimentConfig &>(c)));
          },
          [member](ExperimentConfig &c, const std::string &k, const std::string &v) {
            member(c) = ParseDouble(k, v);
          }};
}

template <typename Member>
Field IntField(const char *key, Member member) {
  return {key,
          [member](const ExperimentConfig &c) {
            return std::to_string(member(const_cast<ExperimentConfig &>(c)));
          },
          [member](ExperimentConfig &c, const std::string &k, const std::string &v) {
            using T = std::remove_reference_t<decltype(member(c))>;
            long long x = ParseInt(k, v);
            if (x < 0) throw ValidationError(k + ": must not be negative");
            member(c) = static_cast<T>(x);
          }};
}

template <typename Member>
Field BoolField(const char *key, Member member) {
  return {key,
          [member](const ExperimentConfig &c) {
            return std::string(member(const_cast<ExperimentConfig &>(c)) ? "true" : "false");
          },
          [member](ExperimentConfig &c, const std::string &k, const std::string &v) {
            member(c) = ParseBool(k, v);
          }};
}

#define SSD_MEMBER(expr) [](ExperimentConfig &c) -> auto & { return c.expr; }

const std::vector<Field> &Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(StringField("data.manifest", SSD_MEMBER(manifest)));
    f.push_back(StringField("data.features", SSD_MEMBER(features)));
    f.push_back(StringField("data.alignment", SSD_MEMBER(alignment)));
    f.push_back(StringField("data.lexicon", SSD_MEMBER(lexicon)));
    f.push_back(StringField("data.attribute_table", SSD_MEMBER(attribute_table)));
    f.push_back({"experiment.representation",
                 [](const ExperimentConfig &c) { return std::string(ToString(c.representation)); },
                 [](ExperimentConfig &c, const std::string &, const std::string &v) {
                   c.representation = RepresentationFromString(v);
                 }});
    f.push_back({"experiment.fusion",
                 [](const ExperimentConfig &c) { return std::string(ToString(c.fusion)); },
                 [](ExperimentConfig &c, const std::string &, const std::string &v) {
                   c.fusion = FusionFromString(v);
                 }});
    f.push_back(IntField("experiment.folds", SSD_MEMBER(n_folds)));
    f.push_back(IntField("experiment.seed", SSD_MEMBER(seed)));
    f.push_back(DoubleField("frontend.frame_length", SSD_MEMBER(fbank.frame_length)));
    f.push_back(DoubleField("frontend.frame_shift", SSD_MEMBER(fbank.frame_shift)));
    f.push_back(IntField("frontend.n_mels", SSD_MEMBER(fbank.n_mels)));
    f.push_back(DoubleField("frontend.preemphasis", SSD_MEMBER(fbank.preemphasis)));
    f.push_back(DoubleField("frontend.log_floor", SSD_MEMBER(fbank.log_floor)));
    f.push_back(DoubleField("frontend.low_freq", SSD_MEMBER(fbank.low_freq)));
    f.push_back(IntField("frontend.n_ceps", SSD_MEMBER(n_ceps)));
    f.push_back(BoolField("frontend.deltas", SSD_MEMBER(deltas)));
    f.push_back(BoolField("frontend.cmvn", SSD_MEMBER(cmvn)));
    f.push_back(DoubleField("posterior.learning_rate", SSD_MEMBER(posterior.learning_rate)));
    f.push_back(IntField("posterior.epochs", SSD_MEMBER(posterior.epochs)));
    f.push_back(IntField("posterior.batch_size", SSD_MEMBER(posterior.batch_size)));
    f.push_back(DoubleField("posterior.l2", SSD_MEMBER(posterior.l2)));
    f.push_back(BoolField("lpr.cmvn", SSD_MEMBER(lpr_cmvn)));
    f.push_back(DoubleField("lpr.epsilon", SSD_MEMBER(lpr_epsilon)));
    f.push_back(IntField("ivector.components", SSD_MEMBER(ubm.n_components)));
    f.push_back(IntField("ivector.ubm_iters", SSD_MEMBER(ubm.n_iters)));
    f.push_back(DoubleField("ivector.variance_floor", SSD_MEMBER(ubm.variance_floor_scale)));
    f.push_back(IntField("ivector.kmeans_subsample", SSD_MEMBER(ubm.kmeans_subsample)));
    f.push_back(IntField("ivector.kmeans_iters", SSD_MEMBER(ubm.kmeans_iters)));
    f.push_back(IntField("ivector.rank", SSD_MEMBER(tv.rank)));
    f.push_back(IntField("ivector.tv_iters", SSD_MEMBER(tv.n_iters)));
    f.push_back(BoolField("ivector.length_norm", SSD_MEMBER(length_normalize)));
    f.push_back(BoolField("backend.lda", SSD_MEMBER(backend.use_lda)));
    f.push_back({"backend.classifier",
                 [](const ExperimentConfig &c) { return std::string(ToString(c.backend.classifier)); },
                 [](ExperimentConfig &c, const std::string &, const std::string &v) {
                   c.backend.classifier = ClassifierKindFromString(v);
                 }});
    f.push_back(DoubleField("backend.c", SSD_MEMBER(backend.c_param)));
    f.push_back(BoolField("backend.balanced", SSD_MEMBER(backend.balanced)));
    f.push_back(BoolField("backend.standardize", SSD_MEMBER(backend.standardize)));
    f.push_back(DoubleField("fusion.negative_ratio", SSD_MEMBER(pairs.negative_ratio)));
    f.push_back(IntField("fusion.max_pairs", SSD_MEMBER(pairs.max_pairs)));
    f.push_back(DoubleField("fusion.pair_c", SSD_MEMBER(pairs.c_param)));
    f.push_back(DoubleField("paralinguistics.pitch_min", SSD_MEMBER(lld.pitch_min)));
    f.push_back(DoubleField("paralinguistics.pitch_max", SSD_MEMBER(lld.pitch_max)));
    f.push_back(DoubleField("paralinguistics.voicing_threshold", SSD_MEMBER(lld.voicing_threshold)));
    std::sort(f.begin(), f.end(), [](const Field &a, const Field &b) {
      return std::string_view(a.key) < std::string_view(b.key);
    });
    return f;
  }();
  return fields;
}

#undef SSD_MEMBER

}  // namespace

void ExperimentConfig::Set(const std::string &key, const std::string &value) {
  for (const auto &f : Fields())
    if (key == f.key) {
      f.set(*this, key, value);
      return;
    }
  throw ValidationError("unknown config key: " + key);
}

ExperimentConfig ExperimentConfig::Parse(const std::string &text, const std::string &source) {
  ExperimentConfig config;
  auto lines = internal::SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = internal::Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    std::string where = source + ":" + std::to_string(i + 1);
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    try {
      config.Set(internal::Trim(line.substr(0, eq)), internal::Trim(line.substr(eq + 1)));
    } catch (const ValidationError &e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig ExperimentConfig::FromFile(const std::string &path) {
  ExperimentConfig config = Parse(internal::ReadFile(path), path);
  config.base_dir = std::filesystem::path(path).parent_path().string();
  return config;
}

std::string ExperimentConfig::Resolve(const std::string &path) const {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

std::string ExperimentConfig::Canonical() const {
  std::ostringstream out;
  for (const auto &f : Fields()) out << f.key << " = " << f.get(*this) << '\n';
  return out.str();
}

std::uint64_t ExperimentConfig::Hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : Canonical()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void ExperimentConfig::Validate() const {
  if (manifest.empty()) throw ValidationError("config: data.manifest is required");
  if (n_folds < 2) throw ValidationError("config: experiment.folds must be at least 2");
  if (representation == Representation::kFunctional && fusion == Fusion::kPhoneStack)
    throw ValidationError("config: the functional representation has no frames for phone-stack");
  bool lpr = representation == Representation::kIvectorPhoneLpr ||
             representation == Representation::kIvectorAttributeLpr;
  if ((lpr || fusion == Fusion::kPhoneStack) && alignment.empty())
    throw ValidationError("config: " +
                          std::string(lpr ? ToString(representation) : ToString(fusion)) +
                          " needs data.alignment");
  if (fusion == Fusion::kPhoneStack && lexicon.empty())
    throw ValidationError("config: phone-stack needs data.lexicon");
  if (representation == Representation::kFunctional && !features.empty())
    throw ValidationError("config: the functional representation reads audio; unset data.features");
}

// ---------------------------------------------------------------------------
// Data

FeatureArchive Featurize(const Manifest &manifest, const FbankOptions &options) {
  std::vector<FeatureMatrix> out(manifest.size());
  ParallelFor(manifest.size(), [&](std::size_t i) {
    out[i] = ComputeFilterbank(LoadWav(manifest[i].path), options);
    out[i].utterance_id = manifest[i].Key();
  });
  FeatureArchive archive;
  for (auto &fm : out) {
    std::string id = fm.utterance_id;
    if (!archive.emplace(id, std::move(fm)).second)
      throw ValidationError("manifest lists " + id + " twice");
  }
  return archive;
}

ExperimentData LoadExperimentData(const ExperimentConfig &config) {
  config.Validate();
  ExperimentData data;
  data.manifest = LoadManifest(config.Resolve(config.manifest));
  if (!config.features.empty()) {
    data.features = ReadFeatureArchive(config.Resolve(config.features));
  } else {
    for (auto &e : data.manifest) e.path = config.Resolve(e.path);
    if (config.representation != Representation::kFunctional)
      data.features = Featurize(data.manifest, config.fbank);
  }
  if (!config.alignment.empty()) data.alignment = ReadAlignment(config.Resolve(config.alignment));
  if (!config.lexicon.empty()) data.lexicon = ReadLexicon(config.Resolve(config.lexicon));
  if (!config.attribute_table.empty())
    data.attributes = AttributeMap::FromFile(config.Resolve(config.attribute_table));
  return data;
}

void LeakGuard::CheckTraining(std::span<const std::string> speakers,
                              const std::string &stage) const {
  for (const auto &s : speakers)
    if (test_.count(s))
      throw LeakError("test speaker " + s + " reached training stage '" + stage + "'");
}

namespace {

// Manifest entries grouped by speaker, words in canonical order.
using SpeakerWords = std::map<std::string, std::vector<const ManifestEntry *>>;

SpeakerWords GroupBySpeaker(const Manifest &manifest) {
  SpeakerWords out;
  for (const auto &e : manifest) out[e.speaker_id].push_back(&e);
  for (auto &[s, words] : out)
    std::sort(words.begin(), words.end(), [](const ManifestEntry *a, const ManifestEntry *b) {
      return a->word_id < b->word_id;
    });
  return out;
}

// Applies `fn` to every archive entry in parallel.
FeatureArchive MapArchive(const FeatureArchive &in,
                          const std::function<FeatureMatrix(const FeatureMatrix &)> &fn) {
  std::vector<const FeatureMatrix *> items;
  for (const auto &[id, fm] : in) items.push_back(&fm);
  std::vector<FeatureMatrix> out(items.size());
  ParallelFor(items.size(), [&](std::size_t i) { out[i] = fn(*items[i]); });
  FeatureArchive result;
  for (std::size_t i = 0; i < items.size(); ++i) result.emplace(items[i]->utterance_id, std::move(out[i]));
  return result;
}

}  // namespace

FeatureArchive SpeakerCmvn(const Manifest &manifest, const FeatureArchive &features) {
  FeatureArchive out;
  for (const auto &[speaker, words] : GroupBySpeaker(manifest)) {
    std::vector<const FeatureMatrix *> parts;
    for (const auto *e : words)
      if (auto it = features.find(e->Key()); it != features.end()) parts.push_back(&it->second);
    if (parts.empty()) continue;
    Eigen::Index total = 0, dim = parts.front()->Dim();
    for (const auto *p : parts) total += p->NumFrames();
    FeatureMatrix pooled;
    pooled.frames.resize(total, dim);
    Eigen::Index row = 0;
    for (const auto *p : parts) {
      if (p->Dim() != dim) throw DimensionError("speaker " + speaker + ": mixed feature dimensions");
      pooled.frames.middleRows(row, p->NumFrames()) = p->frames;
      row += p->NumFrames();
    }
    if (total < 2) throw ValidationError("speaker " + speaker + ": fewer than 2 frames for CMVN");
    CmvnStats stats = ComputeCmvnStats(pooled);
    for (const auto *p : parts) out.emplace(p->utterance_id, ApplyCmvn(*p, stats));
  }
  return out;
}

FeatureArchive PrepareFrames(const ExperimentConfig &config, const ExperimentData &data) {
  if (config.representation == Representation::kFunctional) return {};
  FeatureArchive base;
  for (const auto &e : data.manifest)
    if (auto it = data.features.find(e.Key()); it != data.features.end()) base.emplace(it->first, it->second);
  if (config.representation == Representation::kIvectorMfcc) {
    base = MapArchive(base, [&](const FeatureMatrix &fm) {
      FeatureMatrix m = fm.kind == FeatureKind::kFilterbank ? ComputeMfcc(fm, config.n_ceps) : fm;
      return config.deltas ? AppendDeltas(m) : m;
    });
  } else if (config.deltas) {
    base = MapArchive(base, [](const FeatureMatrix &fm) { return AppendDeltas(fm); });
  }
  return config.cmvn ? SpeakerCmvn(data.manifest, base) : base;
}

FrameClassifier TrainPosteriorModel(const ExperimentConfig &config, const ExperimentData &data,
                                    const FeatureArchive &frames,
                                    std::span<const std::string> speakers) {
  std::set<std::string> wanted(speakers.begin(), speakers.end());
  std::vector<FeatureMatrix> feats;
  std::vector<std::vector<std::string>> labels;
  for (const auto &e : data.manifest) {
    if (!wanted.count(e.speaker_id)) continue;
    auto f = frames.find(e.Key());
    if (f == frames.end()) continue;
    auto a = data.alignment.find(e.Key());
    if (a == data.alignment.end()) {
      SSD_WARN << "no alignment for " << e.Key() << "; skipped in posterior training";
      continue;
    }
    if (static_cast<Eigen::Index>(a->second.size()) != f->second.NumFrames())
      throw ValidationError("alignment of " + e.Key() + " has " + std::to_string(a->second.size()) +
                            " labels for " + std::to_string(f->second.NumFrames()) + " frames");
    feats.push_back(f->second);
    labels.push_back(a->second);
  }
  if (feats.empty()) throw ValidationError("no aligned frames to train the posterior classifier");
  TaskKind task = config.representation == Representation::kIvectorPhoneLpr
                      ? TaskKind::kPhoneSoftmax
                      : TaskKind::kAttributeMultitask;
  return TrainFrameClassifier(feats, labels, data.attributes, task, config.posterior).model;
}

FeatureArchive LprFrames(const ExperimentConfig &config, const ExperimentData &data,
                         const FrameClassifier &model, const FeatureArchive &frames) {
  FeatureArchive lpr = MapArchive(frames, [&](const FeatureMatrix &fm) {
    return LprTransform(PredictPosteriors(model, fm), config.lpr_epsilon);
  });
  return config.lpr_cmvn ? SpeakerCmvn(data.manifest, lpr) : lpr;
}

// ---------------------------------------------------------------------------
// Cross-validation

namespace {

struct FoldContext {
  const ExperimentConfig &config;
  const ExperimentData &data;
  const SpeakerWords &speakers;
  const std::map<std::string, Diagnosis> &diagnoses;
  const std::vector<std::string> &train;
  const std::vector<std::string> &test;
  const LeakGuard &guard;
  std::uint64_t seed;
};

std::vector<std::string> TdOnly(const FoldContext &ctx, const std::vector<std::string> &ids) {
  std::vector<std::string> out;
  for (const auto &s : ids)
    if (ctx.diagnoses.at(s) == Diagnosis::kTd) out.push_back(s);
  return out;
}

int LabelOf(const FoldContext &ctx, const std::string &speaker) {
  return ToLabel(ctx.diagnoses.at(speaker));
}

Matrix StackRows(const std::vector<Vector> &rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

Backend TrainSpeakerBackend(const FoldContext &ctx, const std::map<std::string, Vector> &reps,
                            const BackendOptions &options, const std::string &stage) {
  ctx.guard.CheckTraining(ctx.train, stage);
  std::vector<Vector> rows;
  LabeledSet set;
  for (const auto &s : ctx.train) {
    rows.push_back(reps.at(s));
    set.labels.push_back(LabelOf(ctx, s));
  }
  set.x = StackRows(rows);
  return TrainBackend(set, options);
}

std::vector<int> PredictSpeakers(const FoldContext &ctx, const Backend &be,
                                 const std::map<std::string, Vector> &reps) {
  std::vector<Vector> rows;
  for (const auto &s : ctx.test) rows.push_back(reps.at(s));
  return be.Predict(StackRows(rows));
}

// Frames of the representation for this fold: LPR variants retrain the
// posterior classifier on the fold's TD training speakers.
FeatureArchive FoldFrames(const FoldContext &ctx, const FeatureArchive &prepared) {
  Representation r = ctx.config.representation;
  if (r != Representation::kIvectorPhoneLpr && r != Representation::kIvectorAttributeLpr)
    return prepared;
  auto td = TdOnly(ctx, ctx.train);
  ctx.guard.CheckTraining(td, "posterior classifier");
  ExperimentConfig cfg = ctx.config;
  cfg.posterior.seed = ctx.seed;
  FrameClassifier model = TrainPosteriorModel(cfg, ctx.data, prepared, td);
  return LprFrames(ctx.config, ctx.data, model, prepared);
}

struct IvectorSystem {
  IvectorExtractor extractor;
  std::map<std::string, BaumWelchStats> word_stats;     // by utterance key
  std::map<std::string, BaumWelchStats> speaker_stats;  // by speaker
};

IvectorSystem TrainIvectors(const FoldContext &ctx, const FeatureArchive &frames) {
  std::set<std::string> train_set(ctx.train.begin(), ctx.train.end());
  std::vector<FeatureMatrix> ubm_frames;
  for (const auto &s : ctx.train)
    for (const auto *e : ctx.speakers.at(s))
      if (auto it = frames.find(e->Key()); it != frames.end()) ubm_frames.push_back(it->second);
  ctx.guard.CheckTraining(ctx.train, "ubm");
  UbmOptions uo = ctx.config.ubm;
  uo.seed = ctx.seed;
  UbmTraining ubm = TrainUbm(ubm_frames, uo);

  std::vector<const FeatureMatrix *> items;
  for (const auto &[id, fm] : frames) items.push_back(&fm);
  std::vector<BaumWelchStats> stats(items.size());
  ParallelFor(items.size(), [&](std::size_t i) { stats[i] = AccumulateStats(ubm.gmm, *items[i]); });
  std::map<std::string, BaumWelchStats> word_stats;
  for (std::size_t i = 0; i < items.size(); ++i) word_stats.emplace(items[i]->utterance_id, std::move(stats[i]));

  // Statistics are additive, so a speaker's long utterance is the sum over
  // its words in canonical order.
  std::map<std::string, BaumWelchStats> speaker_stats;
  for (const auto &[s, words] : ctx.speakers) {
    BaumWelchStats acc = ZeroStats(ubm.gmm.NumComponents(), ubm.gmm.Dim());
    bool any = false;
    for (const auto *e : words)
      if (auto it = word_stats.find(e->Key()); it != word_stats.end()) {
        acc += it->second;
        any = true;
      }
    if (!any) throw ValidationError("no features found for speaker " + s);
    speaker_stats.emplace(s, std::move(acc));
  }

  std::vector<BaumWelchStats> tv_stats;
  for (const auto &s : ctx.train) tv_stats.push_back(speaker_stats.at(s));
  ctx.guard.CheckTraining(ctx.train, "total variability");
  TvOptions to = ctx.config.tv;
  to.seed = ctx.seed + 1;
  TvTraining tv = TrainTv(ubm.gmm, tv_stats, to);
  return {IvectorExtractor(tv.tv), std::move(word_stats), std::move(speaker_stats)};
}

std::map<std::string, Vector> ExtractAll(const IvectorSystem &sys,
                                         const std::map<std::string, BaumWelchStats> &stats,
                                         bool length_normalize) {
  std::vector<const std::pair<const std::string, BaumWelchStats> *> items;
  for (const auto &kv : stats) items.push_back(&kv);
  std::vector<Vector> out(items.size());
  ParallelFor(items.size(), [&](std::size_t i) {
    out[i] = sys.extractor.Extract(items[i]->second, length_normalize).w;
  });
  std::map<std::string, Vector> result;
  for (std::size_t i = 0; i < items.size(); ++i) result.emplace(items[i]->first, std::move(out[i]));
  return result;
}

std::vector<int> WordMajority(const FoldContext &ctx, const std::map<std::string, Vector> &word_reps) {
  ctx.guard.CheckTraining(ctx.train, "word back-end");
  std::vector<Vector> rows;
  LabeledSet set;
  for (const auto &s : ctx.train)
    for (const auto *e : ctx.speakers.at(s))
      if (auto it = word_reps.find(e->Key()); it != word_reps.end()) {
        rows.push_back(it->second);
        set.labels.push_back(LabelOf(ctx, s));  // inherited from the speaker
      }
  set.x = StackRows(rows);
  BackendOptions bo = ctx.config.backend;
  bo.classifier = ClassifierKind::kLogreg;
  Backend be = TrainBackend(set, bo);
  std::vector<int> out;
  for (const auto &s : ctx.test) {
    std::vector<Vector> test_rows;
    for (const auto *e : ctx.speakers.at(s))
      if (auto it = word_reps.find(e->Key()); it != word_reps.end()) test_rows.push_back(it->second);
    if (test_rows.empty()) throw ValidationError("no word representations for speaker " + s);
    out.push_back(MajorityVote(be.Predict(StackRows(test_rows))));
  }
  return out;
}

// Consonant-vowel segments of every word: boundaries come from the runs of
// the frame alignment, phone identities from the canonical lexicon entry.
struct SpeakerSegments {
  std::vector<Segment> segments;
};

std::map<std::string, SpeakerSegments> ExtractSegments(const FoldContext &ctx,
                                                       const FeatureArchive &frames) {
  const AttributeMap &map = ctx.data.attributes;
  std::map<std::string, SpeakerSegments> out;
  for (const auto &[speaker, words] : ctx.speakers) {
    auto &segs = out[speaker].segments;
    for (const auto *e : words) {
      auto f = frames.find(e->Key());
      auto a = ctx.data.alignment.find(e->Key());
      auto lex = ctx.data.lexicon.find(e->word_id);
      if (f == frames.end() || a == ctx.data.alignment.end() || lex == ctx.data.lexicon.end()) continue;
      std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;  // start, length
      const auto &labels = a->second;
      for (std::size_t t = 0; t < labels.size(); ++t)
        if (t == 0 || labels[t] != labels[t - 1])
          runs.push_back({static_cast<Eigen::Index>(t), 1});
        else
          ++runs.back().second;
      const auto &phones = lex->second;
      if (runs.size() != phones.size() ||
          static_cast<Eigen::Index>(labels.size()) != f->second.NumFrames()) {
        SSD_WARN << e->Key() << ": alignment does not match the lexicon; word skipped";
        continue;
      }
      for (std::size_t i = 0; i + 1 < phones.size(); ++i) {
        int c = map.Inventory().IndexOf(phones[i]);
        int v = map.Inventory().IndexOf(phones[i + 1]);
        if (c < 0 || v < 0 || map.IsVowel(c) || !map.IsVowel(v)) continue;
        const Matrix &x = f->second.frames;
        Vector emb(2 * x.cols());
        emb << x.middleRows(runs[i].first, runs[i].second).colwise().mean().transpose(),
            x.middleRows(runs[i + 1].first, runs[i + 1].second).colwise().mean().transpose();
        segs.push_back({phones[i], e->word_id + "#" + std::to_string(i), std::move(emb)});
      }
    }
  }
  return out;
}

std::vector<int> PhoneStack(const FoldContext &ctx, const FeatureArchive &frames) {
  auto segments = ExtractSegments(ctx, frames);
  auto td_train = TdOnly(ctx, ctx.train);
  ctx.guard.CheckTraining(td_train, "pair classifier");
  std::vector<Segment> references;
  std::map<std::string, std::pair<std::size_t, std::size_t>> span_of;  // speaker -> [begin, end)
  for (const auto &s : td_train) {
    const auto &segs = segments.at(s).segments;
    span_of[s] = {references.size(), references.size() + segs.size()};
    references.insert(references.end(), segs.begin(), segs.end());
  }
  PairTrainingOptions po = ctx.config.pairs;
  po.seed = ctx.seed + 2;
  LogisticModel pair_lr = TrainPairClassifier(references, po);

  std::set<std::string> consonants;
  for (const auto &[w, phones] : ctx.data.lexicon)
    for (const auto &p : phones) {
      int idx = ctx.data.attributes.Inventory().IndexOf(p);
      if (idx >= 0 && !ctx.data.attributes.IsVowel(idx)) consonants.insert(p);
    }
  std::vector<std::string> order(consonants.begin(), consonants.end());

  std::vector<std::string> all(ctx.train);
  all.insert(all.end(), ctx.test.begin(), ctx.test.end());
  std::vector<Vector> stacks(all.size());
  ParallelFor(all.size(), [&](std::size_t i) {
    const std::string &s = all[i];
    std::span<const Segment> refs(references);
    std::vector<Segment> others;
    if (auto it = span_of.find(s); it != span_of.end()) {
      // A TD training speaker is never compared with its own segments.
      others.insert(others.end(), references.begin(), references.begin() + it->second.first);
      others.insert(others.end(), references.begin() + it->second.second, references.end());
      refs = others;
    }
    AccuracyStack st = StackAccuracies(PairwiseCompare(segments.at(s).segments, refs, pair_lr), order);
    if (st.any_missing) SSD_WARN << "speaker " << s << ": missing consonants filled with 0.5";
    stacks[i] = st.values;
  });
  std::map<std::string, Vector> reps;
  for (std::size_t i = 0; i < all.size(); ++i) reps[all[i]] = stacks[i];
  Backend be = TrainSpeakerBackend(ctx, reps, ctx.config.backend, "stack back-end");
  return PredictSpeakers(ctx, be, reps);
}

Vector FunctionalsOf(const std::vector<const ManifestEntry *> &words, const LldOptions &options) {
  std::vector<AudioBuffer> audio;
  for (const auto *e : words) audio.push_back(LoadWav(e->path));
  return ApplyFunctionals(ComputeLlds(ConcatAudio(audio), options));
}

double Mean(const std::vector<double> &v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double SampleStd(const std::vector<double> &v) {
  if (v.size() < 2) return 0.0;
  double m = Mean(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string SyntheticExperimentConfig(const SyntheticSpec &spec) {
  return "data.manifest = manifest.tsv\n"
         "data.features = features.ssdf\n"
         "data.alignment = alignment.txt\n"
         "data.lexicon = lexicon.txt\n"
         "experiment.representation = ivector-attribute-lpr\n"
         "experiment.fusion = subject\n"
         "ivector.components = 32\n"
         "ivector.rank = 20\n"
         "backend.lda = true\n"
         // MFCC cannot keep more cepstra than the frames have dimensions.
         "frontend.n_ceps = " +
         std::to_string(std::min(20, spec.dim)) + "\n";
}

CrossvalReport RunCrossval(const ExperimentConfig &config, const ExperimentData &data,
                           const std::optional<FoldPlan> &plan_in) {
  config.Validate();
  auto diagnoses = SpeakerDiagnoses(data.manifest);
  SpeakerWords speakers = GroupBySpeaker(data.manifest);
  FoldPlan plan = plan_in ? *plan_in : MakeFolds(data.manifest, config.n_folds, config.seed);
  for (const auto &[s, dx] : diagnoses)
    if (plan.FoldOf(s) < 0) throw ValidationError("speaker " + s + " is in no fold");

  FeatureArchive prepared = PrepareFrames(config, data);
  std::map<std::string, Vector> functionals, word_functionals;
  if (config.representation == Representation::kFunctional) {
    std::vector<std::string> ids;
    for (const auto &[s, w] : speakers) ids.push_back(s);
    std::vector<Vector> out(ids.size());
    ParallelFor(ids.size(), [&](std::size_t i) { out[i] = FunctionalsOf(speakers.at(ids[i]), config.lld); });
    for (std::size_t i = 0; i < ids.size(); ++i) functionals[ids[i]] = out[i];
    if (config.fusion == Fusion::kWordMajority) {
      std::vector<Vector> wout(data.manifest.size());
      ParallelFor(data.manifest.size(), [&](std::size_t i) {
        wout[i] = FunctionalsOf({&data.manifest[i]}, config.lld);
      });
      for (std::size_t i = 0; i < data.manifest.size(); ++i)
        word_functionals[data.manifest[i].Key()] = wout[i];
    }
  }

  CrossvalReport report;
  report.config_hash = config.Hash();
  for (int fold = 0; fold < static_cast<int>(plan.test_speakers.size()); ++fold) {
    std::vector<std::string> test = plan.test_speakers[fold];
    std::vector<std::string> train = plan.TrainSpeakers(fold);
    LeakGuard guard(test);
    std::uint64_t seed = config.seed * 1000003ULL + static_cast<std::uint64_t>(fold) * 7919ULL;
    FoldContext ctx{config, data, speakers, diagnoses, train, test, guard, seed};
    SSD_LOG << "fold " << fold + 1 << ": " << train.size() << " training, " << test.size()
            << " test speakers";

    std::vector<int> predictions;
    if (config.representation == Representation::kFunctional) {
      if (config.fusion == Fusion::kWordMajority) {
        predictions = WordMajority(ctx, word_functionals);
      } else {
        Backend be = TrainSpeakerBackend(ctx, functionals, config.backend, "back-end");
        predictions = PredictSpeakers(ctx, be, functionals);
      }
    } else {
      FeatureArchive frames = FoldFrames(ctx, prepared);
      if (config.fusion == Fusion::kPhoneStack) {
        predictions = PhoneStack(ctx, frames);
      } else {
        IvectorSystem sys = TrainIvectors(ctx, frames);
        if (config.fusion == Fusion::kWordMajority) {
          predictions = WordMajority(ctx, ExtractAll(sys, sys.word_stats, config.length_normalize));
        } else {
          auto reps = ExtractAll(sys, sys.speaker_stats, config.length_normalize);
          Backend be = TrainSpeakerBackend(ctx, reps, config.backend, "back-end");
          predictions = PredictSpeakers(ctx, be, reps);
        }
      }
    }
    std::vector<int> truths;
    for (const auto &s : test) truths.push_back(LabelOf(ctx, s));
    FoldResult r;
    r.fold = fold + 1;
    r.metrics = Evaluate(predictions, truths);
    r.test_speakers = test;
    r.predictions = predictions;
    SSD_LOG << "fold " << fold + 1 << ": UAR " << r.metrics.uar << ", macro F1 " << r.metrics.macro_f1;
    report.folds.push_back(std::move(r));
  }
  std::vector<double> uar, f1;
  for (const auto &r : report.folds) {
    uar.push_back(r.metrics.uar);
    f1.push_back(r.metrics.macro_f1);
  }
  report.mean_uar = Mean(uar);
  report.std_uar = SampleStd(uar);
  report.mean_macro_f1 = Mean(f1);
  report.std_macro_f1 = SampleStd(f1);
  return report;
}

namespace {
std::string Hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

std::string CrossvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["config_hash"] = Hex(config_hash);
  j["folds"] = nlohmann::ordered_json::array();
  for (const auto &r : folds) {
    nlohmann::ordered_json f;
    f["fold"] = r.fold;
    f["uar"] = r.metrics.uar;
    f["macro_f1"] = r.metrics.macro_f1;
    f["tp"] = r.metrics.tp;
    f["fp"] = r.metrics.fp;
    f["tn"] = r.metrics.tn;
    f["fn"] = r.metrics.fn;
    j["folds"].push_back(f);
  }
  j["mean_uar"] = mean_uar;
  j["std_uar"] = std_uar;
  j["mean_macro_f1"] = mean_macro_f1;
  j["std_macro_f1"] = std_macro_f1;
  return j.dump(2) + "\n";
}

std::string CrossvalReport::ToText() const {
  std::ostringstream out;
  char line[160];
  out << "config " << Hex(config_hash) << "\n";
  out << "fold     UAR  macroF1   tp   fp   tn   fn\n";
  for (const auto &r : folds) {
    std::snprintf(line, sizeof(line), "%4d  %6.3f   %6.3f %4ld %4ld %4ld %4ld\n", r.fold,
                  r.metrics.uar, r.metrics.macro_f1, r.metrics.tp, r.metrics.fp, r.metrics.tn,
                  r.metrics.fn);
    out << line;
  }
  std::snprintf(line, sizeof(line), "mean  %6.3f (%.3f)  %6.3f (%.3f)\n", mean_uar, std_uar,
                mean_macro_f1, std_macro_f1);
  out << line;
  return out.str();
}

}  // namespace ssd
