// tools/ssd_screen.cc

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

// Command-line front end: one subcommand per pipeline stage plus `crossval`
// for the whole fold-wise experiment. Exit codes: 0 success, 1 pipeline or
// validation failure, 2 usage error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssd/archive.h"
#include "ssd/attributes.h"
#include "ssd/backend.h"
#include "ssd/corpus.h"
#include "ssd/error.h"
#include "ssd/frontend.h"
#include "ssd/gmm.h"
#include "ssd/ivector.h"
#include "ssd/log.h"
#include "ssd/parallel.h"
#include "ssd/pipeline.h"

namespace {

using namespace ssd;

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << text;
}

std::vector<FeatureMatrix> Values(const FeatureArchive &archive) {
  std::vector<FeatureMatrix> out;
  for (const auto &[id, fm] : archive) out.push_back(fm);
  return out;
}

// Utterance statistics, or per-speaker sums when a manifest is given.
std::map<std::string, BaumWelchStats> CollectStats(const DiagGmm &ubm, const FeatureArchive &features,
                                                   const std::string &manifest_path,
                                                   const std::vector<std::string> &only) {
  std::map<std::string, BaumWelchStats> word;
  std::vector<const FeatureMatrix *> items;
  for (const auto &[id, fm] : features) items.push_back(&fm);
  std::vector<BaumWelchStats> stats(items.size());
  ParallelFor(items.size(), [&](std::size_t i) { stats[i] = AccumulateStats(ubm, *items[i]); });
  for (std::size_t i = 0; i < items.size(); ++i) word.emplace(items[i]->utterance_id, std::move(stats[i]));
  if (manifest_path.empty()) return word;

  Manifest manifest = LoadManifest(manifest_path);
  std::map<std::string, BaumWelchStats> speakers;
  for (const auto &[s, dx] : SpeakerDiagnoses(manifest)) {
    if (!only.empty() && std::find(only.begin(), only.end(), s) == only.end()) continue;
    BaumWelchStats acc = ZeroStats(ubm.NumComponents(), ubm.Dim());
    bool any = false;
    for (const auto &e : EntriesOf(manifest, s))
      if (auto it = word.find(e.Key()); it != word.end()) {
        acc += it->second;
        any = true;
      }
    if (!any) throw ValidationError("no features found for speaker " + s);
    speakers.emplace(s, std::move(acc));
  }
  for (const auto &s : only)
    if (!speakers.count(s)) throw ValidationError("speaker " + s + " is not in the manifest");
  return speakers;
}

LabeledSet Labeled(const RepresentationArchive &reps, const std::map<std::string, int> &labels,
                   std::vector<std::string> *ids) {
  LabeledSet set;
  std::vector<Vector> rows;
  for (const auto &[id, rep] : reps) {
    auto it = labels.find(id);
    if (it == labels.end()) throw ValidationError("no label for " + id);
    if (!rows.empty() && rep.values.size() != rows.front().size())
      throw DimensionError("representation " + id + " has a different dimension");
    rows.push_back(rep.values);
    set.labels.push_back(it->second);
    if (ids) ids->push_back(id);
  }
  if (rows.empty()) throw ValidationError("empty representation archive");
  set.x.resize(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) set.x.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return set;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Speech sound disorder screening from multi-word child speech"};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Progress messages");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  // featurize
  auto *featurize = app.add_subcommand("featurize", "Log-mel or MFCC features from manifest audio");
  std::string f_manifest, f_out, f_kind = "fbank";
  FbankOptions fbank;
  int n_ceps = 20;
  featurize->add_option("--manifest", f_manifest, "Manifest TSV")->required();
  featurize->add_option("--out", f_out, "Output feature archive")->required();
  featurize->add_option("--kind", f_kind, "fbank or mfcc")->check(CLI::IsMember({"fbank", "mfcc"}));
  featurize->add_option("--n-mels", fbank.n_mels, "Mel bands");
  featurize->add_option("--n-ceps", n_ceps, "Cepstra kept for mfcc");
  featurize->add_option("--frame-length", fbank.frame_length, "Seconds");
  featurize->add_option("--frame-shift", fbank.frame_shift, "Seconds");

  // train-posterior
  auto *train_post = app.add_subcommand("train-posterior", "Frame-level phone or attribute classifier");
  std::string p_features, p_alignment, p_out, p_task = "attribute", p_table;
  FrameClassifierOptions p_opts;
  train_post->add_option("--features", p_features, "Feature archive")->required();
  train_post->add_option("--alignment", p_alignment, "Frame phone labels")->required();
  train_post->add_option("--out", p_out, "Output model (JSON)")->required();
  train_post->add_option("--task", p_task, "phone or attribute")->check(CLI::IsMember({"phone", "attribute"}));
  train_post->add_option("--attribute-table", p_table, "Attribute table (default: built-in)");
  train_post->add_option("--epochs", p_opts.epochs);
  train_post->add_option("--learning-rate", p_opts.learning_rate);
  train_post->add_option("--batch-size", p_opts.batch_size, "0 = full batch");
  train_post->add_option("--l2", p_opts.l2);
  train_post->add_option("--seed", p_opts.seed);

  // lpr
  auto *lpr = app.add_subcommand("lpr", "Posteriors to log-posterior ratios");
  std::string l_features, l_model, l_posteriors, l_out, l_task = "attribute";
  double l_eps = kDefaultLprEpsilon;
  lpr->add_option("--features", l_features, "Feature archive (with --model)");
  lpr->add_option("--model", l_model, "Frame classifier");
  lpr->add_option("--posteriors", l_posteriors, "Externally computed posterior archive");
  lpr->add_option("--task", l_task, "Layout of --posteriors: phone or attribute")
      ->check(CLI::IsMember({"phone", "attribute"}));
  lpr->add_option("--epsilon", l_eps, "Clamp");
  lpr->add_option("--out", l_out, "Output LPR archive")->required();

  // train-ubm
  auto *train_ubm = app.add_subcommand("train-ubm", "GMM-UBM by EM");
  std::string u_features, u_out;
  UbmOptions u_opts;
  train_ubm->add_option("--features", u_features)->required();
  train_ubm->add_option("--out", u_out, "Output model")->required();
  train_ubm->add_option("--components", u_opts.n_components);
  train_ubm->add_option("--iters", u_opts.n_iters);
  train_ubm->add_option("--seed", u_opts.seed);

  // train-tv
  auto *train_tv = app.add_subcommand("train-tv", "Total-variability matrix by EM");
  std::string t_features, t_model, t_out, t_manifest;
  TvOptions t_opts;
  train_tv->add_option("--features", t_features)->required();
  train_tv->add_option("--model", t_model, "UBM model")->required();
  train_tv->add_option("--out", t_out, "Output model")->required();
  train_tv->add_option("--manifest", t_manifest, "Pool words into one long utterance per speaker");
  train_tv->add_option("--rank", t_opts.rank);
  train_tv->add_option("--iters", t_opts.n_iters);
  train_tv->add_option("--seed", t_opts.seed);

  // extract
  auto *extract = app.add_subcommand("extract", "i-vectors from a trained model");
  std::string x_features, x_model, x_out, x_manifest;
  std::vector<std::string> x_speakers;
  bool x_norm = false;
  extract->add_option("--features", x_features)->required();
  extract->add_option("--model", x_model, "Model with a TV matrix")->required();
  extract->add_option("--out", x_out, "Representation archive")->required();
  extract->add_option("--manifest", x_manifest, "Extract one i-vector per speaker");
  extract->add_option("--speaker", x_speakers, "Restrict to these speakers (needs --manifest)");
  extract->add_flag("--length-norm", x_norm);

  // train-backend
  auto *train_be = app.add_subcommand("train-backend", "LDA + linear classifier");
  std::string b_reps, b_labels, b_out, b_classifier = "svm";
  BackendOptions b_opts;
  train_be->add_option("--reps", b_reps, "Representation archive")->required();
  train_be->add_option("--labels", b_labels, "Label sidecar")->required();
  train_be->add_option("--out", b_out, "Output back-end (JSON)")->required();
  train_be->add_flag("--lda", b_opts.use_lda);
  train_be->add_option("--classifier", b_classifier)->check(CLI::IsMember({"svm", "logreg"}));
  train_be->add_option("--c", b_opts.c_param);
  train_be->add_flag("--balanced", b_opts.balanced);

  // evaluate
  auto *evaluate = app.add_subcommand("evaluate", "Score representations and report metrics");
  std::string e_backend, e_reps, e_labels, e_json;
  evaluate->add_option("--backend", e_backend)->required();
  evaluate->add_option("--reps", e_reps)->required();
  evaluate->add_option("--labels", e_labels)->required();
  evaluate->add_option("--json", e_json, "Write metrics as JSON");

  // crossval
  auto *crossval = app.add_subcommand("crossval", "Speaker-disjoint cross-validation");
  std::string c_config, c_out, c_text;
  std::vector<std::string> c_overrides;
  crossval->add_option("--config", c_config, "Experiment config")->required();
  crossval->add_option("--out", c_out, "JSON report");
  crossval->add_option("--text", c_text, "Plain-text report");
  crossval->add_option("--set", c_overrides, "Override a config key: section.key=value");

  // synth
  auto *synth = app.add_subcommand("synth", "Synthetic corpus in feature space");
  std::string s_out;
  SyntheticSpec spec;
  synth->add_option("--out-dir", s_out)->required();
  synth->add_option("--td", spec.n_td);
  synth->add_option("--ssd", spec.n_ssd);
  synth->add_option("--words", spec.words_per_speaker);
  synth->add_option("--rate", spec.substitution_rate, "Substitution probability");
  synth->add_option("--dim", spec.dim);
  synth->add_option("--attribute-scale", spec.attribute_scale, "Norm of each attribute prototype");
  synth->add_option("--phone-scale", spec.phone_scale, "Norm of the phone-specific offset");
  synth->add_option("--noise", spec.noise, "Frame noise deviation");
  synth->add_option("--speaker-warp", spec.speaker_warp, "Per-speaker linear distortion");
  synth->add_option("--speaker-offset", spec.speaker_offset, "Per-speaker additive offset");
  synth->add_option("--speaker-phone-scale", spec.speaker_phone_scale,
                    "Per-speaker, per-phone pronunciation deviation");
  synth->add_flag("--shift-attributes,!--exact-partners", spec.shift_attributes,
                  "Realize errors as a shift of the changed attribute only (default)");
  synth->add_option("--seed", spec.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }
  if (verbose) SetLogLevel(LogLevel::kInfo);
  if (quiet) SetLogLevel(LogLevel::kError);

  try {
    if (*featurize) {
      Manifest manifest = LoadManifest(f_manifest);
      auto base = std::filesystem::path(f_manifest).parent_path();
      for (auto &e : manifest)
        if (std::filesystem::path(e.path).is_relative()) e.path = (base / e.path).string();
      FeatureArchive archive = Featurize(manifest, fbank);
      if (f_kind == "mfcc")
        for (auto &[id, fm] : archive) fm = ComputeMfcc(fm, n_ceps);
      WriteFeatureArchive(f_out, archive);
    } else if (*train_post) {
      AttributeMap map = p_table.empty() ? AttributeMap::Default() : AttributeMap::FromFile(p_table);
      FeatureArchive features = ReadFeatureArchive(p_features);
      Alignment alignment = ReadAlignment(p_alignment);
      std::vector<FeatureMatrix> feats;
      std::vector<std::vector<std::string>> labels;
      for (const auto &[id, fm] : features) {
        auto it = alignment.find(id);
        if (it == alignment.end()) throw ValidationError("no alignment for " + id);
        feats.push_back(fm);
        labels.push_back(it->second);
      }
      auto trained = TrainFrameClassifier(feats, labels, map, TaskKindFromString(p_task), p_opts);
      SSD_LOG << "final training loss " << trained.loss_history.back();
      SaveFrameClassifier(p_out, trained.model);
    } else if (*lpr) {
      if (l_model.empty() == l_posteriors.empty())
        throw CLI::ValidationError("lpr", "give exactly one of --model and --posteriors");
      FeatureArchive out;
      if (!l_model.empty()) {
        if (l_features.empty()) throw CLI::ValidationError("lpr", "--model needs --features");
        FrameClassifier model = LoadFrameClassifier(l_model);
        for (const auto &[id, fm] : ReadFeatureArchive(l_features))
          out.emplace(id, LprTransform(PredictPosteriors(model, fm), l_eps));
      } else {
        for (const auto &[id, fm] : IngestPosteriors(l_posteriors, TaskKindFromString(l_task)))
          out.emplace(id, LprTransform(fm, l_eps));
      }
      WriteFeatureArchive(l_out, out);
    } else if (*train_ubm) {
      auto trained = TrainUbm(Values(ReadFeatureArchive(u_features)), u_opts);
      SaveIvectorModel(u_out, {trained.gmm, std::nullopt});
    } else if (*train_tv) {
      IvectorModel model = LoadIvectorModel(t_model);
      auto stats = CollectStats(model.ubm, ReadFeatureArchive(t_features), t_manifest, {});
      std::vector<BaumWelchStats> list;
      for (auto &[id, s] : stats) list.push_back(std::move(s));
      auto trained = TrainTv(model.ubm, list, t_opts);
      model.tv = trained.tv;
      SaveIvectorModel(t_out, model);
    } else if (*extract) {
      if (!x_speakers.empty() && x_manifest.empty())
        throw CLI::ValidationError("extract", "--speaker needs --manifest");
      IvectorModel model = LoadIvectorModel(x_model);
      if (!model.tv) throw ValidationError(x_model + " holds no total-variability matrix");
      auto stats = CollectStats(model.ubm, ReadFeatureArchive(x_features), x_manifest, x_speakers);
      IvectorExtractor extractor(*model.tv);
      RepresentationArchive out;
      for (const auto &[id, s] : stats)
        out[id] = {id, RepresentationKind::kIvector, extractor.Extract(s, x_norm).w};
      WriteRepresentationArchive(x_out, out);
    } else if (*train_be) {
      b_opts.classifier = ClassifierKindFromString(b_classifier);
      LabeledSet set = Labeled(ReadRepresentationArchive(b_reps), ReadLabels(b_labels), nullptr);
      SaveBackend(b_out, TrainBackend(set, b_opts));
    } else if (*evaluate) {
      Backend be = LoadBackend(e_backend);
      std::vector<std::string> ids;
      LabeledSet set = Labeled(ReadRepresentationArchive(e_reps), ReadLabels(e_labels), &ids);
      Metrics m = Evaluate(be.Predict(set.x), set.labels);
      std::cout << "UAR " << m.uar << "  macro-F1 " << m.macro_f1 << "  tp " << m.tp << " fp "
                << m.fp << " tn " << m.tn << " fn " << m.fn << "\n";
      if (!e_json.empty()) {
        CrossvalReport r;
        r.folds.push_back({1, m, ids, {}});
        r.mean_uar = m.uar;
        r.mean_macro_f1 = m.macro_f1;
        WriteText(e_json, r.ToJson());
      }
    } else if (*crossval) {
      ExperimentConfig config = ExperimentConfig::FromFile(c_config);
      for (const auto &kv : c_overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value: " + kv);
        config.Set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      CrossvalReport report = RunCrossval(config, LoadExperimentData(config));
      if (!c_out.empty()) WriteText(c_out, report.ToJson());
      if (!c_text.empty()) WriteText(c_text, report.ToText());
      std::cout << report.ToText();
    } else if (*synth) {
      SyntheticCorpus corpus = SynthGenerate(spec);
      WriteSyntheticCorpus(s_out, corpus);
      WriteText((std::filesystem::path(s_out) / "experiment.cfg").string(),
                SyntheticExperimentConfig(spec));
    }
  } catch (const CLI::ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ssd::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
