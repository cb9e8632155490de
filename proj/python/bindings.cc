// python/bindings.cc

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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ssd/attributes.h"
#include "ssd/backend.h"
#include "ssd/corpus.h"
#include "ssd/error.h"
#include "ssd/gmm.h"
#include "ssd/ivector.h"
#include "ssd/log.h"
#include "ssd/pipeline.h"

namespace py = pybind11;

namespace {

ssd::Matrix Lpr(const ssd::Matrix &posteriors, double eps) {
  ssd::FeatureMatrix fm;
  fm.kind = ssd::FeatureKind::kPosterior;
  fm.frames = posteriors;
  return ssd::LprTransform(fm, eps).frames;
}

py::dict Evaluate(const std::vector<int> &predictions, const std::vector<int> &truths) {
  ssd::Metrics m = ssd::Evaluate(predictions, truths);
  py::dict d;
  d["tp"] = m.tp;
  d["fp"] = m.fp;
  d["tn"] = m.tn;
  d["fn"] = m.fn;
  d["recall_pos"] = m.recall_pos;
  d["recall_neg"] = m.recall_neg;
  d["f1_pos"] = m.f1_pos;
  d["f1_neg"] = m.f1_neg;
  d["uar"] = m.uar;
  d["macro_f1"] = m.macro_f1;
  return d;
}

void Synth(const std::string &out_dir, int n_td, int n_ssd, int words, int dim, double rate,
           std::uint64_t seed) {
  ssd::SyntheticSpec spec;
  spec.n_td = n_td;
  spec.n_ssd = n_ssd;
  spec.words_per_speaker = words;
  spec.dim = dim;
  spec.substitution_rate = rate;
  spec.seed = seed;
  ssd::WriteSyntheticCorpus(out_dir, ssd::SynthGenerate(spec));
  std::ofstream cfg(out_dir + "/experiment.cfg", std::ios::binary);
  cfg << ssd::SyntheticExperimentConfig(spec);
  if (!cfg) throw ssd::IoError("cannot write " + out_dir + "/experiment.cfg");
}

ssd::ExperimentConfig Config(const std::string &path, const std::map<std::string, std::string> &set) {
  ssd::ExperimentConfig config = ssd::ExperimentConfig::FromFile(path);
  for (const auto &[key, value] : set) config.Set(key, value);
  return config;
}

// JSON report text; the package wrapper parses it.
std::string Crossval(const std::string &config_path, const std::map<std::string, std::string> &set) {
  ssd::ExperimentConfig config = Config(config_path, set);
  ssd::ExperimentData data = ssd::LoadExperimentData(config);
  py::gil_scoped_release release;
  return ssd::RunCrossval(config, data).ToJson();
}

ssd::Vector ExtractIvector(const std::string &model_path, const ssd::Matrix &frames,
                           bool length_normalize) {
  ssd::IvectorModel model = ssd::LoadIvectorModel(model_path);
  if (!model.tv) throw ssd::ValidationError(model_path + " has no total-variability matrix");
  ssd::FeatureMatrix fm;
  fm.frames = frames;
  return ssd::ExtractIvector(*model.tv, ssd::AccumulateStats(model.ubm, fm), length_normalize).w;
}

}  // namespace

PYBIND11_MODULE(_ssdscreen, m) {
  m.doc() = "Speech sound disorder screening";
  ssd::SetLogLevel(ssd::LogLevel::kError);

  py::register_exception<ssd::Error>(m, "Error", PyExc_RuntimeError);

  m.def("lpr", py::overload_cast<double, double>(&ssd::LogPosteriorRatio), py::arg("p"),
        py::arg("eps") = ssd::kDefaultLprEpsilon, "log(p / (1 - p)) with p clamped to [eps, 1 - eps]");
  m.def("lpr_frames", &Lpr, py::arg("posteriors"), py::arg("eps") = ssd::kDefaultLprEpsilon,
        "Element-wise log-posterior ratio of a frames x classes matrix");
  m.def("sigmoid", &ssd::Sigmoid, py::arg("x"));
  m.def("evaluate", &Evaluate, py::arg("predictions"), py::arg("truths"),
        "Confusion counts, per-class recall and F1, UAR and macro F1 (positive class = 1)");
  m.def("synth", &Synth, py::arg("out_dir"), py::arg("n_td") = 40, py::arg("n_ssd") = 24,
        py::arg("words") = 30, py::arg("dim") = 24, py::arg("rate") = 0.3, py::arg("seed") = 0,
        "Write a synthetic feature-space corpus and its experiment.cfg to out_dir");
  m.def("config_hash", [](const std::string &path, const std::map<std::string, std::string> &set) {
        return Config(path, set).Hash();
      }, py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("crossval_json", &Crossval, py::arg("config"),
        py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("extract_ivector", &ExtractIvector, py::arg("model"), py::arg("frames"),
        py::arg("length_normalize") = false, "i-vector of one utterance (frames x dim)");
}
