// src/synth.cc

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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "ssd/corpus.h"
#include "ssd/error.h"

namespace ssd {

void SyntheticSpec::Validate() const {
  auto positive = [](int v, const char *name) {
    if (v < 1) throw ValidationError(std::string("synthetic spec: ") + name + " must be >= 1");
  };
  positive(n_td, "n_td");
  positive(n_ssd, "n_ssd");
  positive(words_per_speaker, "words_per_speaker");
  positive(min_syllables, "min_syllables");
  positive(dim, "dim");
  positive(consonant_frames_min, "consonant_frames_min");
  positive(vowel_frames_min, "vowel_frames_min");
  if (max_syllables < min_syllables || consonant_frames_max < consonant_frames_min ||
      vowel_frames_max < vowel_frames_min)
    throw ValidationError("synthetic spec: a maximum is below its minimum");
  auto probability = [](double p, const std::string &name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("synthetic spec: " + name + " must lie in [0, 1]");
  };
  probability(substitution_rate, "substitution_rate");
  for (const auto &[attr, p] : attribute_rates) probability(p, "rate of " + attr);
  if (!(noise >= 0 && speaker_warp >= 0 && speaker_offset >= 0 && frame_shift > 0))
    throw ValidationError("synthetic spec: scales must be non-negative");
}

namespace {

Vector GaussianVector(int dim, double scale, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = scale * normal(rng);
  return v;
}

int UniformInt(int lo, int hi, std::mt19937_64 &rng) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::string Numbered(const char *prefix, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, i);
  return buf;
}

}  // namespace

SyntheticCorpus SynthGenerate(const SyntheticSpec &spec, const AttributeMap &map) {
  spec.Validate();
  const PhoneInventory &inv = map.Inventory();
  const int n_phones = inv.Size();
  std::mt19937_64 rng(spec.seed);

  std::vector<int> vowels, consonants;
  for (int p = 0; p < n_phones; ++p)
    if (map.IsVowel(p)) vowels.push_back(p);
  if (vowels.empty()) throw ValidationError("synthetic corpus: the map has no vowels");
  if (spec.consonants.empty()) {
    for (int p = 0; p < n_phones; ++p)
      if (!map.IsVowel(p) && !map.ConfusablePartners(p).empty()) consonants.push_back(p);
  } else {
    for (const auto &label : spec.consonants) {
      int p = inv.IndexOf(label);
      if (p < 0) throw ValidationError("synthetic corpus: unknown consonant " + label);
      if (map.IsVowel(p)) throw ValidationError("synthetic corpus: " + label + " is a vowel");
      consonants.push_back(p);
    }
  }
  if (consonants.empty()) throw ValidationError("synthetic corpus: no usable consonants");

  SyntheticCorpus corpus;
  // Population-level error pattern: the partners each process reaches.
  std::vector<std::pair<int, int>> processes;
  for (const auto &rule : spec.error_processes) {
    auto gt = rule.find('>');
    if (gt == std::string::npos)
      throw ValidationError("synthetic corpus: error process '" + rule + "' is not From>To");
    processes.push_back({map.AttributeIndex(rule.substr(0, gt)), map.AttributeIndex(rule.substr(gt + 1))});
  }
  auto has = [&](int phone, int attribute) {
    const auto &a = map.AttributesOf(phone);
    return std::binary_search(a.begin(), a.end(), attribute);
  };
  std::vector<std::vector<int>> partners(n_phones);
  std::vector<double> rate(n_phones, 0.0);
  for (int c : consonants) {
    auto options = map.ConfusablePartners(c);
    if (options.empty())
      throw ValidationError("synthetic corpus: phone " + inv.Label(c) +
                            " has no confusable partner under the attribute map");
    for (int q : options)
      for (auto [from, to] : processes)
        if (has(c, from) && has(q, to) && !has(q, from)) {
          partners[c].push_back(q);
          break;
        }
    if (partners[c].empty())
      partners[c].push_back(options[UniformInt(0, static_cast<int>(options.size()) - 1, rng)]);
    for (int q : partners[c]) corpus.partners[inv.Label(c)].push_back(inv.Label(q));
    double r = -1.0;
    for (int a : map.AttributesOf(c)) {
      auto it = spec.attribute_rates.find(map.AttributeNames()[a]);
      if (it != spec.attribute_rates.end()) r = std::max(r, it->second);
    }
    rate[c] = r >= 0.0 ? r : spec.substitution_rate;
  }

  // Phone emission means: sum of attribute prototypes plus a phone offset.
  const double unit = 1.0 / std::sqrt(static_cast<double>(spec.dim));
  std::vector<Vector> proto;
  for (int a = 0; a < map.NumAttributes(); ++a)
    proto.push_back(GaussianVector(spec.dim, spec.attribute_scale * unit, rng));
  std::vector<Vector> mean(n_phones), attribute_part(n_phones);
  for (int p = 0; p < n_phones; ++p) {
    mean[p] = GaussianVector(spec.dim, spec.phone_scale * unit, rng);
    attribute_part[p] = Vector::Zero(spec.dim);
    for (int a : map.AttributesOf(p)) attribute_part[p] += proto[a];
    mean[p] += attribute_part[p];
  }

  // Lexicon shared by every speaker.
  std::vector<std::string> words;
  for (int w = 0; w < spec.words_per_speaker; ++w) {
    std::string id = Numbered("w", w + 1, 3);
    std::vector<std::string> phones;
    int n_syll = UniformInt(spec.min_syllables, spec.max_syllables, rng);
    for (int s = 0; s < n_syll; ++s) {
      phones.push_back(inv.Label(consonants[UniformInt(0, static_cast<int>(consonants.size()) - 1, rng)]));
      phones.push_back(inv.Label(vowels[UniformInt(0, static_cast<int>(vowels.size()) - 1, rng)]));
    }
    corpus.lexicon[id] = phones;
    words.push_back(id);
  }

  const int n_speakers = spec.n_td + spec.n_ssd;
  for (int s = 0; s < n_speakers; ++s) {
    const bool ssd = s >= spec.n_td;
    std::string speaker = ssd ? Numbered("ssd", s - spec.n_td + 1, 2) : Numbered("td", s + 1, 2);
    std::seed_seq seq{spec.seed, static_cast<std::uint64_t>(s) + 1};
    std::mt19937_64 srng(seq);
    Matrix warp = Matrix::Identity(spec.dim, spec.dim);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < spec.dim; ++i)
      for (int j = 0; j < spec.dim; ++j) warp(i, j) += spec.speaker_warp * unit * normal(srng);
    Vector offset = GaussianVector(spec.dim, spec.speaker_offset, srng);
    std::vector<Vector> idiosyncrasy(n_phones);
    for (auto &v : idiosyncrasy) v = GaussianVector(spec.dim, spec.speaker_phone_scale * unit, srng);

    for (const auto &word : words) {
      const auto &canonical = corpus.lexicon[word];
      std::vector<std::string> realized_frames;
      std::vector<Vector> frames;
      bool substituted = false;
      for (const auto &label : canonical) {
        int p = inv.IndexOf(label);
        bool vowel = map.IsVowel(p);
        Vector target = mean[p] + idiosyncrasy[p];
        if (ssd && !vowel && !partners[p].empty() &&
            std::uniform_real_distribution<double>(0.0, 1.0)(srng) < rate[p]) {
          int q = partners[p][UniformInt(0, static_cast<int>(partners[p].size()) - 1, srng)];
          target = spec.shift_attributes ? Vector(target - attribute_part[p] + attribute_part[q])
                                         : Vector(mean[q] + idiosyncrasy[q]);
          p = q;
          substituted = true;
        }
        int n = vowel ? UniformInt(spec.vowel_frames_min, spec.vowel_frames_max, srng)
                      : UniformInt(spec.consonant_frames_min, spec.consonant_frames_max, srng);
        Vector mu = warp * target + offset;
        for (int t = 0; t < n; ++t) {
          frames.push_back(mu + GaussianVector(spec.dim, spec.noise, srng));
          realized_frames.push_back(inv.Label(p));
        }
      }
      ManifestEntry e;
      e.speaker_id = speaker;
      e.diagnosis = ssd ? Diagnosis::kSsd : Diagnosis::kTd;
      e.word_id = word;
      e.path = e.Key();
      e.error_annotation = substituted;
      FeatureMatrix fm;
      fm.frames.resize(static_cast<Eigen::Index>(frames.size()), spec.dim);
      for (std::size_t t = 0; t < frames.size(); ++t)
        fm.frames.row(static_cast<Eigen::Index>(t)) = frames[t].transpose();
      // Archives store 32-bit floats; round here so that in-memory and
      // reloaded corpora are identical.
      fm.frames = fm.frames.cast<float>().cast<double>();
      fm.frame_shift = spec.frame_shift;
      fm.kind = FeatureKind::kFilterbank;
      fm.utterance_id = e.Key();
      corpus.alignment[e.Key()] = std::move(realized_frames);
      corpus.features.emplace(e.Key(), std::move(fm));
      corpus.manifest.push_back(std::move(e));
    }
  }
  return corpus;
}

void WriteSyntheticCorpus(const std::string &dir, const SyntheticCorpus &corpus) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  std::filesystem::path root(dir);
  WriteManifest((root / "manifest.tsv").string(), corpus.manifest);
  WriteFeatureArchive((root / "features.ssdf").string(), corpus.features);
  WriteAlignment((root / "alignment.txt").string(), corpus.alignment);
  WriteLexicon((root / "lexicon.txt").string(), corpus.lexicon);
  std::map<std::string, int> labels;
  for (const auto &[speaker, dx] : SpeakerDiagnoses(corpus.manifest)) labels[speaker] = ToLabel(dx);
  WriteLabels((root / "labels.tsv").string(), labels);
}

}  // namespace ssd
