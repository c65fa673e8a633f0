// serbench/synth.cc

// Copyright 2026  The serbench Authors
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

#include "serbench/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "serbench/transcripts.h"

namespace serbench::synth {

std::vector<Utterance> SkeletonUtterances(int per_class_per_session) {
  std::vector<Utterance> out;
  for (int session = 1; session <= 5; ++session) {
    for (int j = 0; j < per_class_per_session; ++j) {
      for (EmotionLabel label : kAllLabels) {
        Utterance u;
        const bool female = j % 2 == 0;
        u.session = session;
        u.label = label;
        u.speaker_id = "S" + std::to_string(session) + (female ? "F" : "M");
        u.id = "s" + std::to_string(session) + "_" + std::string(LabelName(label)) + "_" +
               std::to_string(j);
        out.push_back(std::move(u));
      }
    }
  }
  return out;
}

FeatureSet GaussianView(const Manifest &manifest, const std::string &name,
                        Modality modality, std::size_t dim, double separation,
                        double noise, std::uint64_t seed) {
  Rng rng(seed);
  Matrix means(kNumClasses, dim);
  for (int k = 0; k < kNumClasses; ++k) {
    double norm = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      means(k, j) = rng.Normal();
      norm += means(k, j) * means(k, j);
    }
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < dim; ++j) means(k, j) *= separation / norm;
  }
  Matrix values(manifest.size(), dim);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const int k = LabelIndex(manifest[i].label);
    for (std::size_t j = 0; j < dim; ++j) values(i, j) = means(k, j) + noise * rng.Normal();
    ids.push_back(manifest[i].id);
  }
  return FeatureSet(name, modality, std::move(ids), std::move(values));
}

namespace {

const std::array<std::vector<std::string>, kNumClasses> &Lexicons() {
  static const std::array<std::vector<std::string>, kNumClasses> kLex = {{
      {"great", "wonderful", "love", "glad", "excited", "amazing", "fun", "laugh"},
      {"miss", "lonely", "cry", "sorry", "lost", "tired", "hurt", "alone"},
      {"hate", "stupid", "furious", "unfair", "shut", "damn", "annoying", "ridiculous"},
      {"okay", "meeting", "tomorrow", "schedule", "paper", "office", "report", "station"},
  }};
  return kLex;
}

const std::vector<std::string> &Fillers() {
  static const std::vector<std::string> kFill = {
      "the", "a", "i", "you", "we", "it", "is", "was", "to", "and", "that", "just",
      "so", "really", "know", "think", "about", "this", "there", "what", "well", "now",
      "then", "here", "going"};
  return kFill;
}

std::string MakeSentence(EmotionLabel label, Rng &rng) {
  const auto &lex = Lexicons();
  const auto &fill = Fillers();
  const std::size_t length = 8 + rng.Below(7);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < length; ++i) words.push_back(fill[rng.Below(fill.size())]);
  const std::size_t keywords = 1 + rng.Below(3);
  const auto &own = lex[LabelIndex(label)];
  for (std::size_t i = 0; i < keywords; ++i)
    words[rng.Below(words.size())] = own[rng.Below(own.size())];
  if (rng.Uniform() < 0.25) {
    int other = static_cast<int>(rng.Below(kNumClasses - 1));
    if (other >= LabelIndex(label)) ++other;
    words[rng.Below(words.size())] = lex[other][rng.Below(lex[other].size())];
  }
  std::string out;
  for (const std::string &w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

Manifest TextEmotionCorpus(int per_class_per_session, std::uint64_t seed) {
  std::vector<Utterance> utts = SkeletonUtterances(per_class_per_session);
  Rng rng(seed);
  for (Utterance &u : utts) u.gold_transcript = MakeSentence(u.label, rng);
  return Manifest(std::move(utts));
}

Waveform SynthesizeUtterance(EmotionLabel label, bool female, std::uint64_t seed,
                             int sample_rate) {
  struct Style {
    double pitch, amplitude, rolloff, vibrato;
    int harmonics;
  };
  static const std::array<Style, kNumClasses> kStyles = {{
      {1.35, 0.60, 0.70, 0.040, 8},   // happy
      {0.85, 0.20, 0.35, 0.005, 4},   // sad
      {1.20, 0.85, 0.90, 0.010, 14},  // angry
      {1.00, 0.40, 0.55, 0.010, 6},   // neutral
  }};
  const Style &st = kStyles[LabelIndex(label)];
  Rng rng(seed);
  const double duration = 0.6 + 0.4 * rng.Uniform();
  const std::size_t n = static_cast<std::size_t>(duration * sample_rate);
  const double f0 = (female ? 210.0 : 120.0) * st.pitch * (1.0 + 0.05 * rng.Normal());
  const double amp = st.amplitude * (0.8 + 0.4 * rng.Uniform());
  const double rolloff = std::clamp(st.rolloff + 0.05 * rng.Normal(), 0.1, 0.95);
  const double two_pi = 2.0 * std::numbers::pi;

  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.samples.resize(n);
  double phase = 0.0;
  const double ramp = 0.05 * sample_rate;
  for (std::size_t t = 0; t < n; ++t) {
    const double time = static_cast<double>(t) / sample_rate;
    const double f = f0 * (1.0 + st.vibrato * std::sin(two_pi * 5.0 * time));
    phase += two_pi * f / sample_rate;
    double s = 0.0, gain = 1.0;
    for (int h = 1; h <= st.harmonics; ++h) {
      if (f0 * h >= sample_rate / 2.0) break;
      s += gain * std::sin(h * phase);
      gain *= rolloff;
    }
    const double env = std::min({1.0, t / ramp, (n - t) / ramp});
    wave.samples[t] = amp * env * s / 2.5 + 0.02 * rng.Normal();
  }
  double peak = 0.0;
  for (double v : wave.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.95)
    for (double &v : wave.samples) v *= 0.95 / peak;
  return wave;
}

void WriteDemoCorpus(const std::string &dir, const DemoOptions &options) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  Manifest base = TextEmotionCorpus(options.per_class_per_session, options.seed);

  CorruptionPlan plan;
  plan.vocabulary = CorpusVocabulary(base);
  plan.target_rate = 0.2;
  plan.seed = options.seed + 1;
  const std::vector<std::string> w2v = CorruptCorpus(base, plan);
  plan.target_rate = 0.4;
  plan.seed = options.seed + 2;
  const std::vector<std::string> qn = CorruptCorpus(base, plan);

  std::vector<Utterance> utts = base.utterances();
  for (std::size_t i = 0; i < utts.size(); ++i) {
    Utterance &u = utts[i];
    u.asr_transcripts["w2v"] = w2v[i];
    u.asr_transcripts["qn"] = qn[i];
    const std::string rel = "audio/" + u.id + ".wav";
    u.audio_path = rel;
    const bool female = u.speaker_id.back() == 'F';
    Waveform wave =
        SynthesizeUtterance(u.label, female, options.seed * 1000003ULL + Fnv1a64(u.id));
    WriteFile((root / rel).string(), EncodeWav16(wave));
  }
  Manifest manifest(std::move(utts));
  WriteFile((root / "manifest.tsv").string(), SerializeManifest(manifest));

  struct View {
    const char *name;
    Modality modality;
    std::size_t dim;
    double separation, noise;
  };
  const View views[] = {
      {"opensmile", Modality::kAudio, 24, 2.0, 1.6},
      {"deepspectrum", Modality::kAudio, 16, 1.8, 1.6},
      {"gs_bert", Modality::kGsText, 24, 2.2, 1.5},
      {"gs_deepmoji", Modality::kGsText, 32, 2.4, 1.5},
      {"gs_electra", Modality::kGsText, 24, 2.0, 1.5},
      {"asr_bert", Modality::kAsrText, 24, 2.2, 1.9},
      {"asr_deepmoji", Modality::kAsrText, 32, 2.4, 1.9},
      {"asr_electra", Modality::kAsrText, 24, 2.0, 1.9},
  };
  std::string cfg =
      "# serbench demo configuration (generated)\n"
      "manifest = manifest.tsv\n"
      "out = out\n"
      "seed = " + std::to_string(options.seed) + "\n"
      "svm.grid = 0.03125, 0.125, 0.5, 2, 8, 32\n"
      "\n"
      "featureset.boaw.recipe = boaw\n"
      "featureset.boaw.N = 64\n"
      "featureset.boaw.assignments = 10\n"
      "featureset.melstats.recipe = melstats\n"
      "featureset.melstats.mel_bands = 32\n"
      "featureset.melstats.clip_db = -60\n"
      "featureset.gs_bow.recipe = text\n"
      "featureset.gs_bow.source = gold\n"
      "featureset.gs_bow.hash_dim = 256\n"
      "featureset.asr_bow.recipe = text\n"
      "featureset.asr_bow.source = asr:w2v\n"
      "featureset.asr_bow.hash_dim = 256\n";
  std::uint64_t view_seed = options.seed * 7919ULL;
  for (const View &v : views) {
    FeatureSet fs = GaussianView(manifest, v.name, v.modality, v.dim, v.separation,
                                 v.noise, ++view_seed);
    const std::string rel = std::string("embeddings/") + v.name + ".tsv";
    WriteFeatureSet((root / rel).string(), fs);
    cfg += std::string("featureset.") + v.name + ".recipe = file\n";
    cfg += std::string("featureset.") + v.name + ".path = " + rel + "\n";
    cfg += std::string("featureset.") + v.name + ".modality = " +
           std::string(ModalityName(v.modality)) + "\n";
  }
  cfg +=
      "\n"
      "wer.sources = gold, asr:w2v, asr:qn, corrupt:0.25\n"
      "sweep.rates = 0, 0.1, 0.2, 0.3, 0.4, 0.5\n"
      "sweep.hash_dim = 256\n"
      "fusion.groups = audio; gs-text; asr-text; audio+gs-text; audio+asr-text; "
      "asr-text+gs-text; all\n"
      "fusion.dump = true\n";
  WriteFile((root / "serbench.cfg").string(), cfg);
}

}  // namespace serbench::synth
