// serbench/synth.h

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

#ifndef SERBENCH_SYNTH_H_
#define SERBENCH_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "serbench/corpus.h"
#include "serbench/dsp.h"

// Seeded synthetic corpora. Used by the test suites and by `serbench synth`
// to produce a self-contained demo project.

namespace serbench::synth {

/// Sessions 1..5, two speakers per session ("S<session>F", "S<session>M"),
/// per_class utterances of every class per session, alternating speakers.
/// Transcripts are empty.
std::vector<Utterance> SkeletonUtterances(int per_class_per_session);

/// Class-conditional Gaussian features: class means are random directions
/// scaled to `separation`, noise is N(0, noise^2) per dimension.
FeatureSet GaussianView(const Manifest &manifest, const std::string &name,
                        Modality modality, std::size_t dim, double separation,
                        double noise, std::uint64_t seed);

/// Gold transcripts built from per-class keyword lexicons mixed with filler
/// words; roughly one utterance in four also carries a keyword of another
/// class.
Manifest TextEmotionCorpus(int per_class_per_session, std::uint64_t seed);

/// Harmonic tone whose pitch, loudness, brightness and vibrato depend on the
/// class, with speaker-dependent pitch and additive noise.
Waveform SynthesizeUtterance(EmotionLabel label, bool female, std::uint64_t seed,
                             int sample_rate = 16000);

struct DemoOptions {
  int per_class_per_session = 6;
  std::uint64_t seed = 1;
};

/// Writes manifest.tsv (gold plus two corrupted "ASR" systems), audio/*.wav,
/// embeddings/*.tsv (eight ingested-style views) and serbench.cfg declaring
/// twelve feature sets.
void WriteDemoCorpus(const std::string &dir, const DemoOptions &options);

}  // namespace serbench::synth

#endif  // SERBENCH_SYNTH_H_
