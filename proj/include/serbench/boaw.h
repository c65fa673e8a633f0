// serbench/boaw.h

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

#ifndef SERBENCH_BOAW_H_
#define SERBENCH_BOAW_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "serbench/base.h"
#include "serbench/corpus.h"
#include "serbench/dsp.h"

// Bag-of-audio-words. Codebooks are random samples of training frames (no
// clustering); each frame votes for its `assignments` nearest codewords and
// the per-utterance counts are log-compressed.

namespace serbench {

enum class CodebookSource { kLlds, kDeltas };

struct Codebook {
  Matrix codewords;  // N x d
  CodebookSource source = CodebookSource::kLlds;
  std::uint64_t seed = 0;

  std::size_t size() const { return codewords.rows(); }
  std::size_t dim() const { return codewords.cols(); }
  bool operator==(const Codebook &) const = default;
};

/// Draws size_n rows uniformly without replacement (partial Fisher-Yates over
/// row indices). Throws Error(kInsufficientFrames) if frames has fewer rows.
Codebook LearnCodebook(const Matrix &frames, std::size_t size_n, std::uint64_t seed,
                       CodebookSource source = CodebookSource::kLlds);

/// Raw counts (length N). Each frame adds 1 to its `assignments` nearest
/// codewords by Euclidean distance; equal distances go to the lower index.
std::vector<double> Quantize(const Matrix &frames, const Codebook &codebook,
                             std::size_t assignments = 10);

/// ln(1 + c) elementwise; throws on negative entries.
std::vector<double> LogTf(std::span<const double> histogram);

std::string SerializeCodebook(const Codebook &codebook);
Codebook ParseCodebook(std::string_view text);

struct BoawConfig {
  std::size_t size_n = 2000;
  std::size_t assignments = 10;
  std::uint64_t seed = 0;
  // Per-dimension z-normalization of frames before learning and quantizing,
  // with statistics from the training frames. Off by default.
  bool standardize = false;
};

using LldProvider = std::function<LLDFrameSequence(const Utterance &)>;

struct BoawResult {
  FeatureSet features;  // dim 2N: LLD histogram then delta histogram
  Codebook lld_codebook;
  Codebook delta_codebook;
};

/// Learns the LLD codebook (seed) and the delta codebook (seed + 1) from the
/// training split only, then encodes every utterance. The provider is called
/// exactly once per utterance.
BoawResult BoawFeatures(const Manifest &manifest, const LldProvider &provider,
                        const BoawConfig &config, const std::string &name = "boaw");

}  // namespace serbench

#endif  // SERBENCH_BOAW_H_
