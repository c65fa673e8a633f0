// serbench/transcripts.h

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

#ifndef SERBENCH_TRANSCRIPTS_H_
#define SERBENCH_TRANSCRIPTS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "serbench/base.h"
#include "serbench/corpus.h"

namespace serbench {

/// Lowercases ASCII, treats every character other than letters, digits,
/// non-ASCII bytes and word-internal apostrophes as a separator.
/// "Hello, WORLD!" -> {hello, world}; "don't stop" -> {don't, stop}.
std::vector<std::string> NormalizeTranscript(std::string_view text);

/// Normalized tokens joined by single spaces.
std::string NormalizedText(std::string_view text);

/// UTF-8 decode; invalid bytes map to U+FFFD.
std::u32string Utf8CodePoints(std::string_view text);

enum class ErrorUnit { kWord, kCharacter };

struct AlignmentResult {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t ref_len = 0;
  ErrorUnit unit = ErrorUnit::kWord;

  std::size_t distance() const { return substitutions + insertions + deletions; }
  /// Undefined (nullopt) for an empty reference unless the hypothesis is
  /// empty too, which scores 0.
  std::optional<double> error_rate() const;
};

namespace internal {

template <typename T>
AlignmentResult AlignSequences(std::span<const T> ref, std::span<const T> hyp,
                               ErrorUnit unit) {
  const std::size_t m = ref.size(), n = hyp.size();
  const std::size_t w = n + 1;
  std::vector<std::size_t> cost((m + 1) * w);
  for (std::size_t j = 0; j <= n; ++j) cost[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    cost[i * w] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      std::size_t diag = cost[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      std::size_t del = cost[(i - 1) * w + j] + 1;
      std::size_t ins = cost[i * w + j - 1] + 1;
      cost[i * w + j] = std::min(diag, std::min(del, ins));
    }
  }
  AlignmentResult r;
  r.ref_len = m;
  r.unit = unit;
  // Backtrace preference: substitution/match, then deletion, then insertion.
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    const std::size_t here = cost[i * w + j];
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (here == cost[(i - 1) * w + j - 1] + (same ? 0 : 1)) {
        if (!same) ++r.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && here == cost[(i - 1) * w + j] + 1) {
      ++r.deletions;
      --i;
    } else {
      ++r.insertions;
      --j;
    }
  }
  return r;
}

}  // namespace internal

AlignmentResult AlignTokens(std::span<const std::string> ref,
                            std::span<const std::string> hyp);
/// Character alignment of the space-joined token sequences (spaces count).
AlignmentResult AlignCharacters(std::span<const std::string> ref_tokens,
                                std::span<const std::string> hyp_tokens);

struct CorpusErrorRates {
  std::size_t word_errors = 0, words = 0;
  std::size_t char_errors = 0, chars = 0;
  double wer = 0.0;  // pooled: total errors / total reference length
  double cer = 0.0;
};

/// Both sides are normalized. refs and hyps are parallel.
CorpusErrorRates PooledErrorRates(std::span<const std::string> refs,
                                  std::span<const std::string> hyps);
/// Gold transcripts against the given source over every manifest utterance.
CorpusErrorRates CorpusErrorRatesFor(const Manifest &manifest,
                                     const TranscriptSource &hypothesis_source);
/// Gold transcripts against explicit hypotheses in manifest order.
CorpusErrorRates CorpusErrorRatesFor(const Manifest &manifest,
                                     std::span<const std::string> hypotheses);

struct CorruptionPlan {
  double target_rate = 0.0;
  double p_sub = 0.6;
  double p_del = 0.2;
  double p_ins = 0.2;
  std::uint64_t seed = 0;
  std::vector<std::string> vocabulary;

  /// Throws Error(kInvalidValue).
  void Validate() const;
};

/// Each reference token is substituted (probability rate*p_sub) with a
/// uniformly drawn different vocabulary token, or deleted (rate*p_del); after
/// each reference position a random token is inserted with probability
/// rate*p_ins. Uses plan.seed.
std::vector<std::string> Corrupt(std::span<const std::string> tokens,
                                 const CorruptionPlan &plan);
std::vector<std::string> Corrupt(std::span<const std::string> tokens,
                                 const CorruptionPlan &plan, Rng &rng);

/// plan_seed XOR FNV-1a(id).
std::uint64_t UtteranceSeed(std::uint64_t plan_seed, std::string_view utterance_id);

/// Sorted unique normalized gold tokens.
std::vector<std::string> CorpusVocabulary(const Manifest &manifest);

/// Corrupts every normalized gold transcript with its per-utterance seed and
/// returns the space-joined hypotheses in manifest order.
std::vector<std::string> CorruptCorpus(const Manifest &manifest, const CorruptionPlan &plan);

struct ErrorRateRow {
  std::string setup;
  CorpusErrorRates rates;
};

/// "SetUp\tWER%\tCER%" followed by one row per setup, two decimals.
std::string FormatErrorRateTable(std::span<const ErrorRateRow> rows);

}  // namespace serbench

#endif  // SERBENCH_TRANSCRIPTS_H_
