// serbench/fusion.h

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

#ifndef SERBENCH_FUSION_H_
#define SERBENCH_FUSION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "serbench/classify.h"
#include "serbench/corpus.h"

// Majority-vote late fusion over cached per-feature-set predictions, searched
// exhaustively over every combination of at least three sets.

namespace serbench {

struct Combination {
  std::vector<std::string> names;  // sorted, unique
  bool operator==(const Combination &) const = default;
  std::string ToString() const;  // names joined by '+'
};

/// All subsets of size >= min_size of the (sorted) pool, ordered by size and
/// then lexicographically. Throws Error(kDuplicateId) on repeated names.
std::vector<Combination> EnumerateCombinations(std::span<const std::string> pool,
                                               std::size_t min_size = 3);

/// sum_{k >= min_size} C(n, k).
std::uint64_t CombinationCount(std::size_t n, std::size_t min_size = 3);

struct VoteOutcome {
  PredictionTable table;  // scores hold the vote counts
  std::size_t tie_count = 0;
};

/// Most votes wins. A tie on votes goes to the tied label with the highest
/// decision score summed over all voters; a remaining exact tie goes to the
/// lowest class index.
VoteOutcome MajorityVote(std::span<const PredictionTable *const> voters,
                         std::span<const std::string> ids);

struct SplitTables {
  PredictionTable dev;
  PredictionTable test;
};

struct CachedSet {
  Modality modality = Modality::kAudio;
  SplitTables tables;
};

/// Which feature sets a Table-4 row draws from. The pool is the union of the
/// allowed modalities; combinations need not span every group.
struct GroupFilter {
  std::string label;
  std::set<Modality> modalities;

  /// "audio+gs-text" style, or "all"; the label defaults to the display name.
  static GroupFilter Parse(std::string_view spec);
  static std::string DisplayName(const std::set<Modality> &modalities);
};

/// The seven rows of the fusion table, single groups first.
std::vector<GroupFilter> DefaultGroupFilters();

struct FusionResult {
  Combination combination;
  double dev_uar = 0.0;
  std::optional<double> test_uar;  // absent when the test split is empty
  std::size_t tie_count = 0;       // dev utterances settled by the tie rule
};

struct FusionSummary {
  std::string label;
  std::size_t count = 0;
  double mean_dev = 0.0;
  double std_dev = 0.0;  // sample (n - 1); 0 for a single combination
  double max_dev = 0.0;
  std::optional<double> test_of_best;
  Combination best;
};

struct FusionSearchResult {
  std::vector<FusionResult> results;  // enumeration order
  FusionSummary summary;
};

/// Evaluates every combination drawn from the filtered pool. The dev-argmax
/// keeps the first maximum in enumeration order, i.e. fewer sets and then
/// lexicographic. Throws Error(kInvalidValue) if the filtered pool is empty.
FusionSearchResult FusionSearch(const std::map<std::string, CachedSet> &cache,
                                const GroupFilter &filter, const Manifest &manifest,
                                int jobs = 1);

/// Percentage with one decimal, rounding half away from zero: 0.7355 -> "73.6".
std::string FormatPercent(double fraction);

/// Group, #, Mean Dev (mean ± std), Max Dev, Test.
std::string FormatFusionTable(std::span<const FusionSummary> summaries);
/// One `key=value` record per summary, full precision.
std::string FormatFusionRecords(std::span<const FusionSummary> summaries);
/// Per-combination audit dump.
std::string FormatFusionResults(std::span<const FusionResult> results);

}  // namespace serbench

#endif  // SERBENCH_FUSION_H_
