// serbench/fusion.cc

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

#include "serbench/fusion.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace serbench {

std::string Combination::ToString() const {
  std::string out;
  for (const std::string &n : names) {
    if (!out.empty()) out += '+';
    out += n;
  }
  return out;
}

std::vector<Combination> EnumerateCombinations(std::span<const std::string> pool,
                                               std::size_t min_size) {
  std::vector<std::string> names(pool.begin(), pool.end());
  std::sort(names.begin(), names.end());
  for (std::size_t i = 1; i < names.size(); ++i)
    if (names[i] == names[i - 1])
      throw Error(Errc::kDuplicateId, "feature set '" + names[i] + "' listed twice");
  const std::size_t n = names.size();
  std::vector<Combination> out;
  for (std::size_t k = std::max<std::size_t>(min_size, 1); k <= n; ++k) {
    // Lexicographic k-subsets of indices.
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      Combination c;
      for (std::size_t i : idx) c.names.push_back(names[i]);
      out.push_back(std::move(c));
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return out;
}

std::uint64_t CombinationCount(std::size_t n, std::size_t min_size) {
  std::uint64_t total = 0, binom = 1;  // binom = C(n, k)
  for (std::size_t k = 0; k <= n; ++k) {
    if (k >= std::max<std::size_t>(min_size, 1)) total += binom;
    binom = binom * (n - k) / (k + 1);
  }
  return total;
}

namespace {

// Dense view of one prediction table restricted to an id list.
struct VoteColumn {
  std::vector<int> labels;
  std::vector<ClassScores> scores;
};

VoteColumn Column(const PredictionTable &table, std::span<const std::string> ids) {
  VoteColumn col;
  col.labels.reserve(ids.size());
  col.scores.reserve(ids.size());
  for (const std::string &id : ids) {
    const Prediction &p = table.At(id);
    col.labels.push_back(LabelIndex(p.label));
    col.scores.push_back(p.scores);
  }
  return col;
}

struct Vote {
  int label;
  bool tied;
  std::array<int, kNumClasses> counts;
};

Vote CastVote(std::span<const VoteColumn *const> voters, std::size_t row) {
  Vote v{0, false, {}};
  for (const VoteColumn *c : voters) ++v.counts[c->labels[row]];
  const int top = *std::max_element(v.counts.begin(), v.counts.end());
  int tied = 0;
  for (int k = 0; k < kNumClasses; ++k) tied += v.counts[k] == top;
  if (tied == 1) {
    v.label = static_cast<int>(std::max_element(v.counts.begin(), v.counts.end()) -
                               v.counts.begin());
    return v;
  }
  v.tied = true;
  int best = -1;
  double best_sum = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    if (v.counts[k] != top) continue;
    double sum = 0.0;
    for (const VoteColumn *c : voters) sum += c->scores[row][k];
    if (best < 0 || sum > best_sum) {
      best = k;
      best_sum = sum;
    }
  }
  v.label = best;
  return v;
}

}  // namespace

VoteOutcome MajorityVote(std::span<const PredictionTable *const> voters,
                         std::span<const std::string> ids) {
  if (voters.empty()) throw Error(Errc::kInvalidValue, "majority vote needs >= 1 voter");
  std::vector<VoteColumn> columns;
  for (const PredictionTable *t : voters) columns.push_back(Column(*t, ids));
  std::vector<const VoteColumn *> ptrs;
  for (const VoteColumn &c : columns) ptrs.push_back(&c);

  VoteOutcome out;
  for (std::size_t r = 0; r < ids.size(); ++r) {
    Vote v = CastVote(ptrs, r);
    out.tie_count += v.tied;
    Prediction p;
    p.id = ids[r];
    p.label = static_cast<EmotionLabel>(v.label);
    for (int k = 0; k < kNumClasses; ++k) p.scores[k] = v.counts[k];
    out.table.Add(std::move(p));
  }
  return out;
}

GroupFilter GroupFilter::Parse(std::string_view spec) {
  GroupFilter f;
  const std::string s(Trim(spec));
  if (s == "all") {
    f.modalities = {Modality::kAudio, Modality::kGsText, Modality::kAsrText};
  } else {
    for (const std::string &part : SplitFields(s, '+'))
      f.modalities.insert(ParseModality(Trim(part)));
  }
  if (f.modalities.empty()) throw Error(Errc::kInvalidValue, "empty group filter");
  f.label = DisplayName(f.modalities);
  return f;
}

std::string GroupFilter::DisplayName(const std::set<Modality> &modalities) {
  if (modalities.size() == 3) return "All Systems";
  std::string out;
  auto add = [&out](const char *name) {
    if (!out.empty()) out += " + ";
    out += name;
  };
  if (modalities.count(Modality::kAudio)) add("Audio");
  if (modalities.count(Modality::kAsrText)) add("ASR-Text");
  if (modalities.count(Modality::kGsText)) add("GS-Text");
  return out;
}

std::vector<GroupFilter> DefaultGroupFilters() {
  std::vector<GroupFilter> out;
  for (const char *spec : {"audio", "gs-text", "asr-text", "audio+gs-text",
                           "audio+asr-text", "asr-text+gs-text", "all"})
    out.push_back(GroupFilter::Parse(spec));
  return out;
}

namespace {

double UarFromLabels(std::span<const int> predicted, std::span<const int> truth) {
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i)
    cm.Add(static_cast<EmotionLabel>(truth[i]), static_cast<EmotionLabel>(predicted[i]));
  return Uar(cm);
}

}  // namespace

FusionSearchResult FusionSearch(const std::map<std::string, CachedSet> &cache,
                                const GroupFilter &filter, const Manifest &manifest,
                                int jobs) {
  std::vector<std::string> pool;
  for (const auto &[name, set] : cache)
    if (filter.modalities.count(set.modality)) pool.push_back(name);
  if (pool.empty())
    throw Error(Errc::kInvalidValue,
                "no cached feature sets match fusion group '" + filter.label + "'");

  const std::vector<std::string> dev = SplitIds(manifest, Split::kDev);
  const std::vector<std::string> test = SplitIds(manifest, Split::kTest);
  std::vector<int> dev_truth, test_truth;
  for (const std::string &id : dev) dev_truth.push_back(LabelIndex(manifest[manifest.IndexOf(id)].label));
  for (const std::string &id : test) test_truth.push_back(LabelIndex(manifest[manifest.IndexOf(id)].label));

  std::map<std::string, std::pair<VoteColumn, VoteColumn>> columns;
  for (const std::string &name : pool) {
    const CachedSet &set = cache.at(name);
    columns[name] = {Column(set.tables.dev, dev), Column(set.tables.test, test)};
  }

  FusionSearchResult out;
  const std::vector<Combination> combos = EnumerateCombinations(pool);
  out.results.resize(combos.size());
  ParallelFor(combos.size(), jobs, [&](std::size_t c) {
    FusionResult &r = out.results[c];
    r.combination = combos[c];
    std::vector<const VoteColumn *> dev_voters, test_voters;
    for (const std::string &n : combos[c].names) {
      dev_voters.push_back(&columns.at(n).first);
      test_voters.push_back(&columns.at(n).second);
    }
    std::vector<int> pred(dev.size());
    for (std::size_t i = 0; i < dev.size(); ++i) {
      Vote v = CastVote(dev_voters, i);
      pred[i] = v.label;
      r.tie_count += v.tied;
    }
    r.dev_uar = UarFromLabels(pred, dev_truth);
    if (!test.empty()) {
      pred.assign(test.size(), 0);
      for (std::size_t i = 0; i < test.size(); ++i) pred[i] = CastVote(test_voters, i).label;
      r.test_uar = UarFromLabels(pred, test_truth);
    }
  });

  FusionSummary &s = out.summary;
  s.label = filter.label;
  s.count = out.results.size();
  if (s.count == 0) return out;
  std::size_t best = 0;
  double sum = 0.0;
  for (std::size_t c = 0; c < out.results.size(); ++c) {
    sum += out.results[c].dev_uar;
    if (out.results[c].dev_uar > out.results[best].dev_uar) best = c;
  }
  s.mean_dev = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (const FusionResult &r : out.results) ss += (r.dev_uar - s.mean_dev) * (r.dev_uar - s.mean_dev);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  s.max_dev = out.results[best].dev_uar;
  s.test_of_best = out.results[best].test_uar;
  s.best = out.results[best].combination;
  return out;
}

std::string FormatPercent(double fraction) {
  // The nudge keeps decimal ties such as 0.7355 from rounding down because
  // of binary representation error.
  const double scaled = std::abs(fraction) * 1000.0;
  const long long tenths = std::llround(scaled + scaled * 1e-12);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%lld", fraction < 0 && tenths != 0 ? "-" : "",
                tenths / 10, tenths % 10);
  return buf;
}

std::string FormatFusionTable(std::span<const FusionSummary> summaries) {
  std::string out = "Group\t#\tMean Dev\tMax Dev\tTest\n";
  for (const FusionSummary &s : summaries) {
    out += s.label + '\t' + std::to_string(s.count) + '\t';
    if (s.count == 0) {
      out += "-\t-\t-\n";
      continue;
    }
    out += FormatPercent(s.mean_dev) + " ± " + FormatPercent(s.std_dev) + '\t' +
           FormatPercent(s.max_dev) + '\t' +
           (s.test_of_best ? FormatPercent(*s.test_of_best) : std::string("-")) + '\n';
  }
  return out;
}

std::string FormatFusionRecords(std::span<const FusionSummary> summaries) {
  std::string out;
  for (const FusionSummary &s : summaries) {
    out += "group=" + s.label + "\tcount=" + std::to_string(s.count) +
           "\tmean_dev=" + FormatReal(s.mean_dev) + "\tstd_dev=" + FormatReal(s.std_dev) +
           "\tmax_dev=" + FormatReal(s.max_dev) + "\ttest=" +
           (s.test_of_best ? FormatReal(*s.test_of_best) : std::string("undefined")) +
           "\tbest=" + s.best.ToString() + '\n';
  }
  return out;
}

std::string FormatFusionResults(std::span<const FusionResult> results) {
  std::string out = "combination\tsize\tdev_uar\ttest_uar\tdev_ties\n";
  for (const FusionResult &r : results) {
    out += r.combination.ToString() + '\t' + std::to_string(r.combination.names.size()) +
           '\t' + FormatReal(r.dev_uar) + '\t' +
           (r.test_uar ? FormatReal(*r.test_uar) : std::string("undefined")) + '\t' +
           std::to_string(r.tie_count) + '\n';
  }
  return out;
}

}  // namespace serbench
