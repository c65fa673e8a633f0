// serbench/corpus.h

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

#ifndef SERBENCH_CORPUS_H_
#define SERBENCH_CORPUS_H_

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "serbench/base.h"

namespace serbench {

// The four-class setup. The order is fixed and doubles as the tie-break
// order everywhere a lowest-index rule applies.
enum class EmotionLabel : int { kHappy = 0, kSad = 1, kAngry = 2, kNeutral = 3 };
inline constexpr int kNumClasses = 4;
inline constexpr std::array<EmotionLabel, kNumClasses> kAllLabels = {
    EmotionLabel::kHappy, EmotionLabel::kSad, EmotionLabel::kAngry,
    EmotionLabel::kNeutral};

/// Accepts happy/sad/angry/neutral, their noun forms, the IEMOCAP short codes,
/// and "excited"/"exc", which is folded into happy. Case-insensitive.
EmotionLabel ParseEmotionLabel(std::string_view text);
std::string_view LabelName(EmotionLabel label);
inline int LabelIndex(EmotionLabel label) { return static_cast<int>(label); }

enum class Split { kTrain = 0, kDev = 1, kTest = 2 };
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view text);

/// Session-based partition. The three sets must be pairwise disjoint and
/// non-empty; violations throw at construction.
class SplitRule {
 public:
  /// Sessions 1-3 train, 4 dev, 5 test.
  SplitRule();
  SplitRule(std::set<int> train, std::set<int> dev, std::set<int> test);

  /// Throws Error(kInvalidValue) for a session covered by no set.
  Split Assign(int session) const;

  const std::set<int> &sessions(Split split) const;

 private:
  std::array<std::set<int>, 3> sessions_;
};

struct Utterance {
  std::string id;
  std::string speaker_id;
  int session = 1;
  EmotionLabel label = EmotionLabel::kNeutral;
  std::string gold_transcript;
  // Missing entries are allowed; requesting them later is an error.
  std::map<std::string, std::string> asr_transcripts;
  std::optional<std::string> audio_path;
};

/// Where a transcript comes from: the human reference or a named ASR system.
struct TranscriptSource {
  bool gold = true;
  std::string system;

  static TranscriptSource Gold() { return {}; }
  static TranscriptSource Asr(std::string system) { return {false, std::move(system)}; }
  /// "gold" or "asr:<system>".
  static TranscriptSource Parse(std::string_view text);
  std::string ToString() const;
};

class Manifest {
 public:
  Manifest() = default;
  /// Validates ids, sessions and split coverage.
  Manifest(std::vector<Utterance> utterances, SplitRule rule = SplitRule());

  std::size_t size() const { return utterances_.size(); }
  const std::vector<Utterance> &utterances() const { return utterances_; }
  const Utterance &operator[](std::size_t i) const { return utterances_[i]; }
  const SplitRule &split_rule() const { return rule_; }

  Split split_of(std::size_t index) const { return splits_[index]; }
  std::optional<std::size_t> Find(std::string_view id) const;
  /// Throws Error(kMissingUtterance) for unknown ids.
  std::size_t IndexOf(std::string_view id) const;

  /// Throws Error(kMissingTranscript) naming the utterance if absent.
  const std::string &Transcript(std::size_t index,
                                const TranscriptSource &source) const;

 private:
  std::vector<Utterance> utterances_;
  SplitRule rule_;
  std::vector<Split> splits_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Tab-separated manifest with a header row. Relative audio paths are resolved
/// against the manifest's directory.
Manifest LoadManifest(const std::string &path, const SplitRule &rule = SplitRule());
Manifest ParseManifest(std::string_view text, const std::string &base_dir = "",
                       const SplitRule &rule = SplitRule());
std::string SerializeManifest(const Manifest &manifest);

/// Ids of one split, in manifest order.
std::vector<std::string> SplitIds(const Manifest &manifest, Split split);
std::vector<std::size_t> SplitIndices(const Manifest &manifest, Split split);

enum class Modality { kAudio = 0, kGsText = 1, kAsrText = 2 };
std::string_view ModalityName(Modality modality);
Modality ParseModality(std::string_view text);

/// Named per-utterance feature matrix. Rows follow manifest order.
class FeatureSet {
 public:
  FeatureSet() = default;
  /// Throws on dimension mismatch, non-finite values or duplicate ids.
  FeatureSet(std::string name, Modality modality, std::vector<std::string> ids,
             Matrix values);

  const std::string &name() const { return name_; }
  Modality modality() const { return modality_; }
  void set_modality(Modality m) { modality_ = m; }
  std::size_t dim() const { return values_.cols(); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string> &ids() const { return ids_; }
  const Matrix &values() const { return values_; }

  bool Contains(std::string_view id) const;
  std::span<const double> Row(std::string_view id) const;
  std::span<const double> Row(std::size_t i) const { return values_.row(i); }

  bool operator==(const FeatureSet &other) const;

 private:
  std::string name_;
  Modality modality_ = Modality::kAudio;
  std::vector<std::string> ids_;
  Matrix values_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads a feature file restricted to the manifest's utterances. Rows for ids
/// not in the manifest are ignored; a manifest id without a row is an error.
FeatureSet LoadFeatureSet(const std::string &path, const Manifest &manifest);
FeatureSet ParseFeatureSet(std::string_view text, const Manifest &manifest);
std::string SerializeFeatureSet(const FeatureSet &features);
void WriteFeatureSet(const std::string &path, const FeatureSet &features);

}  // namespace serbench

#endif  // SERBENCH_CORPUS_H_
