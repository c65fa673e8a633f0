// serbench/pipeline.h

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

#ifndef SERBENCH_PIPELINE_H_
#define SERBENCH_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "serbench/boaw.h"
#include "serbench/classify.h"
#include "serbench/corpus.h"
#include "serbench/dsp.h"
#include "serbench/fusion.h"
#include "serbench/textfeat.h"
#include "serbench/transcripts.h"

namespace serbench {

enum class Recipe { kFile, kBoaw, kMelStats, kText };

struct FeatureSetDecl {
  std::string name;
  Recipe recipe = Recipe::kFile;
  std::string path;                  // kFile
  std::optional<Modality> modality;  // kFile: checked against the file header
  BoawConfig boaw;                   // kBoaw (seed derived from the run seed)
  SpectrogramConfig spectrogram;     // kBoaw, kMelStats
  TranscriptSource source;           // kText
  TextFeatConfig text;               // kText
};

struct RunConfig {
  std::string config_path;
  std::string manifest_path;
  SplitRule split_rule;
  std::vector<FeatureSetDecl> feature_sets;  // sorted by name
  std::vector<double> svm_grid = DefaultCGrid();
  SvmTrainOptions svm;
  std::vector<GroupFilter> fusion_groups = DefaultGroupFilters();
  bool fusion_dump = false;
  std::vector<std::string> wer_sources;
  std::vector<double> sweep_rates;
  TextFeatConfig sweep_text;
  CorruptionPlan corruption;  // mix only; rate, seed and vocabulary are per use
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  // Canonical key=value lines the config hash is computed from.
  std::map<std::string, std::string> entries;
};

/// Flat `key = value` lines, '#' comments. Relative paths resolve against the
/// config file's directory. Unknown keys are rejected with Error(kConfig).
RunConfig ParseRunConfig(std::string_view text, const std::string &config_path);
RunConfig LoadRunConfig(const std::string &path);

/// Hash of everything that influences feature extraction and classifier
/// training (fusion, WER and sweep settings excluded). Keys the prediction
/// cache.
std::string ConfigHash(const RunConfig &config);

/// Mean and standard deviation of each band over time, 2 * mel_bands values.
std::vector<double> MelStats(const MelSpectrogram &spectrogram);

/// Spearman rank correlation with average ranks for ties; nullopt with fewer
/// than two points or a constant input.
std::optional<double> Spearman(std::span<const double> a, std::span<const double> b);

struct SweepRow {
  double rate = 0.0;
  CorpusErrorRates measured;
  double dev_uar = 0.0;
  std::optional<double> test_uar;
  double c = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::optional<double> spearman;  // (measured WER, dev UAR)
};

/// For each rate: corrupt every gold transcript, refit text features on the
/// hypotheses, select C on dev and record the scores.
SweepReport RunCorruptionSweep(const Manifest &manifest, std::span<const double> rates,
                               const CorruptionPlan &mix, const TextFeatConfig &text,
                               std::span<const double> grid, const SvmTrainOptions &svm,
                               std::uint64_t seed, int jobs = 1);
std::string FormatSweepReport(const SweepReport &report);

/// Each command writes its report under <out>/reports and returns its text.
/// Messages meant for the user go to `log`.
class Pipeline {
 public:
  Pipeline(RunConfig config, std::ostream &log);

  const RunConfig &config() const { return config_; }
  const Manifest &manifest() const { return manifest_; }

  /// Writes <out>/features/<name>.tsv for every internal recipe.
  std::vector<std::string> Extract();
  std::string Evaluate();
  std::string Wer();
  std::string CorruptSweep();
  std::string Fuse();
  /// Concatenates the reports that exist into reports/summary.txt.
  std::string Report();

  std::string FeaturePath(const FeatureSetDecl &decl) const;
  std::string CacheDir() const;
  std::string ReportPath(const std::string &file) const;

 private:
  void WriteReport(const std::string &file, const std::string &text);
  void AppendRunLog(const std::string &command, const std::vector<std::string> &artifacts);
  FeatureSet LoadDeclared(const FeatureSetDecl &decl) const;

  RunConfig config_;
  Manifest manifest_;
  std::ostream &log_;
};

}  // namespace serbench

#endif  // SERBENCH_PIPELINE_H_
