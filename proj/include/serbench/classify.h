// serbench/classify.h

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

#ifndef SERBENCH_CLASSIFY_H_
#define SERBENCH_CLASSIFY_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "serbench/base.h"
#include "serbench/corpus.h"

namespace serbench {

using ClassScores = std::array<double, kNumClasses>;

/// Per-dimension z-scoring with population statistics of the training rows.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored at kStddevFloor

  static constexpr double kStddevFloor = 1e-8;

  void Apply(std::span<const double> in, std::span<double> out) const;
  bool operator==(const Standardizer &) const = default;
};

Standardizer FitStandardizer(const FeatureSet &features,
                             std::span<const std::string> train_ids);
/// Standardized rows for `ids`, in that order.
Matrix StandardizeRows(const FeatureSet &features, const Standardizer &standardizer,
                       std::span<const std::string> ids);

struct SvmTrainOptions {
  double tolerance = 1e-4;  // on max - min projected gradient
  int max_epochs = 1000;
  std::uint64_t seed = 0;
};

/// One binary L1-loss (hinge) linear SVM. The bias is handled as an extra
/// constant-1 feature, so it is regularized together with w.
struct BinarySvm {
  std::vector<double> w;
  double bias = 0.0;
  int epochs = 0;
  bool converged = false;
};

/// Dual coordinate descent with shrinking. labels are +1 / -1.
BinarySvm TrainBinarySvm(const Matrix &x, std::span<const int> labels, double c,
                         const SvmTrainOptions &options);

/// 0.5 * (|w|^2 + b^2) + C * sum max(0, 1 - y (w.x + b)).
double HingeObjective(std::span<const double> w, double bias, const Matrix &x,
                      std::span<const int> labels, double c);

/// Four one-vs-rest machines, one row per EmotionLabel: dim weights then bias.
struct SvmModel {
  Matrix weights;
  double c = 1.0;
  std::string feature_set_name;

  std::size_t dim() const { return weights.cols() - 1; }
  ClassScores Scores(std::span<const double> standardized) const;
};

/// Rows of x are standardized training examples. Throws Error(kDegenerate)
/// unless at least two classes are present.
SvmModel TrainSvm(const Matrix &x, std::span<const EmotionLabel> labels, double c,
                  const SvmTrainOptions &options, const std::string &name = "");

/// Fits on the manifest's training split using an already fitted standardizer.
SvmModel TrainSvm(const FeatureSet &features, const Manifest &manifest,
                  const Standardizer &standardizer, double c,
                  const SvmTrainOptions &options);

/// Highest score wins; exact ties go to the lowest class index.
EmotionLabel ArgmaxLabel(const ClassScores &scores);

struct Prediction {
  std::string id;
  EmotionLabel label = EmotionLabel::kHappy;
  ClassScores scores{};
};

class PredictionTable {
 public:
  void Add(Prediction p);
  std::size_t size() const { return rows_.size(); }
  const std::vector<Prediction> &rows() const { return rows_; }
  bool Contains(std::string_view id) const;
  /// Throws Error(kCoverage) for ids the table does not cover.
  const Prediction &At(std::string_view id) const;
  bool operator==(const PredictionTable &other) const { return rows_ == other.rows_; }

 private:
  std::vector<Prediction> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline bool operator==(const Prediction &a, const Prediction &b) {
  return a.id == b.id && a.label == b.label && a.scores == b.scores;
}

PredictionTable Predict(const SvmModel &model, const Standardizer &standardizer,
                        const FeatureSet &features, std::span<const std::string> ids);

/// `id<TAB>label<TAB>s0 s1 s2 s3` per line.
std::string SerializePredictions(const PredictionTable &table);
PredictionTable ParsePredictions(std::string_view text);

std::string SerializeModel(const SvmModel &model, const Standardizer &standardizer);

/// Rows are true labels, columns predictions.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

  void Add(EmotionLabel truth, EmotionLabel predicted) {
    ++counts[LabelIndex(truth)][LabelIndex(predicted)];
  }
  std::size_t Support(EmotionLabel label) const;
};

ConfusionMatrix Confusion(const PredictionTable &table, const Manifest &manifest,
                          std::span<const std::string> ids);

/// Mean per-class recall. Throws Error(kUndefinedClass) naming a class with
/// no support.
double Uar(const ConfusionMatrix &confusion);

/// 2^-5, 2^-3, ..., 2^5.
std::vector<double> DefaultCGrid();

struct GridPoint {
  double c = 1.0;
  double dev_uar = 0.0;
  SvmModel model;
};

struct Selection {
  Standardizer standardizer;
  std::vector<GridPoint> grid;  // ascending C, duplicates removed
  std::size_t best = 0;         // dev-argmax; ties go to the smaller C

  const GridPoint &chosen() const { return grid[best]; }
};

/// Trains on train, scores dev, for every C. Grid points may run in parallel;
/// the result does not depend on `jobs`.
Selection SelectC(const FeatureSet &features, const Manifest &manifest,
                  std::span<const double> grid, const SvmTrainOptions &options,
                  int jobs = 1);

}  // namespace serbench

#endif  // SERBENCH_CLASSIFY_H_
