// serbench/classify.cc

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

#include "serbench/classify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace serbench {

void Standardizer::Apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != mean.size())
    throw Error(Errc::kDimensionMismatch,
                "standardizer dim " + std::to_string(mean.size()) + " vs row dim " +
                    std::to_string(in.size()));
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean[j]) / stddev[j];
}

Standardizer FitStandardizer(const FeatureSet &features,
                             std::span<const std::string> train_ids) {
  if (train_ids.empty())
    throw Error(Errc::kDegenerate, "cannot fit a standardizer on an empty training set");
  const std::size_t d = features.dim();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  for (const std::string &id : train_ids) {
    auto row = features.Row(id);
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  }
  const double n = static_cast<double>(train_ids.size());
  for (double &m : s.mean) m /= n;
  for (const std::string &id : train_ids) {
    auto row = features.Row(id);
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - s.mean[j];
      s.stddev[j] += c * c;
    }
  }
  for (double &v : s.stddev) v = std::max(std::sqrt(v / n), Standardizer::kStddevFloor);
  return s;
}

Matrix StandardizeRows(const FeatureSet &features, const Standardizer &standardizer,
                       std::span<const std::string> ids) {
  Matrix out(ids.size(), features.dim());
  for (std::size_t i = 0; i < ids.size(); ++i)
    standardizer.Apply(features.Row(ids[i]), out.row(i));
  return out;
}

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

}  // namespace

// Solves the dual of the L1-loss SVM
//   min_a 0.5 a'Qa - e'a,  0 <= a_i <= C,  Q_ij = y_i y_j [x_i; 1]'[x_j; 1]
// one coordinate at a time, maintaining w = sum_i a_i y_i [x_i; 1].
BinarySvm TrainBinarySvm(const Matrix &x, std::span<const int> labels, double c,
                         const SvmTrainOptions &options) {
  if (x.rows() != labels.size())
    throw Error(Errc::kDimensionMismatch, "label count does not match example count");
  if (!(c > 0.0)) throw Error(Errc::kInvalidValue, "SVM C must be positive");
  for (int y : labels)
    if (y != 1 && y != -1) throw Error(Errc::kInvalidValue, "binary labels must be +1 or -1");
  const std::size_t l = x.rows(), d = x.cols();
  BinarySvm out;
  out.w.assign(d, 0.0);
  if (l == 0) return out;

  std::vector<double> alpha(l, 0.0), qd(l);
  std::vector<std::size_t> index(l);
  for (std::size_t i = 0; i < l; ++i) {
    qd[i] = Dot(x.row(i), x.row(i)) + 1.0;
    index[i] = i;
  }
  Rng rng(options.seed);
  const double inf = std::numeric_limits<double>::infinity();
  double pg_max_old = inf, pg_min_old = -inf;
  std::size_t active = l;

  int epoch = 0;
  while (epoch < options.max_epochs) {
    double pg_max_new = -inf, pg_min_new = inf;
    for (std::size_t i = 0; i < active; ++i) {
      std::size_t j = i + rng.Below(active - i);
      std::swap(index[i], index[j]);
    }
    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = index[s];
      const double yi = labels[i];
      auto xi = x.row(i);
      const double g = yi * (Dot(out.w, xi) + out.bias) - 1.0;

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == c) {
        if (g < pg_min_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max_new = std::max(pg_max_new, pg);
      pg_min_new = std::min(pg_min_new, pg);

      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(old - g / qd[i], 0.0), c);
        const double delta = (alpha[i] - old) * yi;
        for (std::size_t j = 0; j < d; ++j) out.w[j] += delta * xi[j];
        out.bias += delta;
      }
    }
    ++epoch;

    if (pg_max_new - pg_min_new <= options.tolerance) {
      if (active == l) {
        out.converged = true;
        break;
      }
      // Converged on the shrunk problem; recheck on the full set.
      active = l;
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }
    pg_max_old = pg_max_new <= 0.0 ? inf : pg_max_new;
    pg_min_old = pg_min_new >= 0.0 ? -inf : pg_min_new;
  }
  out.epochs = epoch;
  return out;
}

double HingeObjective(std::span<const double> w, double bias, const Matrix &x,
                      std::span<const int> labels, double c) {
  double reg = bias * bias;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    loss += std::max(0.0, 1.0 - labels[i] * (Dot(w, x.row(i)) + bias));
  return 0.5 * reg + c * loss;
}

ClassScores SvmModel::Scores(std::span<const double> standardized) const {
  if (standardized.size() != dim())
    throw Error(Errc::kDimensionMismatch, "model dim " + std::to_string(dim()) +
                                              " vs row dim " +
                                              std::to_string(standardized.size()));
  ClassScores s{};
  for (int k = 0; k < kNumClasses; ++k) {
    auto w = weights.row(k);
    s[k] = Dot(w.first(dim()), standardized) + w[dim()];
  }
  return s;
}

SvmModel TrainSvm(const Matrix &x, std::span<const EmotionLabel> labels, double c,
                  const SvmTrainOptions &options, const std::string &name) {
  std::array<std::size_t, kNumClasses> support{};
  for (EmotionLabel l : labels) ++support[LabelIndex(l)];
  int present = 0;
  for (std::size_t s : support) present += s > 0;
  if (present < 2)
    throw Error(Errc::kDegenerate,
                "SVM training needs examples of at least two classes" +
                    (name.empty() ? std::string() : " (feature set '" + name + "')"));

  SvmModel model;
  model.c = c;
  model.feature_set_name = name;
  model.weights = Matrix(kNumClasses, x.cols() + 1);
  std::vector<int> y(labels.size());
  for (int k = 0; k < kNumClasses; ++k) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      y[i] = LabelIndex(labels[i]) == k ? 1 : -1;
    SvmTrainOptions machine = options;
    machine.seed = options.seed + static_cast<std::uint64_t>(k);
    BinarySvm b = TrainBinarySvm(x, y, c, machine);
    auto row = model.weights.row(k);
    std::copy(b.w.begin(), b.w.end(), row.begin());
    row[x.cols()] = b.bias;
  }
  return model;
}

SvmModel TrainSvm(const FeatureSet &features, const Manifest &manifest,
                  const Standardizer &standardizer, double c,
                  const SvmTrainOptions &options) {
  std::vector<std::string> train = SplitIds(manifest, Split::kTrain);
  Matrix x = StandardizeRows(features, standardizer, train);
  std::vector<EmotionLabel> labels;
  for (const std::string &id : train) labels.push_back(manifest[manifest.IndexOf(id)].label);
  return TrainSvm(x, labels, c, options, features.name());
}

EmotionLabel ArgmaxLabel(const ClassScores &scores) {
  int best = 0;
  for (int k = 1; k < kNumClasses; ++k)
    if (scores[k] > scores[best]) best = k;
  return static_cast<EmotionLabel>(best);
}

void PredictionTable::Add(Prediction p) {
  if (!index_.emplace(p.id, rows_.size()).second)
    throw Error(Errc::kDuplicateId, "prediction table already has '" + p.id + "'");
  rows_.push_back(std::move(p));
}

bool PredictionTable::Contains(std::string_view id) const {
  return index_.count(std::string(id)) > 0;
}

const Prediction &PredictionTable::At(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end())
    throw Error(Errc::kCoverage, "no prediction for '" + std::string(id) + "'");
  return rows_[it->second];
}

PredictionTable Predict(const SvmModel &model, const Standardizer &standardizer,
                        const FeatureSet &features, std::span<const std::string> ids) {
  PredictionTable table;
  std::vector<double> buf(features.dim());
  for (const std::string &id : ids) {
    standardizer.Apply(features.Row(id), buf);
    Prediction p;
    p.id = id;
    p.scores = model.Scores(buf);
    p.label = ArgmaxLabel(p.scores);
    table.Add(std::move(p));
  }
  return table;
}

std::string SerializePredictions(const PredictionTable &table) {
  std::string out;
  for (const Prediction &p : table.rows()) {
    out += p.id + '\t' + std::string(LabelName(p.label)) + '\t';
    for (int k = 0; k < kNumClasses; ++k) {
      if (k) out += ' ';
      out += FormatReal(p.scores[k]);
    }
    out += '\n';
  }
  return out;
}

PredictionTable ParsePredictions(std::string_view text) {
  PredictionTable table;
  std::size_t ln = 0;
  for (const std::string &raw : SplitFields(text, '\n')) {
    ++ln;
    if (Trim(raw).empty()) continue;
    std::vector<std::string> fields = SplitFields(Trim(raw), '\t');
    if (fields.size() != 3)
      throw Error(Errc::kParse, "prediction line " + std::to_string(ln) +
                                    ": expected 3 tab-separated fields");
    std::vector<std::string> scores = SplitFields(fields[2], ' ');
    if (scores.size() != kNumClasses)
      throw Error(Errc::kParse,
                  "prediction line " + std::to_string(ln) + ": expected 4 scores");
    Prediction p;
    p.id = fields[0];
    p.label = ParseEmotionLabel(fields[1]);
    for (int k = 0; k < kNumClasses; ++k) p.scores[k] = ParseReal(scores[k]);
    table.Add(std::move(p));
  }
  return table;
}

std::string SerializeModel(const SvmModel &model, const Standardizer &standardizer) {
  std::string out = "#svm name=" + model.feature_set_name + " C=" + FormatReal(model.c) +
                    " dim=" + std::to_string(model.dim()) + "\n";
  auto line = [&out](std::string_view key, std::span<const double> values) {
    out += key;
    for (double v : values) {
      out += '\t';
      out += FormatReal(v);
    }
    out += '\n';
  };
  line("mean", standardizer.mean);
  line("stddev", standardizer.stddev);
  for (EmotionLabel l : kAllLabels) line(LabelName(l), model.weights.row(LabelIndex(l)));
  return out;
}

std::size_t ConfusionMatrix::Support(EmotionLabel label) const {
  const auto &row = counts[LabelIndex(label)];
  return std::accumulate(row.begin(), row.end(), std::size_t{0});
}

ConfusionMatrix Confusion(const PredictionTable &table, const Manifest &manifest,
                          std::span<const std::string> ids) {
  ConfusionMatrix cm;
  for (const std::string &id : ids)
    cm.Add(manifest[manifest.IndexOf(id)].label, table.At(id).label);
  return cm;
}

double Uar(const ConfusionMatrix &confusion) {
  double sum = 0.0;
  for (EmotionLabel l : kAllLabels) {
    const std::size_t support = confusion.Support(l);
    if (support == 0)
      throw Error(Errc::kUndefinedClass,
                  "UAR undefined: class '" + std::string(LabelName(l)) + "' has no examples");
    sum += static_cast<double>(confusion.counts[LabelIndex(l)][LabelIndex(l)]) /
           static_cast<double>(support);
  }
  return sum / kNumClasses;
}

std::vector<double> DefaultCGrid() {
  std::vector<double> grid;
  for (int e = -5; e <= 5; e += 2) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

Selection SelectC(const FeatureSet &features, const Manifest &manifest,
                  std::span<const double> grid, const SvmTrainOptions &options, int jobs) {
  if (grid.empty()) throw Error(Errc::kInvalidValue, "C grid is empty");
  std::vector<double> cs(grid.begin(), grid.end());
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());

  const std::vector<std::string> train = SplitIds(manifest, Split::kTrain);
  const std::vector<std::string> dev = SplitIds(manifest, Split::kDev);
  Selection sel;
  sel.standardizer = FitStandardizer(features, train);
  const Matrix x = StandardizeRows(features, sel.standardizer, train);
  std::vector<EmotionLabel> labels;
  for (const std::string &id : train) labels.push_back(manifest[manifest.IndexOf(id)].label);

  sel.grid.resize(cs.size());
  ParallelFor(cs.size(), jobs, [&](std::size_t g) {
    GridPoint &pt = sel.grid[g];
    pt.c = cs[g];
    pt.model = TrainSvm(x, labels, cs[g], options, features.name());
    PredictionTable table = Predict(pt.model, sel.standardizer, features, dev);
    pt.dev_uar = Uar(Confusion(table, manifest, dev));
  });
  for (std::size_t g = 1; g < sel.grid.size(); ++g)
    if (sel.grid[g].dev_uar > sel.grid[sel.best].dev_uar) sel.best = g;
  return sel;
}

}  // namespace serbench
