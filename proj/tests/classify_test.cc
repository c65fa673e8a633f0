// tests/classify_test.cc

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

#include <cmath>

#include "doctest.h"
#include "serbench/synth.h"
#include "test_util.h"

namespace serbench {
namespace {

using testing::MakeUtterance;
using testing::ThrownCode;

FeatureSet Column(const Manifest &m, std::vector<std::vector<double>> rows) {
  Matrix v(rows.size(), rows.front().size());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), v.row(i).begin());
    ids.push_back(m[i].id);
  }
  return FeatureSet("f", Modality::kAudio, ids, v);
}

Manifest TwoTrain() {
  return Manifest({MakeUtterance("a", 1, EmotionLabel::kHappy),
                   MakeUtterance("b", 2, EmotionLabel::kSad),
                   MakeUtterance("c", 4, EmotionLabel::kSad)});
}

TEST_CASE("standardizer moments") {
  Manifest m = TwoTrain();
  FeatureSet fs = Column(m, {{0.0, 5.0}, {2.0, 5.0}, {10.0, 7.0}});
  const std::vector<std::string> train = {"a", "b"};
  Standardizer s = FitStandardizer(fs, train);
  CHECK(s.mean[0] == 1.0);
  CHECK(s.stddev[0] == 1.0);
  CHECK(s.stddev[1] == Standardizer::kStddevFloor);
  const std::vector<std::string> all = {"a", "b", "c"};
  Matrix z = StandardizeRows(fs, s, all);
  CHECK(z(0, 0) == -1.0);
  CHECK(z(1, 1) == 0.0);
  CHECK(z(2, 0) == 9.0);
}

TEST_CASE("standardized training columns have zero mean and unit variance") {
  Manifest m(synth::SkeletonUtterances(5));
  FeatureSet fs = synth::GaussianView(m, "g", Modality::kAudio, 7, 3.0, 2.0, 4);
  const std::vector<std::string> train = SplitIds(m, Split::kTrain);
  Matrix z = StandardizeRows(fs, FitStandardizer(fs, train), train);
  for (std::size_t j = 0; j < z.cols(); ++j) {
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) s += z(i, j);
    const double mean = s / z.rows();
    for (std::size_t i = 0; i < z.rows(); ++i) ss += (z(i, j) - mean) * (z(i, j) - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(ss / z.rows()) - 1.0) < 1e-6);
  }
}

TEST_CASE("argmax and tie rule") {
  CHECK(ArgmaxLabel({3, 1, 0, -1}) == EmotionLabel::kHappy);
  CHECK(ArgmaxLabel({0, 2, 2, 1}) == EmotionLabel::kSad);
  CHECK(ArgmaxLabel({0, 0, 0, 0}) == EmotionLabel::kHappy);
  SvmModel zero;
  zero.weights = Matrix(4, 3);
  const double x[] = {1.0, -2.0};
  ClassScores s = zero.Scores(x);
  CHECK(ArgmaxLabel(s) == EmotionLabel::kHappy);
}

TEST_CASE("uar examples") {
  ConfusionMatrix identity;
  for (EmotionLabel l : kAllLabels) identity.Add(l, l);
  CHECK(Uar(identity) == 1.0);

  ConfusionMatrix always_sad;
  for (int k = 0; k < 25; ++k)
    for (EmotionLabel l : kAllLabels) always_sad.Add(l, EmotionLabel::kSad);
  CHECK(Uar(always_sad) == doctest::Approx(0.25));

  ConfusionMatrix padded;
  padded.counts[0] = {8, 2, 0, 0};
  padded.counts[1] = {4, 6, 0, 0};
  padded.counts[2] = {0, 0, 5, 0};
  padded.counts[3] = {0, 0, 0, 5};
  CHECK(Uar(padded) == doctest::Approx(0.85));

  ConfusionMatrix missing;
  missing.Add(EmotionLabel::kHappy, EmotionLabel::kHappy);
  std::string msg;
  CHECK(ThrownCode([&] { Uar(missing); }, &msg) == Errc::kUndefinedClass);
  CHECK(msg.find("sad") != std::string::npos);
}

double Objective(std::span<const double> wb, const Matrix &x, std::span<const int> y, double c) {
  return HingeObjective(wb.subspan(0, 2), wb[2], x, y, c);
}

TEST_CASE("dual coordinate descent reaches the primal optimum") {
  Rng rng(12);
  for (int trial = 0; trial < 4; ++trial) {
    Matrix x(14, 2);
    std::vector<int> y(14);
    for (std::size_t i = 0; i < 14; ++i) {
      y[i] = i % 2 ? 1 : -1;
      x(i, 0) = rng.Normal() + 0.8 * y[i];
      x(i, 1) = rng.Normal() - 0.3 * y[i];
    }
    const double c = trial % 2 ? 0.3 : 2.0;
    SvmTrainOptions opt;
    opt.seed = 5;
    BinarySvm svm = TrainBinarySvm(x, y, c, opt);
    CHECK(svm.converged);
    const double got = HingeObjective(svm.w, svm.bias, x, y, c);

    // Oracle: coarse lattice over (w1, w2, b), then compass search.
    std::array<double, 3> best{0, 0, 0};
    double best_f = Objective(best, x, y, c);
    for (double a = -3; a <= 3; a += 0.1)
      for (double b = -3; b <= 3; b += 0.1)
        for (double d = -3; d <= 3; d += 0.1) {
          const std::array<double, 3> p{a, b, d};
          const double f = Objective(p, x, y, c);
          if (f < best_f) best_f = f, best = p;
        }
    for (double step = 0.05; step > 1e-7;) {
      bool moved = false;
      for (int k = 0; k < 3; ++k)
        for (double dir : {-1.0, 1.0}) {
          std::array<double, 3> p = best;
          p[k] += dir * step;
          const double f = Objective(p, x, y, c);
          if (f < best_f) best_f = f, best = p, moved = true;
        }
      if (!moved) step /= 2;
    }
    CHECK(got <= best_f * (1 + 1e-3) + 1e-9);
    CHECK(got <= c * 14.0);  // objective at zero weights
  }
}

TEST_CASE("binary training is deterministic and validates labels") {
  Matrix x(4, 1);
  for (int i = 0; i < 4; ++i) x(i, 0) = i;
  const std::vector<int> y = {-1, -1, 1, 1};
  SvmTrainOptions opt;
  BinarySvm a = TrainBinarySvm(x, y, 1.0, opt), b = TrainBinarySvm(x, y, 1.0, opt);
  CHECK(a.w == b.w);
  CHECK(a.bias == b.bias);
  const std::vector<int> bad = {-1, 0, 1, 1};
  CHECK(ThrownCode([&] { TrainBinarySvm(x, bad, 1.0, opt); }) == Errc::kInvalidValue);
  CHECK(ThrownCode([&] { TrainBinarySvm(x, y, 0.0, opt); }) == Errc::kInvalidValue);
}

TEST_CASE("one training point per class is fit exactly with a large C") {
  Matrix x(4, 2);
  const double pts[4][2] = {{3, 0}, {0, 3}, {-3, 0}, {0, -3}};
  for (int i = 0; i < 4; ++i) x(i, 0) = pts[i][0], x(i, 1) = pts[i][1];
  const std::vector<EmotionLabel> labels(kAllLabels.begin(), kAllLabels.end());
  SvmModel m = TrainSvm(x, labels, 100.0, SvmTrainOptions());
  for (int i = 0; i < 4; ++i) CHECK(ArgmaxLabel(m.Scores(x.row(i))) == labels[i]);
}

TEST_CASE("a single class is degenerate") {
  Matrix x(2, 1, 1.0);
  const std::vector<EmotionLabel> labels = {EmotionLabel::kSad, EmotionLabel::kSad};
  CHECK(ThrownCode([&] { TrainSvm(x, labels, 1.0, SvmTrainOptions()); }) == Errc::kDegenerate);
}

struct Blobs {
  Manifest manifest;
  FeatureSet features;
};

Blobs MakeBlobs(int per_class_per_session, double separation, std::uint64_t seed) {
  Blobs b;
  b.manifest = Manifest(synth::SkeletonUtterances(per_class_per_session));
  b.features = synth::GaussianView(b.manifest, "blobs", Modality::kAudio, 8, separation, 1.0, seed);
  return b;
}

TEST_CASE("separated blobs are learned") {
  Blobs b = MakeBlobs(34, 12.0, 3);  // ~100 training points per class
  const std::vector<std::string> train = SplitIds(b.manifest, Split::kTrain);
  Standardizer s = FitStandardizer(b.features, train);
  SvmModel m = TrainSvm(b.features, b.manifest, s, 1.0, SvmTrainOptions());
  PredictionTable t = Predict(m, s, b.features, train);
  CHECK(Uar(Confusion(t, b.manifest, train)) >= 0.99);
}

TEST_CASE("C selection") {
  Blobs b = MakeBlobs(10, 2.5, 8);
  SvmTrainOptions opt;
  const std::vector<double> one = {0.5};
  Selection s1 = SelectC(b.features, b.manifest, one, opt);
  CHECK(s1.grid.size() == 1);
  CHECK(s1.chosen().c == 0.5);

  const std::vector<double> dup = {1.0, 0.01, 1.0, 0.01};
  const std::vector<double> dedup = {0.01, 1.0};
  Selection a = SelectC(b.features, b.manifest, dup, opt);
  Selection c = SelectC(b.features, b.manifest, dedup, opt, 2);
  REQUIRE(a.grid.size() == 2);
  CHECK(a.best == c.best);
  for (std::size_t g = 0; g < 2; ++g) {
    CHECK(a.grid[g].c == c.grid[g].c);
    CHECK(a.grid[g].model.weights == c.grid[g].model.weights);
    CHECK(a.grid[g].dev_uar == c.grid[g].dev_uar);
    CHECK(a.chosen().dev_uar >= a.grid[g].dev_uar);
  }
  CHECK(DefaultCGrid() == std::vector<double>{1.0 / 32, 1.0 / 8, 0.5, 2, 8, 32});
}

TEST_CASE("ties in dev UAR go to the smaller C") {
  Blobs b = MakeBlobs(5, 40.0, 2);  // trivially separable: every C is perfect
  const std::vector<double> grid = {4.0, 0.25, 1.0};
  Selection s = SelectC(b.features, b.manifest, grid, SvmTrainOptions());
  CHECK(s.chosen().dev_uar == 1.0);
  CHECK(s.chosen().c == 0.25);
}

TEST_CASE("prediction tables") {
  PredictionTable t;
  t.Add({"x", EmotionLabel::kAngry, {0.1, -0.5, 2.25, 1e-17}});
  t.Add({"y", EmotionLabel::kHappy, {1, 0, 0, 0}});
  CHECK(ParsePredictions(SerializePredictions(t)) == t);
  CHECK(t.Contains("x"));
  CHECK(ThrownCode([&] { t.At("z"); }) == Errc::kCoverage);
  CHECK(ThrownCode([&] { t.Add({"x", EmotionLabel::kSad, {}}); }) == Errc::kDuplicateId);
}

TEST_CASE("serialized model lists the standardizer and one row per class") {
  Blobs b = MakeBlobs(3, 3.0, 1);
  Selection s = SelectC(b.features, b.manifest, DefaultCGrid(), SvmTrainOptions());
  std::string text = SerializeModel(s.chosen().model, s.standardizer);
  CHECK(text.rfind("#svm", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 + 4);
}

}  // namespace
}  // namespace serbench
