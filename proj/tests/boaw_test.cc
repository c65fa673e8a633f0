// tests/boaw_test.cc

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


#include "serbench/boaw.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "test_util.h"

namespace serbench {
namespace {

using testing::MakeUtterance;
using testing::ThrownCode;

Matrix RandomFrames(std::size_t rows, std::size_t cols, Rng &rng, int levels = 0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      // Coarse levels produce plenty of exact distance ties.
      m(i, j) = levels > 0 ? static_cast<double>(rng.Below(levels)) : rng.Normal();
  return m;
}

// Sorts every codeword by (distance, index) and takes the first k.
std::vector<double> QuantizeOracle(const Matrix &frames, const Matrix &codewords,
                                   std::size_t k) {
  std::vector<double> hist(codewords.rows(), 0.0);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t c = 0; c < codewords.rows(); ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < frames.cols(); ++j)
        s += (frames(t, j) - codewords(c, j)) * (frames(t, j) - codewords(c, j));
      d.emplace_back(s, c);
    }
    std::sort(d.begin(), d.end());
    for (std::size_t i = 0; i < k; ++i) hist[d[i].second] += 1.0;
  }
  return hist;
}

bool HasRow(const Matrix &m, std::span<const double> row) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (std::equal(row.begin(), row.end(), m.row(i).begin())) return true;
  return false;
}

TEST_CASE("codebook of all frames is a permutation of them") {
  Rng rng(1);
  Matrix f = RandomFrames(5, 3, rng);
  Codebook cb = LearnCodebook(f, 5, 99);
  CHECK(cb.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(HasRow(cb.codewords, f.row(i)));
  CHECK(ThrownCode([&] { LearnCodebook(RandomFrames(4, 3, rng), 5, 1); }) ==
        Errc::kInsufficientFrames);
}

TEST_CASE("codebooks are deterministic samples of the frames") {
  Rng rng(2);
  Matrix f = RandomFrames(10000, 4, rng);
  Codebook a = LearnCodebook(f, 2000, 7), b = LearnCodebook(f, 2000, 7);
  CHECK(a == b);
  CHECK_FALSE(a == LearnCodebook(f, 2000, 8));
  for (std::size_t i = 0; i < 50; ++i) CHECK(HasRow(f, a.codewords.row(i * 40)));
  // Sampling without replacement: no frame index is drawn twice. Rows of a
  // Gaussian matrix are distinct, so compare rows.
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < a.size(); ++i)
    rows.emplace_back(a.codewords.row(i).begin(), a.codewords.row(i).end());
  std::sort(rows.begin(), rows.end());
  CHECK(std::adjacent_find(rows.begin(), rows.end()) == rows.end());
}

TEST_CASE("quantize examples") {
  Rng rng(3);
  Codebook cb;
  cb.codewords = RandomFrames(10, 2, rng);
  CHECK(Quantize(Matrix(0, 2), cb, 10) == std::vector<double>(10, 0.0));
  std::vector<double> h = Quantize(RandomFrames(7, 2, rng), cb, 10);
  for (double v : h) CHECK(v == 7.0);
  CHECK(ThrownCode([&] { Quantize(RandomFrames(2, 2, rng), cb, 11); }) == Errc::kInvalidValue);
  CHECK(ThrownCode([&] { Quantize(RandomFrames(2, 3, rng), cb, 3); }) ==
        Errc::kDimensionMismatch);
}

TEST_CASE("quantize matches the distance-sort oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + rng.Below(7), d = 1 + rng.Below(5);
    Codebook cb;
    cb.codewords = RandomFrames(n, d, rng, trial % 2 ? 3 : 0);
    Matrix frames = RandomFrames(30, d, rng, trial % 2 ? 3 : 0);
    std::vector<double> h = Quantize(frames, cb, 10);
    CHECK(h == QuantizeOracle(frames, cb.codewords, 10));
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == 300.0);
  }
}

TEST_CASE("log tf") {
  const double in[] = {0.0, std::numbers::e - 1.0, 3.0, 1.0};
  std::vector<double> out = LogTf(in);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(1.0));
  const double neg[] = {-1.0};
  CHECK(ThrownCode([&] { LogTf(neg); }) == Errc::kInvalidValue);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(20);
    for (double &x : v) x = static_cast<double>(rng.Below(1000));
    std::vector<double> w = LogTf(v);
    std::vector<std::size_t> a(20), b(20);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    std::stable_sort(a.begin(), a.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::stable_sort(b.begin(), b.end(), [&](auto i, auto j) { return w[i] < w[j]; });
    CHECK(a == b);
    // Inverting the weighting recovers the counts.
    for (std::size_t i = 0; i < 20; ++i) CHECK(std::round(std::expm1(w[i])) == v[i]);
  }
}

TEST_CASE("codebook serialization round-trips") {
  Rng rng(6);
  Codebook cb = LearnCodebook(RandomFrames(20, 3, rng), 6, 12, CodebookSource::kDeltas);
  CHECK(ParseCodebook(SerializeCodebook(cb)) == cb);
  CHECK(ThrownCode([] { ParseCodebook("nonsense\n"); }) == Errc::kParse);
}

struct ToyCorpus {
  Manifest manifest;
  std::vector<LLDFrameSequence> llds;
};

ToyCorpus MakeToy(std::uint64_t seed, std::size_t frames_per_utt = 12) {
  ToyCorpus toy;
  std::vector<Utterance> u;
  Rng rng(seed);
  for (int s = 1; s <= 5; ++s)
    for (EmotionLabel l : kAllLabels) {
      u.push_back(MakeUtterance("s" + std::to_string(s) + std::string(LabelName(l)), s, l));
      LLDFrameSequence seq;
      seq.frames = RandomFrames(frames_per_utt, 3, rng);
      seq.deltas = Delta(seq.frames);
      toy.llds.push_back(seq);
    }
  toy.manifest = Manifest(u);
  return toy;
}

TEST_CASE("boaw features match a composition of the primitives") {
  ToyCorpus toy = MakeToy(8);
  int calls = 0;
  LldProvider provider = [&](const Utterance &u) {
    ++calls;
    return toy.llds[toy.manifest.IndexOf(u.id)];
  };
  BoawConfig cfg;
  cfg.size_n = 8;
  cfg.assignments = 3;
  cfg.seed = 21;
  BoawResult r = BoawFeatures(toy.manifest, provider, cfg);
  CHECK(calls == static_cast<int>(toy.manifest.size()));
  CHECK(r.features.dim() == 16);

  Matrix lld_pool, delta_pool;
  for (std::size_t i : SplitIndices(toy.manifest, Split::kTrain))
    for (std::size_t t = 0; t < toy.llds[i].frames.rows(); ++t) {
      lld_pool.AppendRow(toy.llds[i].frames.row(t));
      delta_pool.AppendRow(toy.llds[i].deltas.row(t));
    }
  Codebook a = LearnCodebook(lld_pool, 8, 21), b = LearnCodebook(delta_pool, 8, 22);
  CHECK(r.lld_codebook.codewords == a.codewords);
  CHECK(r.delta_codebook.codewords == b.codewords);
  for (std::size_t i = 0; i < toy.manifest.size(); ++i) {
    std::vector<double> h1 = QuantizeOracle(toy.llds[i].frames, a.codewords, 3);
    std::vector<double> h2 = QuantizeOracle(toy.llds[i].deltas, b.codewords, 3);
    auto row = r.features.Row(i);
    for (std::size_t k = 0; k < 8; ++k) {
      CHECK(row[k] == std::log1p(h1[k]));
      CHECK(row[8 + k] == std::log1p(h2[k]));
    }
    // Conservation: undoing the weighting gives assignments x frames per half.
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
      s1 += std::round(std::expm1(row[k]));
      s2 += std::round(std::expm1(row[8 + k]));
    }
    CHECK(s1 == 3.0 * 12);
    CHECK(s2 == 3.0 * 12);
  }
}

TEST_CASE("dev and test frames never reach the codebooks") {
  ToyCorpus toy = MakeToy(9);
  ToyCorpus poisoned = toy;
  for (std::size_t i = 0; i < toy.manifest.size(); ++i)
    if (toy.manifest.split_of(i) != Split::kTrain) {
      poisoned.llds[i].frames = Matrix(12, 3, 1e6);
      poisoned.llds[i].deltas = Matrix(12, 3, -1e6);
    }
  BoawConfig cfg;
  cfg.size_n = 16;
  cfg.seed = 4;
  auto provider = [](const ToyCorpus &t) {
    return [&t](const Utterance &u) { return t.llds[t.manifest.IndexOf(u.id)]; };
  };
  BoawResult a = BoawFeatures(toy.manifest, provider(toy), cfg);
  BoawResult b = BoawFeatures(poisoned.manifest, provider(poisoned), cfg);
  CHECK(a.lld_codebook == b.lld_codebook);
  CHECK(a.delta_codebook == b.delta_codebook);
}

TEST_CASE("size 2000 gives a 4000-dimensional feature set") {
  ToyCorpus toy = MakeToy(10, 200);  // 12 training utterances x 200 frames
  BoawConfig cfg;
  BoawResult r = BoawFeatures(
      toy.manifest, [&](const Utterance &u) { return toy.llds[toy.manifest.IndexOf(u.id)]; },
      cfg);
  CHECK(r.features.dim() == 4000);
  CHECK(r.features.modality() == Modality::kAudio);
}

TEST_CASE("standardization rescales with training statistics only") {
  ToyCorpus toy = MakeToy(11);
  auto provider = [&](const Utterance &u) { return toy.llds[toy.manifest.IndexOf(u.id)]; };
  BoawConfig cfg;
  cfg.size_n = 8;
  cfg.assignments = 3;
  BoawResult raw = BoawFeatures(toy.manifest, provider, cfg);
  cfg.standardize = true;
  BoawResult z = BoawFeatures(toy.manifest, provider, cfg);

  // Same seed and pool size, so the same frames are drawn; they must come
  // back z-scored with the population moments of the training frames.
  std::vector<double> mean(3, 0.0), var(3, 0.0);
  std::size_t n = 0;
  for (std::size_t i : SplitIndices(toy.manifest, Split::kTrain))
    for (std::size_t t = 0; t < 12; ++t, ++n)
      for (std::size_t j = 0; j < 3; ++j) mean[j] += toy.llds[i].frames(t, j);
  for (double &m : mean) m /= static_cast<double>(n);
  for (std::size_t i : SplitIndices(toy.manifest, Split::kTrain))
    for (std::size_t t = 0; t < 12; ++t)
      for (std::size_t j = 0; j < 3; ++j)
        var[j] += (toy.llds[i].frames(t, j) - mean[j]) * (toy.llds[i].frames(t, j) - mean[j]);
  for (std::size_t k = 0; k < 8; ++k)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(z.lld_codebook.codewords(k, j) ==
            doctest::Approx((raw.lld_codebook.codewords(k, j) - mean[j]) /
                            std::sqrt(var[j] / static_cast<double>(n))));
}

}  // namespace
}  // namespace serbench
