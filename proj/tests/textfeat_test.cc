// tests/textfeat_test.cc

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


#include "serbench/textfeat.h"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "test_util.h"

namespace serbench {
namespace {

using testing::MakeUtterance;
using testing::ThrownCode;

// Independent FNV-1a 64.
std::uint64_t Fnv(const std::string &s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Manifest Toy(const std::vector<std::string> &texts) {
  std::vector<Utterance> u;
  const int sessions[] = {1, 2, 3, 4, 5, 1, 2, 3};
  for (std::size_t i = 0; i < texts.size(); ++i)
    u.push_back(MakeUtterance("u" + std::to_string(i), sessions[i],
                              kAllLabels[i % kNumClasses], texts[i]));
  return Manifest(u);
}

// Count every whitespace-separated term first, then hash the counts.
Matrix Oracle(const Manifest &m, std::size_t dim, bool bigrams) {
  std::vector<std::map<std::string, int>> counts(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::istringstream in(m[i].gold_transcript);
    std::vector<std::string> w;
    for (std::string t; in >> t;) w.push_back(t);
    for (const std::string &t : w) ++counts[i][t];
    if (bigrams)
      for (std::size_t k = 0; k + 1 < w.size(); ++k) ++counts[i][w[k] + " " + w[k + 1]];
  }
  std::vector<std::set<std::size_t>> buckets(m.size());
  Matrix x(m.size(), dim);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto &[term, c] : counts[i]) {
      const std::uint64_t h = Fnv(term);
      x(i, h % dim) += (h >> 63 ? -1.0 : 1.0) * c;
      buckets[i].insert(h % dim);
    }
  double n = 0.0;
  std::vector<double> df(dim, 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.split_of(i) != Split::kTrain) continue;
    n += 1.0;
    for (std::size_t b : buckets[i]) df[b] += 1.0;
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    double norm = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      x(i, b) *= std::log((1.0 + n) / (1.0 + df[b])) + 1.0;
      norm += x(i, b) * x(i, b);
    }
    if (norm > 0)
      for (std::size_t b = 0; b < dim; ++b) x(i, b) /= std::sqrt(norm);
  }
  return x;
}

TEST_CASE("toy corpus matches a count-then-hash oracle") {
  Manifest m = Toy({"the cat sat on the mat", "a dog", "the dog sat", "cat cat cat",
                    "on a mat the end"});
  for (int ngram : {1, 2}) {
    TextFeatConfig cfg;
    cfg.hash_dim = 16;
    cfg.ngram_max = ngram;
    TextFeatures tf = FitTextFeatures(m, TranscriptSource::Gold(), "bow", cfg);
    Matrix want = Oracle(m, 16, ngram == 2);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t b = 0; b < 16; ++b)
        CHECK(tf.features.values()(i, b) == doctest::Approx(want(i, b)).epsilon(1e-12));
  }
}

TEST_CASE("identical transcripts give identical rows; empty ones are flagged") {
  Manifest m = Toy({"so happy today", "", "so happy today", "meh", "ok"});
  TextFeatConfig cfg;
  TextFeatures tf = FitTextFeatures(m, TranscriptSource::Gold(), "bow", cfg);
  CHECK(std::equal(tf.features.Row(0).begin(), tf.features.Row(0).end(),
                   tf.features.Row(2).begin()));
  for (double v : tf.features.Row(1)) CHECK(v == 0.0);
  CHECK(tf.empty_ids == std::vector<std::string>{"u1"});
  CHECK(tf.features.modality() == Modality::kGsText);
  double norm = 0.0;
  for (double v : tf.features.Row(0)) norm += v * v;
  CHECK(norm == doctest::Approx(1.0));
}

TEST_CASE("idf is fit on the training split only") {
  Manifest a = Toy({"alpha beta", "beta", "gamma", "delta", "epsilon"});
  Manifest b = Toy({"alpha beta", "beta", "gamma", "totally different words", "here too"});
  TextFeatConfig cfg;
  cfg.hash_dim = 64;
  CHECK(FitTextFeatures(a, TranscriptSource::Gold(), "x", cfg).idf ==
        FitTextFeatures(b, TranscriptSource::Gold(), "x", cfg).idf);
  for (double w : FitTextFeatures(a, TranscriptSource::Gold(), "x", cfg).idf.weights)
    CHECK(w > 0.0);
}

TEST_CASE("terms and hashing") {
  TextFeatConfig cfg;
  cfg.ngram_max = 2;
  CHECK(ExtractTerms("Big cat, big!", cfg) ==
        std::vector<std::string>{"big", "cat", "big", "big cat", "cat big"});
  cfg.lowercase = false;
  cfg.ngram_max = 1;
  CHECK(ExtractTerms("Big cat", cfg) == std::vector<std::string>{"Big", "cat"});
  HashedTerm h = HashTerm("cat", 1000);
  CHECK(h.bucket == Fnv("cat") % 1000);
  CHECK(h.sign == (Fnv("cat") >> 63 ? -1.0 : 1.0));
}

TEST_CASE("config validation and missing transcripts") {
  TextFeatConfig cfg;
  cfg.ngram_max = 3;
  CHECK(ThrownCode([&] { cfg.Validate(); }) == Errc::kInvalidValue);
  cfg = TextFeatConfig();
  cfg.hash_dim = 1;
  CHECK(ThrownCode([&] { cfg.Validate(); }) == Errc::kInvalidValue);
  Manifest m = Toy({"a", "b", "c", "d", "e"});
  std::string msg;
  CHECK(ThrownCode([&] { FitTextFeatures(m, TranscriptSource::Asr("w2v"), "x", TextFeatConfig()); },
                   &msg) == Errc::kMissingTranscript);
  CHECK(msg.find("u0") != std::string::npos);
}

TEST_CASE("asr transcripts give asr-text features") {
  std::vector<Utterance> u;
  for (int s = 1; s <= 5; ++s) {
    u.push_back(MakeUtterance("u" + std::to_string(s), s, EmotionLabel::kSad, "gold words"));
    u.back().asr_transcripts["w2v"] = "gold worms";
  }
  TextFeatures tf = FitTextFeatures(Manifest(u), TranscriptSource::Asr("w2v"), "x", TextFeatConfig());
  CHECK(tf.features.modality() == Modality::kAsrText);
}

TEST_CASE("embedding ingestion checks the modality") {
  testing::TempDir dir("textfeat");
  Manifest m = Toy({"a", "b"});
  for (std::size_t dim : {768u, 2304u}) {
    std::string text = "#featureset name=emb modality=audio dim=" + std::to_string(dim) + "\n";
    for (const char *id : {"u0", "u1"}) {
      text += id;
      for (std::size_t j = 0; j < dim; ++j) text += "\t0.25";
      text += "\n";
    }
    WriteFile(dir / "emb.tsv", text);
    CHECK(IngestEmbeddings(dir / "emb.tsv", m, Modality::kAudio).dim() == dim);
    CHECK(ThrownCode([&] { IngestEmbeddings(dir / "emb.tsv", m, Modality::kGsText); }) ==
          Errc::kModalityConflict);
  }
}

}  // namespace
}  // namespace serbench
