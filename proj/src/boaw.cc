// serbench/boaw.cc

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
#include <numeric>

namespace serbench {

Codebook LearnCodebook(const Matrix &frames, std::size_t size_n, std::uint64_t seed,
                       CodebookSource source) {
  if (size_n == 0) throw Error(Errc::kInvalidValue, "codebook size must be >= 1");
  if (frames.rows() < size_n)
    throw Error(Errc::kInsufficientFrames,
                "codebook of " + std::to_string(size_n) + " words needs at least as many " +
                    "training frames, got " + std::to_string(frames.rows()));
  for (double v : frames.data())
    if (!std::isfinite(v)) throw Error(Errc::kNonFinite, "non-finite codebook training frame");

  std::vector<std::size_t> order(frames.rows());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  Codebook cb;
  cb.source = source;
  cb.seed = seed;
  cb.codewords = Matrix(size_n, frames.cols());
  for (std::size_t i = 0; i < size_n; ++i) {
    std::size_t j = i + rng.Below(order.size() - i);
    std::swap(order[i], order[j]);
    auto src = frames.row(order[i]);
    std::copy(src.begin(), src.end(), cb.codewords.row(i).begin());
  }
  return cb;
}

std::vector<double> Quantize(const Matrix &frames, const Codebook &codebook,
                             std::size_t assignments) {
  const std::size_t n = codebook.size();
  if (assignments == 0 || assignments > n)
    throw Error(Errc::kInvalidValue, "assignments (" + std::to_string(assignments) +
                                         ") must be in 1.." + std::to_string(n));
  std::vector<double> hist(n, 0.0);
  if (frames.rows() == 0) return hist;
  if (frames.cols() != codebook.dim())
    throw Error(Errc::kDimensionMismatch,
                "frame dim " + std::to_string(frames.cols()) + " vs codebook dim " +
                    std::to_string(codebook.dim()));

  std::vector<double> dist(n);
  std::vector<std::size_t> idx(n);
  auto closer = [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  };
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    auto x = frames.row(t);
    for (std::size_t k = 0; k < n; ++k) {
      auto c = codebook.codewords.row(k);
      double d = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = x[j] - c[j];
        d += diff * diff;
      }
      dist[k] = d;
    }
    std::iota(idx.begin(), idx.end(), 0);
    std::nth_element(idx.begin(), idx.begin() + (assignments - 1), idx.end(), closer);
    // nth_element leaves the first `assignments` entries as the nearest set.
    for (std::size_t k = 0; k < assignments; ++k) hist[idx[k]] += 1.0;
  }
  return hist;
}

std::vector<double> LogTf(std::span<const double> histogram) {
  std::vector<double> out(histogram.size());
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    if (!(histogram[i] >= 0.0))
      throw Error(Errc::kInvalidValue, "log-TF weighting of a negative count");
    out[i] = std::log1p(histogram[i]);
  }
  return out;
}

std::string SerializeCodebook(const Codebook &codebook) {
  std::string out = "#codebook source=";
  out += codebook.source == CodebookSource::kLlds ? "llds" : "deltas";
  out += " N=" + std::to_string(codebook.size()) + " dim=" +
         std::to_string(codebook.dim()) + " seed=" + std::to_string(codebook.seed) + "\n";
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    auto row = codebook.codewords.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += '\t';
      out += FormatReal(row[j]);
    }
    out += '\n';
  }
  return out;
}

Codebook ParseCodebook(std::string_view text) {
  std::vector<std::string> lines = SplitFields(text, '\n');
  if (lines.empty() || !Trim(lines[0]).starts_with("#codebook"))
    throw Error(Errc::kParse, "expected '#codebook' header");
  Codebook cb;
  long long n = -1, dim = -1;
  for (const std::string &tok : SplitFields(Trim(lines[0]).substr(9), ' ')) {
    if (Trim(tok).empty()) continue;
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw Error(Errc::kParse, "malformed codebook header");
    std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
    if (key == "source") {
      if (value == "llds") cb.source = CodebookSource::kLlds;
      else if (value == "deltas") cb.source = CodebookSource::kDeltas;
      else throw Error(Errc::kParse, "unknown codebook source '" + value + "'");
    } else if (key == "N") {
      n = ParseInt(value);
    } else if (key == "dim") {
      dim = ParseInt(value);
    } else if (key == "seed") {
      cb.seed = static_cast<std::uint64_t>(ParseInt(value));
    } else {
      throw Error(Errc::kParse, "unknown codebook header key '" + key + "'");
    }
  }
  if (n < 1 || dim < 1) throw Error(Errc::kParse, "codebook header needs N and dim");
  std::vector<double> row(static_cast<std::size_t>(dim));
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (Trim(lines[ln]).empty()) continue;
    std::vector<std::string> fields = SplitFields(Trim(lines[ln]), '\t');
    if (fields.size() != row.size())
      throw Error(Errc::kDimensionMismatch, "codeword on line " + std::to_string(ln + 1) +
                                                " has wrong dimension");
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = ParseReal(fields[j]);
    cb.codewords.AppendRow(row);
  }
  if (cb.codewords.rows() != static_cast<std::size_t>(n))
    throw Error(Errc::kParse, "codebook declares N=" + std::to_string(n) + " but has " +
                                  std::to_string(cb.codewords.rows()) + " rows");
  return cb;
}

namespace {

struct Moments {
  std::vector<double> mean, scale;
};

Moments FrameMoments(const Matrix &frames) {
  Moments m;
  const std::size_t d = frames.cols();
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 1.0);
  if (frames.rows() == 0) return m;
  for (std::size_t t = 0; t < frames.rows(); ++t)
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += frames(t, j);
  for (double &v : m.mean) v /= static_cast<double>(frames.rows());
  std::vector<double> var(d, 0.0);
  for (std::size_t t = 0; t < frames.rows(); ++t)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = frames(t, j) - m.mean[j];
      var[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j)
    m.scale[j] = std::max(std::sqrt(var[j] / frames.rows()), 1e-8);
  return m;
}

void ApplyMoments(const Moments &m, Matrix &frames) {
  for (std::size_t t = 0; t < frames.rows(); ++t)
    for (std::size_t j = 0; j < frames.cols(); ++j)
      frames(t, j) = (frames(t, j) - m.mean[j]) / m.scale[j];
}

}  // namespace

BoawResult BoawFeatures(const Manifest &manifest, const LldProvider &provider,
                        const BoawConfig &config, const std::string &name) {
  std::vector<LLDFrameSequence> llds;
  llds.reserve(manifest.size());
  for (const Utterance &u : manifest.utterances()) llds.push_back(provider(u));

  std::vector<std::size_t> train = SplitIndices(manifest, Split::kTrain);
  if (train.empty())
    throw Error(Errc::kDegenerate, "BoAW codebooks need a non-empty training split");

  Matrix train_llds, train_deltas;
  for (std::size_t i : train) {
    for (std::size_t t = 0; t < llds[i].frames.rows(); ++t) {
      train_llds.AppendRow(llds[i].frames.row(t));
      train_deltas.AppendRow(llds[i].deltas.row(t));
    }
  }

  if (config.standardize) {
    Moments ml = FrameMoments(train_llds), md = FrameMoments(train_deltas);
    ApplyMoments(ml, train_llds);
    ApplyMoments(md, train_deltas);
    for (LLDFrameSequence &s : llds) {
      ApplyMoments(ml, s.frames);
      ApplyMoments(md, s.deltas);
    }
  }

  BoawResult result;
  result.lld_codebook =
      LearnCodebook(train_llds, config.size_n, config.seed, CodebookSource::kLlds);
  result.delta_codebook =
      LearnCodebook(train_deltas, config.size_n, config.seed + 1, CodebookSource::kDeltas);

  const std::size_t n = config.size_n;
  Matrix values(manifest.size(), 2 * n);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    std::vector<double> h1 = LogTf(Quantize(llds[i].frames, result.lld_codebook,
                                            config.assignments));
    std::vector<double> h2 = LogTf(Quantize(llds[i].deltas, result.delta_codebook,
                                            config.assignments));
    auto row = values.row(i);
    std::copy(h1.begin(), h1.end(), row.begin());
    std::copy(h2.begin(), h2.end(), row.begin() + n);
    ids.push_back(manifest[i].id);
  }
  result.features = FeatureSet(name, Modality::kAudio, std::move(ids), std::move(values));
  return result;
}

}  // namespace serbench
