// serbench/textfeat.cc

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

#include "serbench/transcripts.h"

namespace serbench {

void TextFeatConfig::Validate() const {
  if (hash_dim < 2) throw Error(Errc::kInvalidValue, "hash_dim must be >= 2");
  if (ngram_max != 1 && ngram_max != 2)
    throw Error(Errc::kInvalidValue, "ngram_max must be 1 or 2");
  if (!(idf_smoothing > 0.0))
    throw Error(Errc::kInvalidValue, "idf_smoothing must be positive");
}

HashedTerm HashTerm(std::string_view term, std::size_t hash_dim) {
  const std::uint64_t h = Fnv1a64(term);
  return {static_cast<std::size_t>(h % hash_dim), (h >> 63) ? -1.0 : 1.0};
}

std::vector<std::string> ExtractTerms(std::string_view text, const TextFeatConfig &config) {
  std::vector<std::string> tokens;
  if (config.lowercase) {
    tokens = NormalizeTranscript(text);
  } else {
    // Same segmentation, original casing: normalize to find boundaries on a
    // lowercased copy, then slice the original.
    std::vector<std::string> lowered = NormalizeTranscript(text);
    std::string src(text);
    std::string low = ToLower(text);
    std::size_t pos = 0;
    for (const std::string &t : lowered) {
      pos = low.find(t, pos);
      tokens.push_back(src.substr(pos, t.size()));
      pos += t.size();
    }
  }
  std::vector<std::string> terms = tokens;
  if (config.ngram_max == 2)
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
      terms.push_back(tokens[i] + ' ' + tokens[i + 1]);
  return terms;
}

TextFeatures FitTextFeatures(const Manifest &manifest, std::span<const std::string> texts,
                             Modality modality, const std::string &name,
                             const TextFeatConfig &config) {
  config.Validate();
  if (texts.size() != manifest.size())
    throw Error(Errc::kCoverage, "text count does not match manifest size");
  const std::vector<std::size_t> train = SplitIndices(manifest, Split::kTrain);
  if (train.empty())
    throw Error(Errc::kDegenerate, "text features need a non-empty training split");

  const std::size_t dim = config.hash_dim;
  Matrix counts(manifest.size(), dim);
  std::vector<std::vector<char>> touched(manifest.size(), std::vector<char>(dim, 0));
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    for (const std::string &term : ExtractTerms(texts[i], config)) {
      HashedTerm h = HashTerm(term, dim);
      counts(i, h.bucket) += h.sign;
      touched[i][h.bucket] = 1;
    }
  }

  TextFeatures out;
  std::vector<double> df(dim, 0.0);
  for (std::size_t i : train)
    for (std::size_t b = 0; b < dim; ++b) df[b] += touched[i][b];
  out.idf.weights.resize(dim);
  const double n = static_cast<double>(train.size());
  for (std::size_t b = 0; b < dim; ++b)
    out.idf.weights[b] =
        std::log((config.idf_smoothing + n) / (config.idf_smoothing + df[b])) + 1.0;

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    auto row = counts.row(i);
    double norm = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      row[b] *= out.idf.weights[b];
      norm += row[b] * row[b];
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double &v : row) v /= norm;
    } else {
      out.empty_ids.push_back(manifest[i].id);
    }
    ids.push_back(manifest[i].id);
  }
  out.features = FeatureSet(name, modality, std::move(ids), std::move(counts));
  return out;
}

TextFeatures FitTextFeatures(const Manifest &manifest, const TranscriptSource &source,
                             const std::string &name, const TextFeatConfig &config) {
  std::vector<std::string> texts;
  texts.reserve(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i)
    texts.push_back(manifest.Transcript(i, source));
  return FitTextFeatures(manifest, texts,
                         source.gold ? Modality::kGsText : Modality::kAsrText, name, config);
}

FeatureSet IngestEmbeddings(const std::string &path, const Manifest &manifest,
                            Modality modality) {
  FeatureSet fs = LoadFeatureSet(path, manifest);
  if (fs.modality() != modality)
    throw Error(Errc::kModalityConflict,
                path + ": file declares modality " + std::string(ModalityName(fs.modality())) +
                    " but " + std::string(ModalityName(modality)) + " was requested");
  return fs;
}

}  // namespace serbench
