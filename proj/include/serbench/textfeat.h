// serbench/textfeat.h

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

#ifndef SERBENCH_TEXTFEAT_H_
#define SERBENCH_TEXTFEAT_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "serbench/corpus.h"

namespace serbench {

struct TextFeatConfig {
  std::size_t hash_dim = 1024;
  int ngram_max = 1;
  double idf_smoothing = 1.0;
  bool lowercase = true;

  void Validate() const;
};

struct IdfTable {
  std::vector<double> weights;  // length hash_dim, all > 0
  bool operator==(const IdfTable &) const = default;
};

/// Bucket and sign of one hashed term: FNV-1a 64 of the term bytes (bigrams
/// are joined by a single space), bucket = hash mod hash_dim, sign = -1 when
/// the top bit is set.
struct HashedTerm {
  std::size_t bucket;
  double sign;
};
HashedTerm HashTerm(std::string_view term, std::size_t hash_dim);

/// Unigrams, then (if ngram_max == 2) bigrams, in text order.
std::vector<std::string> ExtractTerms(std::string_view text, const TextFeatConfig &config);

struct TextFeatures {
  FeatureSet features;
  IdfTable idf;
  std::vector<std::string> empty_ids;  // utterances whose rows are all zero
};

/// Signed hashed term counts, scaled by
///   idf[b] = ln((smoothing + n_train) / (smoothing + df_train[b])) + 1,
/// where df counts training documents with any term in bucket b, then each
/// row is L2-normalized. Texts are in manifest order.
TextFeatures FitTextFeatures(const Manifest &manifest, std::span<const std::string> texts,
                             Modality modality, const std::string &name,
                             const TextFeatConfig &config);

/// Gold transcripts give gs-text, ASR transcripts asr-text. Throws
/// Error(kMissingTranscript) naming the first utterance without one.
TextFeatures FitTextFeatures(const Manifest &manifest, const TranscriptSource &source,
                             const std::string &name, const TextFeatConfig &config);

/// Loads an externally computed embedding file and checks that its declared
/// modality matches the requested one.
FeatureSet IngestEmbeddings(const std::string &path, const Manifest &manifest,
                            Modality modality);

}  // namespace serbench

#endif  // SERBENCH_TEXTFEAT_H_
