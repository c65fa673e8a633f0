// serbench/transcripts.cc

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

#include "serbench/transcripts.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace serbench {

namespace {

bool IsWordByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

}  // namespace

std::vector<std::string> NormalizeTranscript(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&]() {
    // Apostrophes survive only between word characters.
    while (!current.empty() && current.back() == '\'') current.pop_back();
    std::size_t lead = 0;
    while (lead < current.size() && current[lead] == '\'') ++lead;
    if (lead < current.size()) tokens.push_back(current.substr(lead));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (IsWordByte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                        : static_cast<char>(c);
    } else if (c == '\'' && !current.empty() && current.back() != '\'') {
      current += '\'';
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string NormalizedText(std::string_view text) {
  std::string out;
  for (const std::string &t : NormalizeTranscript(text)) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::u32string Utf8CodePoints(std::string_view text) {
  std::u32string out;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
    if (len == 0 || i + len > text.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    char32_t cp = len == 1 ? c : c & (0x7f >> len);
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const unsigned char cc = static_cast<unsigned char>(text[i + k]);
      if ((cc >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3f);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::optional<double> AlignmentResult::error_rate() const {
  if (ref_len == 0) {
    if (distance() == 0) return 0.0;
    return std::nullopt;
  }
  return static_cast<double>(distance()) / static_cast<double>(ref_len);
}

AlignmentResult AlignTokens(std::span<const std::string> ref,
                            std::span<const std::string> hyp) {
  return internal::AlignSequences<std::string>(ref, hyp, ErrorUnit::kWord);
}

namespace {

std::u32string JoinedCodePoints(std::span<const std::string> tokens) {
  std::string joined;
  for (const std::string &t : tokens) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  return Utf8CodePoints(joined);
}

}  // namespace

AlignmentResult AlignCharacters(std::span<const std::string> ref_tokens,
                                std::span<const std::string> hyp_tokens) {
  const std::u32string r = JoinedCodePoints(ref_tokens);
  const std::u32string h = JoinedCodePoints(hyp_tokens);
  return internal::AlignSequences<char32_t>({r.data(), r.size()}, {h.data(), h.size()},
                                            ErrorUnit::kCharacter);
}

CorpusErrorRates PooledErrorRates(std::span<const std::string> refs,
                                  std::span<const std::string> hyps) {
  if (refs.size() != hyps.size())
    throw Error(Errc::kDimensionMismatch, "reference/hypothesis count mismatch");
  CorpusErrorRates out;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::vector<std::string> r = NormalizeTranscript(refs[i]);
    const std::vector<std::string> h = NormalizeTranscript(hyps[i]);
    const AlignmentResult words = AlignTokens(r, h);
    const AlignmentResult chars = AlignCharacters(r, h);
    out.word_errors += words.distance();
    out.words += words.ref_len;
    out.char_errors += chars.distance();
    out.chars += chars.ref_len;
  }
  out.wer = out.words ? static_cast<double>(out.word_errors) / out.words : 0.0;
  out.cer = out.chars ? static_cast<double>(out.char_errors) / out.chars : 0.0;
  return out;
}

CorpusErrorRates CorpusErrorRatesFor(const Manifest &manifest,
                                     const TranscriptSource &hypothesis_source) {
  std::vector<std::string> hyps;
  hyps.reserve(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i)
    hyps.push_back(manifest.Transcript(i, hypothesis_source));
  return CorpusErrorRatesFor(manifest, hyps);
}

CorpusErrorRates CorpusErrorRatesFor(const Manifest &manifest,
                                     std::span<const std::string> hypotheses) {
  if (hypotheses.size() != manifest.size())
    throw Error(Errc::kDimensionMismatch, "expected " + std::to_string(manifest.size()) +
                                     " hypotheses, got " +
                                     std::to_string(hypotheses.size()));
  std::vector<std::string> refs;
  refs.reserve(manifest.size());
  for (const Utterance &u : manifest.utterances()) refs.push_back(u.gold_transcript);
  return PooledErrorRates(refs, hypotheses);
}

void CorruptionPlan::Validate() const {
  if (!(target_rate >= 0.0 && target_rate <= 1.0))
    throw Error(Errc::kInvalidValue, "corruption rate must lie in [0, 1]");
  for (double p : {p_sub, p_del, p_ins})
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(Errc::kInvalidValue, "corruption mix probabilities must lie in [0, 1]");
  if (std::abs(p_sub + p_del + p_ins - 1.0) > 1e-9)
    throw Error(Errc::kInvalidValue, "corruption mix must sum to 1");
  if (target_rate > 0.0 && (p_sub > 0.0 || p_ins > 0.0) && vocabulary.empty())
    throw Error(Errc::kInvalidValue,
                "substitutions/insertions need a non-empty vocabulary");
}

std::vector<std::string> Corrupt(std::span<const std::string> tokens,
                                 const CorruptionPlan &plan) {
  Rng rng(plan.seed);
  return Corrupt(tokens, plan, rng);
}

std::vector<std::string> Corrupt(std::span<const std::string> tokens,
                                 const CorruptionPlan &plan, Rng &rng) {
  plan.Validate();
  const double r = plan.target_rate;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  if (r == 0.0) {
    out.assign(tokens.begin(), tokens.end());
    return out;
  }
  const std::vector<std::string> &vocab = plan.vocabulary;
  for (const std::string &tok : tokens) {
    const double u = rng.Uniform();
    if (u < r * plan.p_sub) {
      const std::size_t same =
          static_cast<std::size_t>(std::count(vocab.begin(), vocab.end(), tok));
      if (same == vocab.size()) {
        out.push_back(tok);  // nothing different to substitute with
      } else {
        std::size_t k = rng.Below(vocab.size() - same);
        for (const std::string &cand : vocab) {
          if (cand == tok) continue;
          if (k-- == 0) {
            out.push_back(cand);
            break;
          }
        }
      }
    } else if (u >= r * (plan.p_sub + plan.p_del)) {
      out.push_back(tok);
    }
    if (plan.p_ins > 0.0 && rng.Uniform() < r * plan.p_ins)
      out.push_back(vocab[rng.Below(vocab.size())]);
  }
  return out;
}

std::uint64_t UtteranceSeed(std::uint64_t plan_seed, std::string_view utterance_id) {
  return plan_seed ^ Fnv1a64(utterance_id);
}

std::vector<std::string> CorpusVocabulary(const Manifest &manifest) {
  std::set<std::string> vocab;
  for (const Utterance &u : manifest.utterances())
    for (std::string &t : NormalizeTranscript(u.gold_transcript)) vocab.insert(std::move(t));
  return {vocab.begin(), vocab.end()};
}

std::vector<std::string> CorruptCorpus(const Manifest &manifest, const CorruptionPlan &plan) {
  plan.Validate();
  std::vector<std::string> out;
  out.reserve(manifest.size());
  for (const Utterance &u : manifest.utterances()) {
    Rng rng(UtteranceSeed(plan.seed, u.id));
    std::string joined;
    for (const std::string &t : Corrupt(NormalizeTranscript(u.gold_transcript), plan, rng)) {
      if (!joined.empty()) joined += ' ';
      joined += t;
    }
    out.push_back(std::move(joined));
  }
  return out;
}

std::string FormatErrorRateTable(std::span<const ErrorRateRow> rows) {
  std::string out = "SetUp\tWER%\tCER%\n";
  char buf[64];
  for (const ErrorRateRow &row : rows) {
    std::snprintf(buf, sizeof(buf), "\t%.2f\t%.2f\n", 100.0 * row.rates.wer,
                  100.0 * row.rates.cer);
    out += row.setup + buf;
  }
  return out;
}

}  // namespace serbench
