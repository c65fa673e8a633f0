// serbench/corpus.cc

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

#include "serbench/corpus.h"

#include <cmath>
#include <filesystem>

namespace serbench {

EmotionLabel ParseEmotionLabel(std::string_view text) {
  const std::string s = ToLower(Trim(text));
  if (s == "happy" || s == "happiness" || s == "hap" || s == "excited" ||
      s == "excitement" || s == "exc")
    return EmotionLabel::kHappy;
  if (s == "sad" || s == "sadness") return EmotionLabel::kSad;
  if (s == "angry" || s == "anger" || s == "ang") return EmotionLabel::kAngry;
  if (s == "neutral" || s == "neu") return EmotionLabel::kNeutral;
  throw Error(Errc::kInvalidValue, "unknown emotion label '" + std::string(text) + "'");
}

std::string_view LabelName(EmotionLabel label) {
  switch (label) {
    case EmotionLabel::kHappy: return "happy";
    case EmotionLabel::kSad: return "sad";
    case EmotionLabel::kAngry: return "angry";
    case EmotionLabel::kNeutral: return "neutral";
  }
  return "?";
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "dev") return Split::kDev;
  if (text == "test") return Split::kTest;
  throw Error(Errc::kInvalidValue, "unknown split '" + std::string(text) + "'");
}

SplitRule::SplitRule() : SplitRule({1, 2, 3}, {4}, {5}) {}

SplitRule::SplitRule(std::set<int> train, std::set<int> dev, std::set<int> test)
    : sessions_{std::move(train), std::move(dev), std::move(test)} {
  for (int s = 0; s < 3; ++s) {
    if (sessions_[s].empty())
      throw Error(Errc::kInvalidValue,
                  "split rule: " + std::string(SplitName(static_cast<Split>(s))) +
                      " session set is empty");
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      for (int session : sessions_[a])
        if (sessions_[b].count(session))
          throw Error(Errc::kInvalidValue,
                      "split rule: session " + std::to_string(session) +
                          " assigned to both " +
                          std::string(SplitName(static_cast<Split>(a))) + " and " +
                          std::string(SplitName(static_cast<Split>(b))));
}

Split SplitRule::Assign(int session) const {
  for (int s = 0; s < 3; ++s)
    if (sessions_[s].count(session)) return static_cast<Split>(s);
  throw Error(Errc::kInvalidValue,
              "session " + std::to_string(session) + " is not covered by the split rule");
}

const std::set<int> &SplitRule::sessions(Split split) const {
  return sessions_[static_cast<int>(split)];
}

TranscriptSource TranscriptSource::Parse(std::string_view text) {
  if (text == "gold") return Gold();
  if (text.starts_with("asr:") && text.size() > 4)
    return Asr(std::string(text.substr(4)));
  throw Error(Errc::kInvalidValue,
              "transcript source must be 'gold' or 'asr:<system>', got '" +
                  std::string(text) + "'");
}

std::string TranscriptSource::ToString() const {
  return gold ? std::string("gold") : "asr:" + system;
}

Manifest::Manifest(std::vector<Utterance> utterances, SplitRule rule)
    : utterances_(std::move(utterances)), rule_(std::move(rule)) {
  splits_.reserve(utterances_.size());
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const Utterance &u = utterances_[i];
    if (u.id.empty()) throw Error(Errc::kInvalidValue, "utterance with empty id");
    if (u.session < 1 || u.session > 5)
      throw Error(Errc::kInvalidValue, "utterance '" + u.id + "': session " +
                                           std::to_string(u.session) +
                                           " outside 1..5");
    if (!index_.emplace(u.id, i).second)
      throw Error(Errc::kDuplicateId, "duplicate utterance id '" + u.id + "'");
    splits_.push_back(rule_.Assign(u.session));
  }
}

std::optional<std::size_t> Manifest::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Manifest::IndexOf(std::string_view id) const {
  auto found = Find(id);
  if (!found)
    throw Error(Errc::kMissingUtterance, "unknown utterance id '" + std::string(id) + "'");
  return *found;
}

const std::string &Manifest::Transcript(std::size_t index,
                                        const TranscriptSource &source) const {
  const Utterance &u = utterances_.at(index);
  if (source.gold) return u.gold_transcript;
  auto it = u.asr_transcripts.find(source.system);
  if (it == u.asr_transcripts.end())
    throw Error(Errc::kMissingTranscript, "utterance '" + u.id +
                                              "' has no transcript from ASR system '" +
                                              source.system + "'");
  return it->second;
}

Manifest LoadManifest(const std::string &path, const SplitRule &rule) {
  std::filesystem::path p(path);
  return ParseManifest(ReadFile(path), p.parent_path().string(), rule);
}

namespace {

std::string LineError(std::size_t line, const std::string &msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

// Strips a trailing '\r' so files written on Windows parse the same.
std::string_view Chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

Manifest ParseManifest(std::string_view text, const std::string &base_dir,
                       const SplitRule &rule) {
  std::vector<std::string> lines = SplitFields(text, '\n');
  std::size_t header_line = 0;
  while (header_line < lines.size() && Trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size())
    throw Error(Errc::kParse, "manifest is empty (missing header)");

  std::vector<std::string> columns = SplitFields(Chomp(lines[header_line]), '\t');
  int col_id = -1, col_session = -1, col_speaker = -1, col_label = -1,
      col_gold = -1, col_audio = -1;
  std::vector<std::pair<int, std::string>> asr_cols;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::string name(Trim(columns[c]));
    const int ci = static_cast<int>(c);
    if (name == "id") col_id = ci;
    else if (name == "session") col_session = ci;
    else if (name == "speaker") col_speaker = ci;
    else if (name == "label") col_label = ci;
    else if (name == "gold_transcript") col_gold = ci;
    else if (name == "audio_path") col_audio = ci;
    else if (name.starts_with("asr:") && name.size() > 4)
      asr_cols.emplace_back(ci, name.substr(4));
    else
      throw Error(Errc::kParse,
                  LineError(header_line + 1, "unknown manifest column '" + name + "'"));
  }
  for (auto [col, name] : {std::pair{col_id, "id"}, {col_session, "session"},
                           {col_speaker, "speaker"}, {col_label, "label"},
                           {col_gold, "gold_transcript"}})
    if (col < 0)
      throw Error(Errc::kParse, LineError(header_line + 1,
                                          std::string("missing required column '") +
                                              name + "'"));

  std::vector<Utterance> utterances;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t ln = header_line + 1; ln < lines.size(); ++ln) {
    std::string_view line = Chomp(lines[ln]);
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields = SplitFields(line, '\t');
    if (fields.size() != columns.size())
      throw Error(Errc::kParse,
                  LineError(ln + 1, "expected " + std::to_string(columns.size()) +
                                        " fields, found " + std::to_string(fields.size())));
    Utterance u;
    u.id = std::string(Trim(fields[col_id]));
    u.speaker_id = std::string(Trim(fields[col_speaker]));
    try {
      u.session = static_cast<int>(ParseInt(fields[col_session]));
      u.label = ParseEmotionLabel(fields[col_label]);
    } catch (const Error &e) {
      throw Error(e.code(), LineError(ln + 1, e.what()));
    }
    if (u.session < 1 || u.session > 5)
      throw Error(Errc::kInvalidValue,
                  LineError(ln + 1, "session " + std::to_string(u.session) +
                                        " outside 1..5"));
    if (u.id.empty()) throw Error(Errc::kParse, LineError(ln + 1, "empty id"));
    if (!seen.emplace(u.id, ln + 1).second)
      throw Error(Errc::kDuplicateId,
                  LineError(ln + 1, "duplicate utterance id '" + u.id +
                                        "' (first seen on line " +
                                        std::to_string(seen[u.id]) + ")"));
    u.gold_transcript = fields[col_gold];
    for (const auto &[col, system] : asr_cols)
      if (!Trim(fields[col]).empty()) u.asr_transcripts[system] = fields[col];
    if (col_audio >= 0 && !Trim(fields[col_audio]).empty()) {
      std::filesystem::path audio(std::string(Trim(fields[col_audio])));
      if (audio.is_relative() && !base_dir.empty())
        audio = std::filesystem::path(base_dir) / audio;
      u.audio_path = audio.string();
    }
    utterances.push_back(std::move(u));
  }
  return Manifest(std::move(utterances), rule);
}

std::string SerializeManifest(const Manifest &manifest) {
  std::set<std::string> systems;
  bool any_audio = false;
  for (const Utterance &u : manifest.utterances()) {
    for (const auto &[name, text] : u.asr_transcripts) systems.insert(name);
    any_audio = any_audio || u.audio_path.has_value();
  }
  std::string out = "id\tsession\tspeaker\tlabel\tgold_transcript";
  for (const std::string &s : systems) out += "\tasr:" + s;
  if (any_audio) out += "\taudio_path";
  out += '\n';
  for (const Utterance &u : manifest.utterances()) {
    out += u.id + '\t' + std::to_string(u.session) + '\t' + u.speaker_id + '\t' +
           std::string(LabelName(u.label)) + '\t' + u.gold_transcript;
    for (const std::string &s : systems) {
      out += '\t';
      auto it = u.asr_transcripts.find(s);
      if (it != u.asr_transcripts.end()) out += it->second;
    }
    if (any_audio) out += '\t' + u.audio_path.value_or("");
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> SplitIndices(const Manifest &manifest, Split split) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < manifest.size(); ++i)
    if (manifest.split_of(i) == split) out.push_back(i);
  return out;
}

std::vector<std::string> SplitIds(const Manifest &manifest, Split split) {
  std::vector<std::string> out;
  for (std::size_t i : SplitIndices(manifest, split)) out.push_back(manifest[i].id);
  return out;
}

std::string_view ModalityName(Modality modality) {
  switch (modality) {
    case Modality::kAudio: return "audio";
    case Modality::kGsText: return "gs-text";
    case Modality::kAsrText: return "asr-text";
  }
  return "?";
}

Modality ParseModality(std::string_view text) {
  if (text == "audio") return Modality::kAudio;
  if (text == "gs-text") return Modality::kGsText;
  if (text == "asr-text") return Modality::kAsrText;
  throw Error(Errc::kInvalidValue, "unknown modality '" + std::string(text) + "'");
}

FeatureSet::FeatureSet(std::string name, Modality modality,
                       std::vector<std::string> ids, Matrix values)
    : name_(std::move(name)),
      modality_(modality),
      ids_(std::move(ids)),
      values_(std::move(values)) {
  if (ids_.size() != values_.rows())
    throw Error(Errc::kDimensionMismatch,
                "feature set '" + name_ + "': " + std::to_string(ids_.size()) +
                    " ids for " + std::to_string(values_.rows()) + " rows");
  if (!ids_.empty() && values_.cols() == 0)
    throw Error(Errc::kDimensionMismatch, "feature set '" + name_ + "' has dim 0");
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second)
      throw Error(Errc::kDuplicateId,
                  "feature set '" + name_ + "': duplicate id '" + ids_[i] + "'");
    for (double v : values_.row(i))
      if (!std::isfinite(v))
        throw Error(Errc::kNonFinite, "feature set '" + name_ +
                                          "': non-finite value for '" + ids_[i] + "'");
  }
}

bool FeatureSet::Contains(std::string_view id) const {
  return index_.count(std::string(id)) > 0;
}

std::span<const double> FeatureSet::Row(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end())
    throw Error(Errc::kMissingUtterance,
                "feature set '" + name_ + "' has no row for '" + std::string(id) + "'");
  return values_.row(it->second);
}

bool FeatureSet::operator==(const FeatureSet &other) const {
  return name_ == other.name_ && modality_ == other.modality_ &&
         ids_ == other.ids_ && values_ == other.values_;
}

FeatureSet LoadFeatureSet(const std::string &path, const Manifest &manifest) {
  try {
    return ParseFeatureSet(ReadFile(path), manifest);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

FeatureSet ParseFeatureSet(std::string_view text, const Manifest &manifest) {
  std::vector<std::string> lines = SplitFields(text, '\n');
  std::size_t ln = 0;
  while (ln < lines.size() && Trim(lines[ln]).empty()) ++ln;
  if (ln == lines.size()) throw Error(Errc::kParse, "feature file is empty");

  std::string_view header = Trim(lines[ln]);
  if (!header.starts_with("#featureset"))
    throw Error(Errc::kParse, LineError(ln + 1, "expected '#featureset' header"));
  std::string name;
  std::optional<Modality> modality;
  long long dim = -1;
  for (const std::string &tok : SplitFields(header.substr(11), ' ')) {
    if (Trim(tok).empty()) continue;
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::kParse, LineError(ln + 1, "malformed header field '" + tok + "'"));
    std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
    if (key == "name") name = value;
    else if (key == "modality") modality = ParseModality(value);
    else if (key == "dim") dim = ParseInt(value);
    else throw Error(Errc::kParse, LineError(ln + 1, "unknown header key '" + key + "'"));
  }
  if (name.empty() || !modality || dim <= 0)
    throw Error(Errc::kParse,
                LineError(ln + 1, "header must declare name, modality and dim > 0"));

  const std::size_t d = static_cast<std::size_t>(dim);
  std::vector<std::optional<std::size_t>> row_of(manifest.size());
  Matrix file_rows;
  std::vector<double> values(d);
  std::unordered_map<std::string, std::size_t> seen;
  for (++ln; ln < lines.size(); ++ln) {
    std::string_view line = Chomp(lines[ln]);
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields = SplitFields(line, '\t');
    const std::string id(Trim(fields[0]));
    if (fields.size() - 1 != d)
      throw Error(Errc::kDimensionMismatch,
                  LineError(ln + 1, "row '" + id + "' has " +
                                        std::to_string(fields.size() - 1) +
                                        " values, header declares dim " +
                                        std::to_string(d)));
    if (!seen.emplace(id, ln + 1).second)
      throw Error(Errc::kDuplicateId, LineError(ln + 1, "duplicate row '" + id + "'"));
    auto index = manifest.Find(id);
    if (!index) continue;
    for (std::size_t j = 0; j < d; ++j) {
      values[j] = ParseReal(fields[j + 1]);
      if (!std::isfinite(values[j]))
        throw Error(Errc::kNonFinite,
                    LineError(ln + 1, "non-finite value in row '" + id + "'"));
    }
    row_of[*index] = file_rows.rows();
    file_rows.AppendRow(values);
  }

  std::vector<std::string> missing;
  for (std::size_t i = 0; i < manifest.size(); ++i)
    if (!row_of[i]) missing.push_back(manifest[i].id);
  if (!missing.empty()) {
    std::string msg = "feature set '" + name + "' is missing " +
                      std::to_string(missing.size()) + " utterance(s):";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw Error(Errc::kMissingUtterance, msg);
  }

  Matrix ordered(manifest.size(), d);
  std::vector<std::string> ids;
  ids.reserve(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    auto src = file_rows.row(*row_of[i]);
    std::copy(src.begin(), src.end(), ordered.row(i).begin());
    ids.push_back(manifest[i].id);
  }
  return FeatureSet(name, *modality, std::move(ids), std::move(ordered));
}

std::string SerializeFeatureSet(const FeatureSet &features) {
  std::string out = "#featureset name=" + features.name() +
                    " modality=" + std::string(ModalityName(features.modality())) +
                    " dim=" + std::to_string(features.dim()) + "\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    out += features.ids()[i];
    for (double v : features.Row(i)) {
      out += '\t';
      out += FormatReal(v);
    }
    out += '\n';
  }
  return out;
}

void WriteFeatureSet(const std::string &path, const FeatureSet &features) {
  WriteFile(path, SerializeFeatureSet(features));
}

}  // namespace serbench
