// tests/corpus_test.cc

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

#include "doctest.h"
#include "test_util.h"

namespace serbench {
namespace {

using testing::MakeUtterance;
using testing::ThrownCode;

const char kFourRows[] =
    "id\tsession\tspeaker\tlabel\tgold_transcript\n"
    "u1\t1\tS1F\thappy\tthat is great\n"
    "u2\t2\tS2M\tsad\ti miss her\n"
    "u3\t3\tS3F\tangry\tshut up\n"
    "u4\t4\tS4M\tneutral\tsee you at noon\n";

TEST_CASE("labels parse to exactly four categories") {
  CHECK(ParseEmotionLabel("Happy") == EmotionLabel::kHappy);
  CHECK(ParseEmotionLabel("exc") == EmotionLabel::kHappy);
  CHECK(ParseEmotionLabel("sad") == EmotionLabel::kSad);
  CHECK(ParseEmotionLabel("ANG") == EmotionLabel::kAngry);
  CHECK(ParseEmotionLabel("neu") == EmotionLabel::kNeutral);
  CHECK(ThrownCode([] { ParseEmotionLabel("frustrated"); }) == Errc::kInvalidValue);
  for (EmotionLabel l : kAllLabels) CHECK(ParseEmotionLabel(LabelName(l)) == l);
}

TEST_CASE("four-row manifest splits 3/1/0 under the default rule") {
  Manifest m = ParseManifest(kFourRows);
  CHECK(m.size() == 4);
  CHECK(SplitIds(m, Split::kTrain) == std::vector<std::string>{"u1", "u2", "u3"});
  CHECK(SplitIds(m, Split::kDev) == std::vector<std::string>{"u4"});
  CHECK(SplitIds(m, Split::kTest).empty());
  CHECK(m[1].gold_transcript == "i miss her");
}

TEST_CASE("duplicate ids are rejected") {
  std::string text = kFourRows;
  text += "u1\t5\tS5F\thappy\tagain\n";
  std::string msg;
  CHECK(ThrownCode([&] { ParseManifest(text); }, &msg) == Errc::kDuplicateId);
  CHECK(msg.find("u1") != std::string::npos);
}

TEST_CASE("sessions outside 1..5 and bad labels are rejected") {
  CHECK(ThrownCode([] {
          ParseManifest("id\tsession\tspeaker\tlabel\tgold_transcript\nx\t6\tS\thappy\thi\n");
        }) == Errc::kInvalidValue);
  CHECK(ThrownCode([] {
          ParseManifest("id\tsession\tspeaker\tlabel\tgold_transcript\nx\t1\tS\tbored\thi\n");
        }) == Errc::kInvalidValue);
  CHECK(ThrownCode([] { ParseManifest("id\tsession\nx\t1\n"); }) == Errc::kParse);
}

TEST_CASE("split ids follow manifest order") {
  std::vector<Utterance> u = {MakeUtterance("a", 1, EmotionLabel::kHappy),
                              MakeUtterance("b", 4, EmotionLabel::kSad),
                              MakeUtterance("c", 5, EmotionLabel::kAngry),
                              MakeUtterance("d", 2, EmotionLabel::kNeutral)};
  Manifest m(u);
  CHECK(SplitIds(m, Split::kTrain) == std::vector<std::string>{"a", "d"});
  CHECK(SplitIndices(m, Split::kTrain) == std::vector<std::size_t>{0, 3});
  CHECK(SplitIds(m, Split::kTest) == std::vector<std::string>{"c"});
}

TEST_CASE("split rules must be disjoint and non-empty") {
  CHECK(ThrownCode([] { SplitRule({1, 2, 3}, {}, {5}); }) == Errc::kInvalidValue);
  CHECK(ThrownCode([] { SplitRule({1, 2, 3, 4}, {5}, {}); }) == Errc::kInvalidValue);
  CHECK(ThrownCode([] { SplitRule({1, 2}, {2}, {5}); }) == Errc::kInvalidValue);
  SplitRule custom({1, 2}, {3}, {4});
  CHECK(ThrownCode([&] { custom.Assign(5); }) == Errc::kInvalidValue);
  CHECK(ThrownCode([&] {
          Manifest({MakeUtterance("a", 5, EmotionLabel::kHappy)}, custom);
        }) == Errc::kInvalidValue);
}

TEST_CASE("default rule keeps splits speaker-disjoint") {
  std::vector<Utterance> u;
  for (int s = 1; s <= 5; ++s)
    for (const char *g : {"F", "M"}) {
      Utterance x = MakeUtterance("s" + std::to_string(s) + g, s, EmotionLabel::kHappy);
      x.speaker_id = "Ses0" + std::to_string(s) + g;
      u.push_back(x);
    }
  Manifest m(u);
  std::set<std::string> seen[3];
  for (std::size_t i = 0; i < m.size(); ++i)
    seen[static_cast<int>(m.split_of(i))].insert(m[i].speaker_id);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      for (const std::string &s : seen[a]) CHECK(seen[b].count(s) == 0);
}

TEST_CASE("manifest serialization round-trips with asr columns and audio") {
  testing::TempDir dir("corpus");
  std::vector<Utterance> u = {MakeUtterance("a", 1, EmotionLabel::kHappy, "hi there"),
                              MakeUtterance("b", 4, EmotionLabel::kSad, "oh no")};
  u[0].asr_transcripts["w2v"] = "hi their";
  u[0].audio_path = dir / "a.wav";
  u[1].audio_path = dir / "b.wav";
  Manifest m(u);
  WriteFile(dir / "m.tsv", SerializeManifest(m));
  Manifest back = LoadManifest(dir / "m.tsv");
  CHECK(back.size() == 2);
  CHECK(back[0].asr_transcripts.at("w2v") == "hi their");
  CHECK(back[1].asr_transcripts.count("w2v") == 0);
  CHECK(*back[0].audio_path == dir / "a.wav");
  CHECK(back.Transcript(0, TranscriptSource::Asr("w2v")) == "hi their");
  std::string msg;
  CHECK(ThrownCode([&] { back.Transcript(1, TranscriptSource::Asr("w2v")); }, &msg) ==
        Errc::kMissingTranscript);
  CHECK(msg.find("b") != std::string::npos);
}

TEST_CASE("relative audio paths resolve against the manifest directory") {
  testing::TempDir dir("corpus_rel");
  WriteFile(dir / "m.tsv",
            "id\tsession\tspeaker\tlabel\tgold_transcript\taudio_path\n"
            "a\t1\tS\thappy\thi\twav/a.wav\n");
  Manifest m = LoadManifest(dir / "m.tsv");
  CHECK(*m[0].audio_path == (std::filesystem::path(dir.str()) / "wav/a.wav").string());
}

TEST_CASE("transcript sources") {
  CHECK(TranscriptSource::Parse("gold").gold);
  TranscriptSource a = TranscriptSource::Parse("asr:qn");
  CHECK_FALSE(a.gold);
  CHECK(a.system == "qn");
  CHECK(a.ToString() == "asr:qn");
  CHECK(ThrownCode([] { TranscriptSource::Parse("whisper"); }) == Errc::kInvalidValue);
}

Manifest Small() {
  return Manifest({MakeUtterance("u1", 1, EmotionLabel::kHappy),
                   MakeUtterance("u7", 4, EmotionLabel::kSad)});
}

std::string FeatureText(int dim, bool drop_u7 = false, int short_row = -1) {
  std::string out = "#featureset name=emb modality=gs-text dim=" + std::to_string(dim) + "\n";
  int r = 0;
  for (const char *id : {"u7", "u1"}) {
    if (drop_u7 && std::string(id) == "u7") continue;
    out += id;
    const int n = r == short_row ? dim - 1 : dim;
    for (int j = 0; j < n; ++j) out += "\t" + std::to_string(j * 0.5 + r);
    out += "\n";
    ++r;
  }
  return out;
}

TEST_CASE("feature set loading") {
  Manifest m = Small();
  FeatureSet fs = ParseFeatureSet(FeatureText(768), m);
  CHECK(fs.dim() == 768);
  CHECK(fs.modality() == Modality::kGsText);
  // Rows come back in manifest order.
  CHECK(fs.ids() == std::vector<std::string>{"u1", "u7"});
  CHECK(fs.Row("u7")[2] == 1.0);
  CHECK(fs.Row("u1")[2] == 2.0);

  std::string msg;
  CHECK(ThrownCode([&] { ParseFeatureSet(FeatureText(768, true), m); }, &msg) ==
        Errc::kMissingUtterance);
  CHECK(msg.find("u7") != std::string::npos);
  CHECK(ThrownCode([&] { ParseFeatureSet(FeatureText(768, false, 0), m); }) ==
        Errc::kDimensionMismatch);
  CHECK(ThrownCode([&] { ParseFeatureSet("u1\t1\n", m); }) == Errc::kParse);
}

TEST_CASE("feature sets reject non-finite values and round-trip") {
  Manifest m = Small();
  std::string text = FeatureText(3);
  CHECK(ThrownCode([&] {
          ParseFeatureSet(text.substr(0, text.size() - 1) + "\tnan\n", m);
        }).has_value());
  Matrix v(2, 1);
  v(1, 0) = std::numeric_limits<double>::infinity();
  CHECK(ThrownCode([&] {
          FeatureSet("x", Modality::kAudio, {"u1", "u7"}, v);
        }) == Errc::kNonFinite);
  FeatureSet fs = ParseFeatureSet(text, m);
  CHECK(ParseFeatureSet(SerializeFeatureSet(fs), m) == fs);
}

TEST_CASE("modality names") {
  for (Modality x : {Modality::kAudio, Modality::kGsText, Modality::kAsrText})
    CHECK(ParseModality(ModalityName(x)) == x);
  CHECK(ThrownCode([] { ParseModality("video"); }) == Errc::kInvalidValue);
}

}  // namespace
}  // namespace serbench
