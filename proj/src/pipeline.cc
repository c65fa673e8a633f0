// serbench/pipeline.cc

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

#include "serbench/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <set>

namespace serbench {

namespace fs = std::filesystem;

namespace {

Error ConfigError(const std::string &msg) { return Error(Errc::kConfig, "config: " + msg); }

std::vector<double> ParseRealList(const std::string &key, std::string_view value) {
  std::vector<double> out;
  for (const std::string &part : SplitFields(value, ',')) {
    if (Trim(part).empty()) continue;
    try {
      out.push_back(ParseReal(part));
    } catch (const Error &) {
      throw ConfigError(key + ": '" + part + "' is not a number");
    }
  }
  return out;
}

std::set<int> ParseIntSet(const std::string &key, std::string_view value) {
  std::set<int> out;
  for (const std::string &part : SplitFields(value, ',')) {
    if (Trim(part).empty()) continue;
    try {
      out.insert(static_cast<int>(ParseInt(part)));
    } catch (const Error &) {
      throw ConfigError(key + ": '" + part + "' is not an integer");
    }
  }
  return out;
}

bool ParseBool(const std::string &key, std::string_view value) {
  const std::string v = ToLower(Trim(value));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + std::string(value) + "'");
}

double RealValue(const std::string &key, std::string_view value) {
  try {
    return ParseReal(value);
  } catch (const Error &) {
    throw ConfigError(key + ": '" + std::string(value) + "' is not a number");
  }
}

long long IntValue(const std::string &key, std::string_view value) {
  try {
    return ParseInt(value);
  } catch (const Error &) {
    throw ConfigError(key + ": '" + std::string(value) + "' is not an integer");
  }
}

std::string Resolve(const fs::path &base, std::string_view value) {
  fs::path p{std::string(Trim(value))};
  if (p.is_relative()) p = base / p;
  return p.lexically_normal().string();
}

bool ValidSetName(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

void ApplyFeatureField(FeatureSetDecl &d, const std::string &field, const std::string &key,
                       const std::string &value, const fs::path &base) {
  if (field == "recipe") {
    if (value == "file") d.recipe = Recipe::kFile;
    else if (value == "boaw") d.recipe = Recipe::kBoaw;
    else if (value == "melstats") d.recipe = Recipe::kMelStats;
    else if (value == "text") d.recipe = Recipe::kText;
    else throw ConfigError(key + ": unknown recipe '" + value + "'");
  } else if (field == "path") {
    d.path = Resolve(base, value);
  } else if (field == "modality") {
    d.modality = ParseModality(value);
  } else if (field == "N") {
    d.boaw.size_n = static_cast<std::size_t>(IntValue(key, value));
  } else if (field == "assignments") {
    d.boaw.assignments = static_cast<std::size_t>(IntValue(key, value));
  } else if (field == "standardize") {
    d.boaw.standardize = ParseBool(key, value);
  } else if (field == "window_ms") {
    d.spectrogram.window_ms = RealValue(key, value);
  } else if (field == "hop_ms") {
    d.spectrogram.hop_ms = RealValue(key, value);
  } else if (field == "mel_bands") {
    d.spectrogram.mel_bands = static_cast<int>(IntValue(key, value));
  } else if (field == "lld_mel_bands") {
    d.spectrogram.lld_mel_bands = static_cast<int>(IntValue(key, value));
  } else if (field == "clip_db") {
    d.spectrogram.clip_db_threshold = RealValue(key, value);
  } else if (field == "source") {
    d.source = TranscriptSource::Parse(value);
  } else if (field == "hash_dim") {
    d.text.hash_dim = static_cast<std::size_t>(IntValue(key, value));
  } else if (field == "ngram_max") {
    d.text.ngram_max = static_cast<int>(IntValue(key, value));
  } else if (field == "idf_smoothing") {
    d.text.idf_smoothing = RealValue(key, value);
  } else if (field == "lowercase") {
    d.text.lowercase = ParseBool(key, value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig ParseRunConfig(std::string_view text, const std::string &config_path) {
  RunConfig cfg;
  cfg.config_path = config_path;
  const fs::path base = fs::path(config_path).parent_path();
  std::map<std::string, FeatureSetDecl> decls;
  std::set<int> train{1, 2, 3}, dev{4}, test{5};
  std::set<std::string> declared_recipe;

  std::size_t ln = 0;
  for (const std::string &raw : SplitFields(text, '\n')) {
    ++ln;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(ln) + ": expected 'key = value'");
    const std::string key(Trim(line.substr(0, eq)));
    const std::string value(Trim(line.substr(eq + 1)));
    if (cfg.entries.count(key))
      throw ConfigError("line " + std::to_string(ln) + ": duplicate key '" + key + "'");
    cfg.entries[key] = value;

    try {
      if (key == "manifest") {
        cfg.manifest_path = Resolve(base, value);
      } else if (key == "out") {
        cfg.out_dir = Resolve(base, value);
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(IntValue(key, value));
      } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(IntValue(key, value));
      } else if (key == "split.train") {
        train = ParseIntSet(key, value);
      } else if (key == "split.dev") {
        dev = ParseIntSet(key, value);
      } else if (key == "split.test") {
        test = ParseIntSet(key, value);
      } else if (key == "svm.grid") {
        cfg.svm_grid = ParseRealList(key, value);
      } else if (key == "svm.tolerance") {
        cfg.svm.tolerance = RealValue(key, value);
      } else if (key == "svm.max_epochs") {
        cfg.svm.max_epochs = static_cast<int>(IntValue(key, value));
      } else if (key == "fusion.groups") {
        cfg.fusion_groups.clear();
        for (const std::string &spec : SplitFields(value, ';'))
          if (!Trim(spec).empty()) cfg.fusion_groups.push_back(GroupFilter::Parse(spec));
      } else if (key == "fusion.dump") {
        cfg.fusion_dump = ParseBool(key, value);
      } else if (key == "wer.sources") {
        for (const std::string &s : SplitFields(value, ','))
          if (!Trim(s).empty()) cfg.wer_sources.emplace_back(Trim(s));
      } else if (key == "sweep.rates") {
        cfg.sweep_rates = ParseRealList(key, value);
      } else if (key == "sweep.hash_dim") {
        cfg.sweep_text.hash_dim = static_cast<std::size_t>(IntValue(key, value));
      } else if (key == "sweep.ngram_max") {
        cfg.sweep_text.ngram_max = static_cast<int>(IntValue(key, value));
      } else if (key == "corruption.p_sub") {
        cfg.corruption.p_sub = RealValue(key, value);
      } else if (key == "corruption.p_del") {
        cfg.corruption.p_del = RealValue(key, value);
      } else if (key == "corruption.p_ins") {
        cfg.corruption.p_ins = RealValue(key, value);
      } else if (key.starts_with("featureset.")) {
        const std::string rest = key.substr(11);
        const std::size_t dot = rest.find('.');
        if (dot == std::string::npos) throw ConfigError("malformed key '" + key + "'");
        const std::string name = rest.substr(0, dot), field = rest.substr(dot + 1);
        if (!ValidSetName(name))
          throw ConfigError("feature set name '" + name + "' must be [A-Za-z0-9_-]+");
        FeatureSetDecl &d = decls[name];
        d.name = name;
        if (field == "recipe") declared_recipe.insert(name);
        ApplyFeatureField(d, field, key, value, base);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const Error &e) {
      if (e.code() == Errc::kConfig) throw;
      throw ConfigError(key + ": " + e.what());
    }
  }

  try {
    cfg.split_rule = SplitRule(train, dev, test);
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
  if (cfg.manifest_path.empty()) throw ConfigError("'manifest' is required");
  if (!fs::exists(cfg.manifest_path))
    throw ConfigError("manifest '" + cfg.manifest_path + "' does not exist");
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.svm_grid.empty()) throw ConfigError("svm.grid is empty");
  for (double c : cfg.svm_grid)
    if (!(c > 0.0)) throw ConfigError("svm.grid values must be positive");
  for (auto &[name, d] : decls) {
    if (!declared_recipe.count(name))
      throw ConfigError("feature set '" + name + "' has no recipe");
    try {
      switch (d.recipe) {
        case Recipe::kFile:
          if (d.path.empty()) throw ConfigError("feature set '" + name + "' needs a path");
          if (!fs::exists(d.path))
            throw ConfigError("feature set '" + name + "': file '" + d.path +
                              "' does not exist");
          break;
        case Recipe::kBoaw:
        case Recipe::kMelStats:
          d.spectrogram.Validate();
          if (d.boaw.size_n < 1 || d.boaw.assignments < 1 ||
              d.boaw.assignments > d.boaw.size_n)
            throw ConfigError("feature set '" + name + "': need 1 <= assignments <= N");
          break;
        case Recipe::kText:
          d.text.Validate();
          break;
      }
    } catch (const Error &e) {
      if (e.code() == Errc::kConfig) throw;
      throw ConfigError("feature set '" + name + "': " + e.what());
    }
    cfg.feature_sets.push_back(d);
  }
  try {
    cfg.sweep_text.Validate();
    CorruptionPlan probe = cfg.corruption;
    probe.target_rate = 0.0;
    probe.Validate();
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
  for (double r : cfg.sweep_rates)
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("sweep.rates must lie in [0, 1]");
  return cfg;
}

RunConfig LoadRunConfig(const std::string &path) {
  if (!fs::exists(path)) throw ConfigError("config file '" + path + "' does not exist");
  return ParseRunConfig(ReadFile(path), path);
}

std::string ConfigHash(const RunConfig &config) {
  std::string canon;
  for (const auto &[key, value] : config.entries) {
    if (key.starts_with("fusion.") || key.starts_with("wer.") ||
        key.starts_with("sweep.") || key.starts_with("corruption.") || key == "out" ||
        key == "jobs" || key == "seed")
      continue;
    canon += key + '=' + value + '\n';
  }
  canon += "seed=" + std::to_string(config.seed) + '\n';
  canon += "manifest_bytes=" + HexDigest(Fnv1a64(ReadFile(config.manifest_path))) + '\n';
  for (const FeatureSetDecl &d : config.feature_sets)
    if (d.recipe == Recipe::kFile)
      canon += d.name + "_bytes=" + HexDigest(Fnv1a64(ReadFile(d.path))) + '\n';
  return HexDigest(Fnv1a64(canon));
}

std::vector<double> MelStats(const MelSpectrogram &spectrogram) {
  const Matrix &m = spectrogram.frames;
  std::vector<double> out(2 * m.cols(), 0.0);
  if (m.rows() == 0) return out;
  const double n = static_cast<double>(m.rows());
  for (std::size_t b = 0; b < m.cols(); ++b) {
    double sum = 0.0;
    for (std::size_t t = 0; t < m.rows(); ++t) sum += m(t, b);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t t = 0; t < m.rows(); ++t) ss += (m(t, b) - mean) * (m(t, b) - mean);
    out[b] = mean;
    out[m.cols() + b] = std::sqrt(ss / n);
  }
  return out;
}

namespace {

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> Spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const std::vector<double> ra = AverageRanks(a), rb = AverageRanks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return std::nullopt;
  return cov / std::sqrt(va * vb);
}

SweepReport RunCorruptionSweep(const Manifest &manifest, std::span<const double> rates,
                               const CorruptionPlan &mix, const TextFeatConfig &text,
                               std::span<const double> grid, const SvmTrainOptions &svm,
                               std::uint64_t seed, int jobs) {
  SweepReport report;
  CorruptionPlan plan = mix;
  plan.vocabulary = CorpusVocabulary(manifest);
  plan.seed = seed;
  const std::vector<std::string> dev = SplitIds(manifest, Split::kDev);
  const std::vector<std::string> test = SplitIds(manifest, Split::kTest);
  SvmTrainOptions options = svm;
  options.seed = seed;
  for (double rate : rates) {
    plan.target_rate = rate;
    const std::vector<std::string> hyps = CorruptCorpus(manifest, plan);
    SweepRow row;
    row.rate = rate;
    row.measured = CorpusErrorRatesFor(manifest, hyps);
    TextFeatures tf = FitTextFeatures(manifest, hyps, Modality::kAsrText, "sweep", text);
    Selection sel = SelectC(tf.features, manifest, grid, options, jobs);
    row.c = sel.chosen().c;
    row.dev_uar = sel.chosen().dev_uar;
    if (!test.empty()) {
      PredictionTable t = Predict(sel.chosen().model, sel.standardizer, tf.features, test);
      row.test_uar = Uar(Confusion(t, manifest, test));
    }
    report.rows.push_back(std::move(row));
  }
  std::vector<double> wer, uar;
  for (const SweepRow &r : report.rows) {
    wer.push_back(r.measured.wer);
    uar.push_back(r.dev_uar);
  }
  report.spearman = Spearman(wer, uar);
  return report;
}

std::string FormatSweepReport(const SweepReport &report) {
  std::string out = "Rate\tWER%\tCER%\tC\tDev UAR%\tTest UAR%\n";
  char buf[128];
  for (const SweepRow &r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.2f\t%.2f\t%.2f\t", r.rate, 100.0 * r.measured.wer,
                  100.0 * r.measured.cer);
    out += buf + FormatReal(r.c) + '\t' + FormatPercent(r.dev_uar) + '\t' +
           (r.test_uar ? FormatPercent(*r.test_uar) : std::string("-")) + '\n';
  }
  if (report.spearman) {
    std::snprintf(buf, sizeof(buf), "%.4f", *report.spearman);
    out += std::string("spearman(WER, Dev UAR)\t") + buf + '\n';
  } else {
    out += "spearman(WER, Dev UAR)\tundefined\n";
  }
  return out;
}

Pipeline::Pipeline(RunConfig config, std::ostream &log)
    : config_(std::move(config)), log_(log) {
  manifest_ = LoadManifest(config_.manifest_path, config_.split_rule);
}

std::string Pipeline::FeaturePath(const FeatureSetDecl &decl) const {
  if (decl.recipe == Recipe::kFile) return decl.path;
  return (fs::path(config_.out_dir) / "features" / (decl.name + ".tsv")).string();
}

std::string Pipeline::CacheDir() const {
  return (fs::path(config_.out_dir) / "cache" / ConfigHash(config_)).string();
}

std::string Pipeline::ReportPath(const std::string &file) const {
  return (fs::path(config_.out_dir) / "reports" / file).string();
}

void Pipeline::WriteReport(const std::string &file, const std::string &text) {
  WriteFile(ReportPath(file), text);
}

void Pipeline::AppendRunLog(const std::string &command,
                            const std::vector<std::string> &artifacts) {
  std::string entry = "serbench " + command + " config_hash=" + ConfigHash(config_) +
                      " seed=" + std::to_string(config_.seed) + '\n';
  for (const std::string &a : artifacts)
    entry += "  " + fs::relative(a, config_.out_dir).string() + " fnv1a64=" +
             HexDigest(Fnv1a64(ReadFile(a))) + '\n';
  const std::string path = (fs::path(config_.out_dir) / "run.log").string();
  std::string existing = fs::exists(path) ? ReadFile(path) : std::string();
  WriteFile(path, existing + entry);
}

namespace {

Waveform AudioFor(const Utterance &u) {
  if (!u.audio_path)
    throw Error(Errc::kInvalidValue, "utterance '" + u.id + "' has no audio_path");
  return ReadWaveform(*u.audio_path);
}

}  // namespace

std::vector<std::string> Pipeline::Extract() {
  std::vector<std::string> written;
  int recipes = 0;
  for (const FeatureSetDecl &decl : config_.feature_sets) {
    if (decl.recipe == Recipe::kFile) continue;
    ++recipes;
    const std::string path = FeaturePath(decl);
    try {
      if (decl.recipe == Recipe::kText) {
        TextFeatures tf = FitTextFeatures(manifest_, decl.source, decl.name, decl.text);
        if (!tf.empty_ids.empty())
          log_ << "note: feature set '" << decl.name << "': " << tf.empty_ids.size()
               << " empty transcript(s), first '" << tf.empty_ids.front() << "'\n";
        WriteFeatureSet(path, tf.features);
      } else if (decl.recipe == Recipe::kMelStats) {
        Matrix values(manifest_.size(), 2 * static_cast<std::size_t>(decl.spectrogram.mel_bands));
        ParallelFor(manifest_.size(), config_.jobs, [&](std::size_t i) {
          std::vector<double> stats =
              MelStats(ComputeMelSpectrogram(AudioFor(manifest_[i]), decl.spectrogram));
          std::copy(stats.begin(), stats.end(), values.row(i).begin());
        });
        std::vector<std::string> ids;
        for (const Utterance &u : manifest_.utterances()) ids.push_back(u.id);
        WriteFeatureSet(path, FeatureSet(decl.name, Modality::kAudio, ids, std::move(values)));
      } else {
        std::vector<LLDFrameSequence> llds(manifest_.size());
        ParallelFor(manifest_.size(), config_.jobs, [&](std::size_t i) {
          llds[i] = ExtractLlds(AudioFor(manifest_[i]), decl.spectrogram);
        });
        BoawConfig bc = decl.boaw;
        bc.seed = config_.seed;
        BoawResult r = BoawFeatures(
            manifest_,
            [&](const Utterance &u) { return llds[manifest_.IndexOf(u.id)]; }, bc, decl.name);
        WriteFeatureSet(path, r.features);
        const std::string stem = (fs::path(path).parent_path() / decl.name).string();
        WriteFile(stem + ".llds.codebook", SerializeCodebook(r.lld_codebook));
        WriteFile(stem + ".deltas.codebook", SerializeCodebook(r.delta_codebook));
        written.push_back(stem + ".llds.codebook");
        written.push_back(stem + ".deltas.codebook");
      }
    } catch (const Error &e) {
      throw Error(e.code(), "feature set '" + decl.name + "': " + e.what());
    }
    written.push_back(path);
    log_ << "extracted " << decl.name << " -> " << path << '\n';
  }
  if (recipes == 0) log_ << "notice: no internal feature recipes declared; nothing to extract\n";
  AppendRunLog("extract", written);
  return written;
}

FeatureSet Pipeline::LoadDeclared(const FeatureSetDecl &decl) const {
  const std::string path = FeaturePath(decl);
  try {
    if (!fs::exists(path))
      throw Error(Errc::kIo, "feature file '" + path + "' not found" +
                                 (decl.recipe == Recipe::kFile
                                      ? std::string()
                                      : std::string("; run `serbench extract` first")));
    FeatureSet loaded = decl.modality ? IngestEmbeddings(path, manifest_, *decl.modality)
                                      : LoadFeatureSet(path, manifest_);
    if (loaded.name() == decl.name) return loaded;
    return FeatureSet(decl.name, loaded.modality(), loaded.ids(), loaded.values());
  } catch (const Error &e) {
    throw Error(e.code(), "feature set '" + decl.name + "': " + e.what());
  }
}

namespace {

std::string CacheFile(const std::string &dir, const std::string &name, double c,
                      Split split) {
  return (fs::path(dir) / name / ("C=" + FormatReal(c) + "." + std::string(SplitName(split)) +
                                  ".tsv"))
      .string();
}

}  // namespace

std::string Pipeline::Evaluate() {
  if (config_.feature_sets.empty())
    throw Error(Errc::kConfig, "config: no feature sets declared");
  const std::string cache = CacheDir();
  const std::vector<std::string> dev = SplitIds(manifest_, Split::kDev);
  const std::vector<std::string> test = SplitIds(manifest_, Split::kTest);
  SvmTrainOptions options = config_.svm;
  options.seed = config_.seed;

  std::string report = "FeatureSet\tModality\tDim\tC\tDev\tTest\n";
  std::string selected;
  std::vector<std::string> artifacts;
  for (const FeatureSetDecl &decl : config_.feature_sets) {
    FeatureSet features = LoadDeclared(decl);
    Selection sel;
    try {
      sel = SelectC(features, manifest_, config_.svm_grid, options, config_.jobs);
    } catch (const Error &e) {
      throw Error(e.code(), "feature set '" + decl.name + "': " + e.what());
    }
    for (const GridPoint &pt : sel.grid) {
      const std::string dev_path = CacheFile(cache, decl.name, pt.c, Split::kDev);
      const std::string test_path = CacheFile(cache, decl.name, pt.c, Split::kTest);
      WriteFile(dev_path, SerializePredictions(Predict(pt.model, sel.standardizer, features, dev)));
      WriteFile(test_path,
                SerializePredictions(Predict(pt.model, sel.standardizer, features, test)));
    }
    const GridPoint &best = sel.chosen();
    WriteFile((fs::path(cache) / decl.name / "model.txt").string(),
              SerializeModel(best.model, sel.standardizer));
    std::string test_cell = "-";
    if (!test.empty()) {
      PredictionTable t = ParsePredictions(ReadFile(CacheFile(cache, decl.name, best.c, Split::kTest)));
      test_cell = FormatPercent(Uar(Confusion(t, manifest_, test)));
    }
    report += decl.name + '\t' + std::string(ModalityName(features.modality())) + '\t' +
              std::to_string(features.dim()) + '\t' + FormatReal(best.c) + '\t' +
              FormatPercent(best.dev_uar) + '\t' + test_cell + '\n';
    selected += decl.name + '\t' + std::string(ModalityName(features.modality())) + '\t' +
                FormatReal(best.c) + '\t' + FormatReal(best.dev_uar) + '\n';
    log_ << "evaluated " << decl.name << " (C=" << FormatReal(best.c)
         << ", dev UAR " << FormatPercent(best.dev_uar) << "%)\n";
  }
  const std::string selected_path = (fs::path(cache) / "selected.tsv").string();
  WriteFile(selected_path, selected);
  WriteReport("evaluate.tsv", report);
  artifacts.push_back(selected_path);
  artifacts.push_back(ReportPath("evaluate.tsv"));
  AppendRunLog("evaluate", artifacts);
  return report;
}

std::string Pipeline::Wer() {
  std::vector<std::string> sources = config_.wer_sources;
  if (sources.empty()) {
    std::set<std::string> systems;
    for (const Utterance &u : manifest_.utterances())
      for (const auto &[name, text] : u.asr_transcripts) systems.insert(name);
    sources.push_back("gold");
    for (const std::string &s : systems) sources.push_back("asr:" + s);
  }
  std::vector<ErrorRateRow> rows;
  for (const std::string &source : sources) {
    ErrorRateRow row;
    row.setup = source;
    if (source == "gold") {
      row.rates = CorpusErrorRatesFor(manifest_, TranscriptSource::Gold());
    } else if (source.starts_with("asr:")) {
      const std::string system = source.substr(4);
      bool known = false;
      for (const Utterance &u : manifest_.utterances())
        known = known || u.asr_transcripts.count(system) > 0;
      if (!known)
        throw Error(Errc::kConfig, "wer: unknown transcript source '" + source + "'");
      row.rates = CorpusErrorRatesFor(manifest_, TranscriptSource::Asr(system));
    } else if (source.starts_with("corrupt:")) {
      CorruptionPlan plan = config_.corruption;
      plan.target_rate = RealValue("wer.sources", source.substr(8));
      plan.seed = config_.seed;
      plan.vocabulary = CorpusVocabulary(manifest_);
      try {
        plan.Validate();
      } catch (const Error &e) {
        throw Error(Errc::kConfig, "wer: source '" + source + "': " + e.what());
      }
      row.rates = CorpusErrorRatesFor(manifest_, CorruptCorpus(manifest_, plan));
    } else {
      throw Error(Errc::kConfig, "wer: unknown transcript source '" + source + "'");
    }
    rows.push_back(std::move(row));
  }
  const std::string report = FormatErrorRateTable(rows);
  WriteReport("wer.tsv", report);
  AppendRunLog("wer", {ReportPath("wer.tsv")});
  return report;
}

std::string Pipeline::CorruptSweep() {
  std::vector<double> rates = config_.sweep_rates;
  if (rates.empty()) rates = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  SweepReport sweep =
      RunCorruptionSweep(manifest_, rates, config_.corruption, config_.sweep_text,
                         config_.svm_grid, config_.svm, config_.seed, config_.jobs);
  const std::string report = FormatSweepReport(sweep);
  WriteReport("sweep.tsv", report);
  AppendRunLog("corrupt-sweep", {ReportPath("sweep.tsv")});
  return report;
}

std::string Pipeline::Fuse() {
  const std::string cache = CacheDir();
  const std::string selected_path = (fs::path(cache) / "selected.tsv").string();
  if (!fs::exists(selected_path))
    throw Error(Errc::kMissingCache,
                "no prediction cache for this configuration (expected '" + selected_path +
                    "'); run `serbench evaluate` with the same config and seed first");
  std::map<std::string, CachedSet> sets;
  for (const std::string &line : SplitFields(ReadFile(selected_path), '\n')) {
    if (Trim(line).empty()) continue;
    std::vector<std::string> f = SplitFields(line, '\t');
    if (f.size() != 4) throw Error(Errc::kParse, "malformed cache index '" + selected_path + "'");
    CachedSet cs;
    cs.modality = ParseModality(f[1]);
    const double c = ParseReal(f[2]);
    cs.tables.dev = ParsePredictions(ReadFile(CacheFile(cache, f[0], c, Split::kDev)));
    cs.tables.test = ParsePredictions(ReadFile(CacheFile(cache, f[0], c, Split::kTest)));
    sets.emplace(f[0], std::move(cs));
  }

  std::vector<FusionSummary> summaries;
  std::vector<std::string> artifacts;
  for (const GroupFilter &filter : config_.fusion_groups) {
    bool any = false;
    for (const auto &[name, set] : sets) any = any || filter.modalities.count(set.modality);
    if (!any) {
      FusionSummary empty;
      empty.label = filter.label;
      summaries.push_back(empty);
      continue;
    }
    FusionSearchResult r = FusionSearch(sets, filter, manifest_, config_.jobs);
    summaries.push_back(r.summary);
    if (config_.fusion_dump) {
      std::string slug;
      for (char ch : filter.label)
        slug += std::isalnum(static_cast<unsigned char>(ch)) ? static_cast<char>(std::tolower(ch)) : '_';
      const std::string path = ReportPath("fusion/" + slug + ".tsv");
      WriteFile(path, FormatFusionResults(r.results));
      artifacts.push_back(path);
    }
  }
  const std::string table = FormatFusionTable(summaries);
  WriteReport("fusion.tsv", table);
  WriteReport("fusion.kv", FormatFusionRecords(summaries));
  artifacts.push_back(ReportPath("fusion.tsv"));
  artifacts.push_back(ReportPath("fusion.kv"));
  AppendRunLog("fuse", artifacts);
  return table;
}

std::string Pipeline::Report() {
  std::string out;
  for (const char *name : {"evaluate.tsv", "wer.tsv", "sweep.tsv", "fusion.tsv"}) {
    const std::string path = ReportPath(name);
    if (!fs::exists(path)) continue;
    out += std::string("== ") + name + " ==\n" + ReadFile(path) + '\n';
  }
  if (out.empty()) out = "no reports found under '" + ReportPath("") + "'\n";
  else WriteReport("summary.txt", out);
  return out;
}

}  // namespace serbench
