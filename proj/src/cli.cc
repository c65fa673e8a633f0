// serbench/cli.cc

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

#include "serbench/cli.h"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "serbench/pipeline.h"
#include "serbench/synth.h"

namespace serbench {

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> jobs;
  int per_class = 6;
};

RunConfig Resolve(const Options &opt) {
  if (opt.config.empty())
    throw Error(Errc::kConfig, "--config is required for this command");
  RunConfig cfg = LoadRunConfig(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.jobs) {
    if (*opt.jobs < 1) throw Error(Errc::kConfig, "--jobs must be >= 1");
    cfg.jobs = *opt.jobs;
  }
  if (!opt.out.empty()) {
    cfg.out_dir = opt.out;
  } else if (const char *env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    cfg.out_dir = env;
  }
  return cfg;
}

int Dispatch(const std::string &command, const Options &opt, std::ostream &out,
             std::ostream &err) {
  if (command == "synth") {
    if (opt.out.empty()) throw Error(Errc::kConfig, "synth needs --out <dir>");
    synth::DemoOptions demo;
    demo.seed = opt.seed.value_or(1);
    demo.per_class_per_session = opt.per_class;
    if (demo.per_class_per_session < 1)
      throw Error(Errc::kConfig, "--per-class must be >= 1");
    synth::WriteDemoCorpus(opt.out, demo);
    err << "wrote demo project to " << opt.out << " (config: "
        << (std::filesystem::path(opt.out) / "serbench.cfg").string() << ")\n";
    return 0;
  }
  Pipeline pipeline(Resolve(opt), err);
  if (command == "extract") {
    for (const std::string &path : pipeline.Extract()) out << path << '\n';
  } else if (command == "evaluate") {
    out << pipeline.Evaluate();
  } else if (command == "wer") {
    out << pipeline.Wer();
  } else if (command == "corrupt-sweep") {
    out << pipeline.CorruptSweep();
  } else if (command == "fuse") {
    out << pipeline.Fuse();
  } else {
    out << pipeline.Report();
  }
  return 0;
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"serbench: speech emotion recognition benchmark harness"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  int jobs = 1;

  const std::pair<const char *, const char *> commands[] = {
      {"extract", "compute feature files for every internal recipe"},
      {"evaluate", "train per-feature-set SVMs and write the prediction cache"},
      {"wer", "score transcript sources against the gold transcripts"},
      {"corrupt-sweep", "text-feature UAR as a function of simulated WER"},
      {"fuse", "majority-vote fusion over cached predictions"},
      {"report", "collect the existing reports into one summary"},
      {"synth", "write a self-contained synthetic demo project"},
  };
  for (const auto &[name, help] : commands) {
    CLI::App *sub = app.add_subcommand(name, help);
    if (std::string(name) != "synth") sub->add_option("--config", opt.config, "run config");
    sub->add_option("--seed", seed, "global seed (overrides the config)");
    sub->add_option("--out", opt.out, "output directory (overrides the config and $" +
                                          std::string(kOutDirEnv) + ")");
    if (std::string(name) == "synth")
      sub->add_option("--per-class", opt.per_class, "utterances per class and session");
    else
      sub->add_option("--jobs", jobs, "worker threads");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  const CLI::App *sub = app.get_subcommands().front();
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->get_option_no_throw("--jobs") && sub->count("--jobs")) opt.jobs = jobs;
  try {
    return Dispatch(sub->get_name(), opt, out, err);
  } catch (const Error &e) {
    err << "serbench " << sub->get_name() << ": error: " << e.what() << '\n';
    return e.IsValidation() ? 1 : 2;
  } catch (const std::exception &e) {
    err << "serbench " << sub->get_name() << ": error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace serbench
