// serbench/cli.h

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

#ifndef SERBENCH_CLI_H_
#define SERBENCH_CLI_H_

#include <iosfwd>

namespace serbench {

// Environment variable that overrides the config's output directory (but
// not an explicit --out).
inline constexpr const char *kOutDirEnv = "SERBENCH_OUT";

/// Runs one subcommand. Reports go to `out`, diagnostics to `err`.
/// Returns 0 on success, 1 on a validation error (bad config, malformed
/// input files, bad arguments), 2 on any other failure.
int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace serbench

#endif  // SERBENCH_CLI_H_
