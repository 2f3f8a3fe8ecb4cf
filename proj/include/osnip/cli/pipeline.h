// Copyright 2026 The OSNIP Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subcommands. Each reads its inputs from and writes its artifacts to the
// output directory, then records input and output hashes in manifest.json.

#ifndef OSNIP_CLI_PIPELINE_H_
#define OSNIP_CLI_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "osnip/cli/config.h"

namespace osnip::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitIo = 4,
  kExitInternal = 5,
};

struct CommandOptions {
  std::string config = "default";
  std::optional<uint64_t> seed;
  std::string out = "out";
  std::optional<int> threads;
  // attack: any of these selects a subset; none runs all.
  bool knn = false;
  bool vocab = false;
  bool adaptive = false;
  // sweep: the cosine sweep always runs; these add the training sweeps.
  bool dims = false;
  bool pareto = false;
};

const std::vector<std::string>& Subcommands();

// Resolves the configuration (file, then --seed and --threads overrides).
RunConfig ResolveOptions(const CommandOptions& opt);

// Throws the library's error types.
void Execute(const std::string& command, const RunConfig& cfg, const CommandOptions& opt);

// Execute with errors mapped to exit codes and reported on the log.
int RunCommand(const std::string& command, const CommandOptions& opt);

// Exit code for the exception currently being handled.
int ExitCodeForCurrentException();

std::string VersionString();

}  // namespace osnip::cli

#endif  // OSNIP_CLI_PIPELINE_H_
