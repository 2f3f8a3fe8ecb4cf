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

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "osnip/cli/pipeline.h"

namespace {

void SetupLogging() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("osnip"));
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* lvl = std::getenv("OSNIP_LOG_LEVEL")) {
    const auto parsed = spdlog::level::from_str(lvl);
    if (parsed == spdlog::level::off && std::string(lvl) != "off") {
      spdlog::warn("unknown OSNIP_LOG_LEVEL '{}', using info", lvl);
    } else {
      spdlog::set_level(parsed);
    }
  }
}

void AddCommon(CLI::App* sub, osnip::cli::CommandOptions& opt) {
  sub->add_option("--config", opt.config, "INI file, or 'default'");
  sub->add_option("--seed", opt.seed, "override run.seed");
  sub->add_option("--out", opt.out, "output directory");
  sub->add_option("--threads", opt.threads, "worker cap, 0 = hardware")->check(CLI::NonNegativeNumber);
}

const char* Describe(const std::string& name) {
  static const std::map<std::string, const char*> kText = {
      {"geometry-verify", "check sphere band, MGF and coverage bounds"},
      {"gen-corpus", "write the synthetic corpus"},
      {"train-predictor", "train and freeze the toy predictor"},
      {"train-encryptor", "train the key-conditioned encryptor"},
      {"attack", "run inversion attacks on encrypted test prompts"},
      {"evaluate", "utility, layer trajectory and noise control"},
      {"sweep", "cosine, dimension and Pareto sweeps"},
      {"report", "collect outputs into report.json"},
      {"all", "corpus through report in one go"},
  };
  const auto it = kText.find(name);
  return it == kText.end() ? "" : it->second;
}

}  // namespace

int main(int argc, char** argv) {
  SetupLogging();
  CLI::App app{"osnip: embedding encryption experiments on a toy predictor"};
  app.set_version_flag("--version", osnip::cli::VersionString());
  app.require_subcommand(1);

  osnip::cli::CommandOptions opt;
  bool print_config = false;
  for (const std::string& name : osnip::cli::Subcommands()) {
    CLI::App* sub = app.add_subcommand(name, Describe(name));
    AddCommon(sub, opt);
    if (name == "attack") {
      sub->add_flag("--knn", opt.knn, "nearest-neighbour inversion");
      sub->add_flag("--vocab", opt.vocab, "vocabulary matching");
      sub->add_flag("--adaptive", opt.adaptive, "key guessing attacker");
    } else if (name == "sweep") {
      sub->add_flag("--dims", opt.dims, "train one encryptor per dimension");
      sub->add_flag("--pareto", opt.pareto, "train the lambda1 x eps grid");
    }
  }
  CLI::App* show = app.add_subcommand("show-config", "print the resolved configuration");
  AddCommon(show, opt);
  show->callback([&] { print_config = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : osnip::cli::kExitUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  if (print_config) {
    try {
      std::cout << osnip::cli::ResolvedConfigText(osnip::cli::ResolveOptions(opt));
      return osnip::cli::kExitOk;
    } catch (...) {
      return osnip::cli::ExitCodeForCurrentException();
    }
  }
  return osnip::cli::RunCommand(chosen->get_name(), opt);
}
