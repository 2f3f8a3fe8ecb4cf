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

#include <gtest/gtest.h>

#include <filesystem>

#include "json.hpp"
#include "osnip/cli/config.h"
#include "osnip/cli/pipeline.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"

namespace osnip::cli {
namespace {

namespace fs = std::filesystem;

const char* kSmall =
    "[run]\nseed = 5\n"
    "[corpus]\nsequences = 200\n"
    "[predictor]\nsteps = 50\n"
    "[train]\nsteps = 0\n"
    "[eval]\nsequences = 10\nreplicas = 2\nvocab_sequences = 3\ntrajectory_prompts = 4\ngenerate = 3\n";

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("osnip_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(ConfigTest, DefaultsRoundTrip) {
  RunConfig c = LoadConfig("default");
  c.Resolve();
  const std::string text = ResolvedConfigText(c);
  RunConfig back = ParseConfig(text);
  back.Resolve();
  EXPECT_EQ(ResolvedConfigText(back), text);
  EXPECT_EQ(c.train.steps, 3000);
  EXPECT_EQ(c.geometry.dims, (std::vector<int64_t>{8, 16, 64, 256, 1024}));
}

TEST(ConfigTest, OverridesAndPropagation) {
  RunConfig c = ParseConfig("[run]\nseed = 9\n[predictor]\nembed_dim = 32\n");
  c.Resolve();
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.encryptor.dim, 32);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.predictor.vocab_size, c.corpus.vocab_size);
}

TEST(ConfigTest, RejectsUnknownAndInvalid) {
  EXPECT_THROW(ParseConfig("[train]\nstepz = 3\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[nosuch]\nx = 1\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[train]\nsteps = many\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[curriculum]\ntau_low = 0.9\ntau_high = 0.1\n").Resolve(), ConfigError);
  EXPECT_THROW(LoadConfig("/nonexistent/osnip.ini"), IoError);
}

TEST(ConfigTest, EveryKeyDocumented) {
  const std::vector<ConfigKey> keys = ConfigSchema();
  EXPECT_GT(keys.size(), 40u);
  for (const ConfigKey& k : keys) {
    EXPECT_FALSE(k.doc.empty()) << k.name;
    EXPECT_NE(k.name.find('.'), std::string::npos) << k.name;
  }
}

TEST(PipelineTest, IdentityEncryptorKnnIsFullyRecoveredAndRunsAreIdentical) {
  const fs::path dir = Scratch("pipeline");
  WriteFile((dir / "small.ini").string(), kSmall);
  std::vector<std::string> runs;
  for (const char* name : {"a", "b"}) {
    CommandOptions opt;
    opt.config = (dir / "small.ini").string();
    opt.out = (dir / name).string();
    const RunConfig cfg = ResolveOptions(opt);
    for (const char* cmd : {"gen-corpus", "train-predictor", "train-encryptor"}) Execute(cmd, cfg, opt);
    opt.knn = true;
    Execute("attack", cfg, opt);
    Execute("report", cfg, opt);
    runs.push_back(opt.out);
  }
  const auto attacks = nlohmann::json::parse(ReadFile(runs[0] + "/attacks.json"));
  ASSERT_EQ(attacks["reports"].size(), 1u);
  EXPECT_EQ(attacks["reports"][0]["model"], "identity");
  EXPECT_EQ(attacks["reports"][0]["asr"]["1"].get<double>(), 1.0);
  for (const auto& e : fs::directory_iterator(runs[0])) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    EXPECT_EQ(ReadFile(e.path().string()), ReadFile(runs[1] + "/" + name)) << name;
  }
  EXPECT_EQ(ReadFile(runs[0] + "/checkpoints/encryptor.ckpt"), ReadFile(runs[1] + "/checkpoints/encryptor.ckpt"));
  const auto manifest = nlohmann::json::parse(ReadFile(runs[0] + "/manifest.json"));
  for (const char* cmd : {"gen-corpus", "train-predictor", "train-encryptor", "attack", "report"}) {
    EXPECT_TRUE(manifest["commands"].contains(cmd)) << cmd;
  }
  EXPECT_TRUE(manifest["commands"]["attack"]["inputs"].contains("corpus.jsonl"));
  EXPECT_TRUE(fs::exists(runs[0] + "/config.resolved"));
  fs::remove_all(dir);
}

TEST(PipelineTest, ErrorsMapToExitCodes) {
  const fs::path dir = Scratch("exit");
  CommandOptions opt;
  opt.out = (dir / "empty").string();
  EXPECT_EQ(RunCommand("attack", opt), kExitIo);
  WriteFile((dir / "bad.ini").string(), "[train]\nbogus = 1\n");
  opt.config = (dir / "bad.ini").string();
  EXPECT_EQ(RunCommand("gen-corpus", opt), kExitConfig);
  opt.config = "default";
  EXPECT_EQ(RunCommand("frobnicate", opt), kExitConfig);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace osnip::cli
