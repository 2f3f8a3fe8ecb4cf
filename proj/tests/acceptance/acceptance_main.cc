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

// Runs the default pipeline end to end and prints one PASS/FAIL line per
// acceptance criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../common/op_cases.h"
#include "CLI11.hpp"
#include "json.hpp"
#include "osnip/cli/pipeline.h"
#include "osnip/diffmath/container.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/evalsuite/stats.h"
#include "osnip/evalsuite/utility.h"
#include "osnip/geometry/coverage.h"
#include "osnip/geometry/sphere.h"
#include "osnip/objectives/curriculum.h"
#include "osnip/toylm/corpus.h"
#include "osnip/toylm/predictor.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace osnip;

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Outcome> g_outcomes;

double Seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void Report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  g_outcomes.push_back({id, name, pass, detail, seconds});
  std::printf("[%s] %d %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

json ReadJson(const fs::path& p) { return json::parse(ReadFile(p.string())); }

std::vector<std::vector<std::string>> ReadCsv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(ReadFile(p.string()));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

double AttackAsr(const json& attacks, const std::string& attack, int64_t layer, const std::string& k) {
  for (const json& r : attacks["reports"]) {
    if (r["attack"] == attack && r["layer"].get<int64_t>() == layer) return r["asr"][k].get<double>();
  }
  throw std::runtime_error("no " + attack + " report");
}

void BoundSuite(uint64_t seed) {
  const cli::RunConfig cfg = cli::LoadConfig("default");
  bool ok = true;
  int rows = 0;
  double worst_z = 0.0;
  const double s = Seconds([&] {
    for (int64_t d : cfg.geometry.dims) {
      const auto reps = geometry::McBandMass({d, 1.0}, cfg.geometry.eps, 1000000, Rng(seed).Split(100 + d));
      for (const auto& b : reps) {
        ok = ok && b.satisfied && b.agrees && b.mc_mass <= b.bound + 3.0 * b.std_err;
        if (b.std_err > 0.0) worst_z = std::max(worst_z, std::fabs(b.mc_mass - b.exact_mass) / b.std_err);
        ++rows;
      }
    }
  });
  ok = ok && rows == 20 && s < 120.0;
  Report(1, "concentration-bound suite", ok,
         std::to_string(rows) + " (d, eps) cells, worst |mc - exact| = " + Fmt("%.2f sigma", worst_z), s);
}

void MgfSuite(uint64_t seed) {
  bool ok = true;
  int n = 0;
  double worst = 0.0;
  const double s = Seconds([&] {
    for (int64_t dof : {1, 4, 63}) {
      for (const auto& m : geometry::GaussianMgfCheck({0.1, 0.5, 1.0}, dof, 1000000, Rng(seed).Split(200 + dof))) {
        ok = ok && m.residual < 5.0 * m.std_err;
        worst = std::max(worst, m.residual / m.std_err);
        ++n;
      }
    }
  });
  ok = ok && n == 9 && s < 30.0;
  Report(2, "gaussian MGF identity", ok, std::to_string(n) + " points, worst residual " + Fmt("%.2f sigma", worst), s);
}

void ExistenceCheck(const toylm::PredictorModel& pred, const toylm::ToyCorpus& test, uint64_t seed) {
  geometry::NullspaceCheck c;
  double delta = 0.0;
  const double s = Seconds([&] {
    const Tensor h = pred.Embeddings().Row(test.sequences.at(0).at(0));
    const geometry::DistributionFn f = geometry::PredictorPointFn(pred);
    delta = geometry::Quantile(geometry::SampleDirections(f, h, 10000, Rng(seed).Split(300)).kl, 0.2);
    c = geometry::NullspaceMassCheck(f, h, delta, 0.3, 100000, Rng(seed).Split(301));
  });
  const double lhs = c.alpha_hat - c.bound - 3.0 * c.std_err;
  const bool ok = c.sigma_hat >= lhs && c.gap >= 0.0 && c.gap <= c.bound + 3.0 * c.std_err && s < 300.0;
  Report(3, "existence and gap check", ok,
         "delta " + Fmt("%.4g", delta) + ", sigma " + Fmt("%.4f", c.sigma_hat) + ", alpha " +
             Fmt("%.4f", c.alpha_hat) + ", gap " + Fmt("%.4f", c.gap) + ", bound " + Fmt("%.4f", c.bound),
         s);
}

// Runs `cmds` into `dir`; returns wall seconds per command.
std::map<std::string, double> RunPipeline(const fs::path& dir, const cli::CommandOptions& base,
                                          const std::vector<std::string>& cmds) {
  cli::CommandOptions opt = base;
  opt.out = dir.string();
  const cli::RunConfig cfg = cli::ResolveOptions(opt);
  std::map<std::string, double> t;
  for (const std::string& c : cmds) t[c] = Seconds([&] { cli::Execute(c, cfg, opt); });
  return t;
}

std::vector<std::string> AllFiles(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void GradientSuite() {
  int configs = 0, ops = 0;
  double worst = 0.0;
  std::string worst_op;
  const double s = Seconds([&] {
    const auto cases = testing::AllOpCases();
    for (size_t i = 0; i < cases.size(); ++i) {
      for (int k = 0; k < 100; ++k) {
        Rng rng(5000 + k, i);
        auto [f, inputs] = cases[i].make(rng);
        const double e = testing::CheckGradient(f, inputs).max_rel_err;
        if (e > worst) {
          worst = e;
          worst_op = cases[i].name;
        }
        ++configs;
      }
      ++ops;
    }
  });
  Report(10, "gradient correctness", worst < 1e-4 && configs >= 100 * ops,
         std::to_string(ops) + " ops x 100 configs, worst rel err " + Fmt("%.2e", worst) + " (" + worst_op + ")", s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string out = "acceptance_out";
  int threads = 0;
  app.add_option("--out", out, "scratch directory");
  app.add_option("--threads", threads, "worker cap");
  CLI11_PARSE(app, argc, argv);
  SetMaxThreads(threads);
  const fs::path root(out);
  fs::remove_all(root);
  fs::create_directories(root);
  const uint64_t seed = 42;

  try {
    BoundSuite(seed);
    MgfSuite(seed);

    cli::CommandOptions base;
    base.seed = seed;
    const std::vector<std::string> full = {"gen-corpus", "train-predictor", "train-encryptor",
                                           "attack",     "evaluate",        "report"};
    const fs::path run1 = root / "run1", run2 = root / "run2", nodiv = root / "nodiv";
    const auto t1 = RunPipeline(run1, base, full);

    const cli::RunConfig cfg = cli::ResolveOptions(base);
    const toylm::CorpusSplit split =
        toylm::SplitCorpus(toylm::CorpusFromJsonl(ReadFile((run1 / "corpus.jsonl").string()), cfg.corpus));
    const toylm::PredictorModel pred =
        toylm::UnpackPredictor(ParseContainer(ReadFile((run1 / "checkpoints/predictor.ckpt").string())));
    ExistenceCheck(pred, split.test, seed);

    // 4: end-to-end trade-off.
    {
      const json u = ReadJson(run1 / "utility.json");
      const json a = ReadJson(run1 / "attacks.json");
      const double knn10 = AttackAsr(a, "knn", 0, "10");
      const double rp = u["retained_performance"], ppl = u["ppl_ratio"], band = u["cos_band_fraction"];
      const double s = t1.at("train-predictor") + t1.at("train-encryptor") + t1.at("attack") + t1.at("evaluate");
      Report(4, "end-to-end trade-off", knn10 <= 0.05 && rp >= 0.95 && ppl <= 1.5 && band >= 0.95 && s < 1200.0,
             "knn top-10 " + Fmt("%.4f", knn10) + ", RP " + Fmt("%.4f", rp) + ", PPL ratio " + Fmt("%.4f", ppl) +
                 ", band fraction " + Fmt("%.4f", band),
             s);
    }

    // 5: key-diversity ablation.
    {
      fs::create_directories(nodiv / "checkpoints");
      fs::copy_file(run1 / "corpus.jsonl", nodiv / "corpus.jsonl");
      fs::copy_file(run1 / "checkpoints/predictor.ckpt", nodiv / "checkpoints/predictor.ckpt");
      WriteFile((nodiv / "nodiv.ini").string(), "[curriculum]\nlambda2_base = 0\n");
      cli::CommandOptions nd = base;
      nd.config = (nodiv / "nodiv.ini").string();
      nd.adaptive = true;
      const auto tn = RunPipeline(nodiv, nd, {"train-encryptor", "attack"});
      const json with = ReadJson(run1 / "attacks.json"), without = ReadJson(nodiv / "attacks.json");
      const double rnd = AttackAsr(with, "adaptive-random", 0, "1");
      const double orc = AttackAsr(with, "adaptive-oracle", 0, "1");
      const double rnd_nd = AttackAsr(without, "adaptive-random", 0, "1");

      const encryptor::EncryptorModel enc_nd =
          encryptor::UnpackEncryptor(ParseContainer(ReadFile((nodiv / "checkpoints/encryptor.ckpt").string())));
      const double margin = ReadJson(nodiv / "encryptor.json")["margin_div"];
      std::vector<double> dist;
      const Rng keys = Rng(seed).Split(400);
      for (size_t i = 0; i < 60; ++i) {
        const Tensor h = toylm::Embed(pred, split.test.sequences[i]);
        const Tensor z1 = encryptor::Encrypt(enc_nd, h, evalsuite::InstanceKey(keys, i, 0));
        const Tensor z2 = encryptor::Encrypt(enc_nd, h, evalsuite::InstanceKey(keys, i, 1));
        for (double v : ops::RowNorms(ops::Sub(z1, z2)).vec()) dist.push_back(v);
      }
      const double med = evalsuite::Median(dist);
      const double s = t1.at("train-encryptor") + t1.at("attack") + tn.at("train-encryptor") + tn.at("attack");
      Report(5, "key-diversity ablation",
             rnd <= 0.05 && orc == 1.0 && rnd_nd >= 0.90 && med < 0.1 * margin && s < 1500.0,
             "with diversity: random " + Fmt("%.4f", rnd) + ", oracle " + Fmt("%.4f", orc) +
                 "; without: random " + Fmt("%.4f", rnd_nd) + ", median key-pair distance " + Fmt("%.4f", med) +
                 " vs 0.1 margin " + Fmt("%.4f", 0.1 * margin),
             s);
    }

    // 6: noise-direction control.
    {
      const json n = ReadJson(run1 / "noise_control.json");
      const double ratio = n["kl_ratio"], win = n["final_block_win_rate"];
      Report(6, "noise-direction control", ratio >= 10.0 && win >= 0.9 && t1.at("evaluate") < 300.0,
             "KL ratio " + Fmt("%.2f", ratio) + " (noise " + Fmt("%.4f", n["noise_kl_mean"].get<double>()) +
                 ", encryptor " + Fmt("%.4f", n["encryptor_kl_mean"].get<double>()) + "), final-block win rate " +
                 Fmt("%.2f", win),
             t1.at("evaluate"));
    }

    // 7: cosine-ASR correlation.
    {
      const fs::path sdir = root / "sweep";
      fs::create_directories(sdir / "checkpoints");
      fs::copy_file(run1 / "corpus.jsonl", sdir / "corpus.jsonl");
      fs::copy_file(run1 / "checkpoints/predictor.ckpt", sdir / "checkpoints/predictor.ckpt");
      const auto ts = RunPipeline(sdir, base, {"sweep"});
      const json sw = ReadJson(sdir / "sweep.json");
      const auto rows = ReadCsv(sdir / "sweep_cosine.csv");
      const double rho = sw["spearman_knn_top10"];
      const double top = std::stod(rows.back().at(2));
      const bool levels = rows.size() == 11 && std::stod(rows.back().at(0)) == 1.0;
      Report(7, "cosine-ASR correlation", levels && rho >= 0.9 && top == 1.0 && ts.at("sweep") < 300.0,
             "spearman " + Fmt("%.4f", rho) + " over " + std::to_string(rows.size()) + " levels, ASR at 1.0 = " +
                 Fmt("%.4f", top),
             ts.at("sweep"));
    }

    // 8: curriculum unit suite.
    {
      bool ok = true;
      double worst = 0.0;
      int64_t rows = 0;
      const double s = Seconds([&] {
        const objectives::CurriculumConfig& c = cfg.curriculum;
        const double mid = 0.5 * (c.tau_low + c.tau_high);
        ok = ok && objectives::SafetyGate(c.tau_low, c.tau_low, c.tau_high) == 1.0;
        ok = ok && std::fabs(objectives::SafetyGate(mid, c.tau_low, c.tau_high) - 0.5) < 1e-12;
        ok = ok && objectives::SafetyGate(c.tau_high, c.tau_low, c.tau_high) == 0.0;
        const int64_t W = c.warmup_steps;
        ok = ok && objectives::WarmupWeight(0, W) == 0.0;
        ok = ok && std::fabs(objectives::WarmupWeight(W / 2, W) - 0.5) < 1e-12;
        ok = ok && objectives::WarmupWeight(W, W) == 1.0;
        const Container ck = ParseContainer(ReadFile((run1 / "checkpoints/encryptor.ckpt").string()));
        const Tensor& log = ck.Find("log");
        rows = log.rows();
        for (int64_t i = 0; i < rows; ++i) {
          const double util = log.at(i, 1), priv = log.at(i, 2), div = log.at(i, 3), total = log.at(i, 4);
          const double l1 = log.at(i, 7), l2 = log.at(i, 8);
          worst = std::max(worst, std::fabs(total - (util + l1 * priv + l2 * div)));
        }
      });
      ok = ok && rows == cfg.train.steps && worst <= 1e-12;
      Report(8, "curriculum unit suite", ok,
             "gate and warmup points exact, breakdown identity worst " + Fmt("%.2e", worst) + " over " +
                 std::to_string(rows) + " steps",
             s);
    }

    // 9: reproducibility.
    {
      const auto t2 = RunPipeline(run2, base, full);
      double s = 0.0;
      for (const auto& [k, v] : t2) s += v;
      const std::vector<std::string> f1 = AllFiles(run1), f2 = AllFiles(run2);
      std::vector<std::string> differ;
      for (const std::string& f : f1) {
        if (std::find(f2.begin(), f2.end(), f) == f2.end()) {
          differ.push_back(f + " (missing)");
          continue;
        }
        if (ReadFile((run1 / f).string()) != ReadFile((run2 / f).string())) differ.push_back(f);
      }
      std::string detail = std::to_string(f1.size()) + " files compared";
      for (const std::string& d : differ) detail += ", differs: " + d;
      Report(9, "reproducibility", differ.empty() && f1.size() == f2.size(), detail, s);
    }

    GradientSuite();
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }

  int failed = 0;
  for (const Outcome& o : g_outcomes) failed += !o.pass;
  std::printf("%zu criteria, %d failed\n", g_outcomes.size(), failed);
  return failed == 0 ? 0 : 1;
}
