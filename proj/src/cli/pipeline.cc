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

#include "osnip/cli/pipeline.h"

#include <filesystem>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "osnip/attacks/adaptive.h"
#include "osnip/attacks/knn.h"
#include "osnip/attacks/vocab.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"
#include "osnip/evalsuite/stats.h"
#include "osnip/evalsuite/sweeps.h"
#include "osnip/evalsuite/trajectory.h"
#include "osnip/evalsuite/utility.h"
#include "osnip/geometry/coverage.h"
#include "osnip/geometry/sphere.h"
#include "osnip/trainer/checkpoint.h"

namespace osnip::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr uint64_t kEncInitStream = 20;
constexpr uint64_t kEvalStream = 32;
constexpr uint64_t kAdaptiveStream = 33;
constexpr uint64_t kNoiseStream = 34;
constexpr uint64_t kCosineStream = 35;
constexpr uint64_t kBandStream = 40;
constexpr uint64_t kMgfStream = 41;
constexpr uint64_t kExistenceStream = 42;

const char* kCorpusFile = "corpus.jsonl";
const char* kPredictorCkpt = "checkpoints/predictor.ckpt";
const char* kEncryptorCkpt = "checkpoints/encryptor.ckpt";

// Collects the files one subcommand reads and writes.
class Run {
 public:
  Run(std::string command, const RunConfig& cfg, std::string out)
      : command_(std::move(command)), cfg_(cfg), out_(std::move(out)) {
    fs::create_directories(out_);
  }

  std::string Path(const std::string& name) const { return (fs::path(out_) / name).string(); }

  std::string Read(const std::string& name) {
    const std::string p = Path(name);
    if (!fs::exists(p)) throw IoError("missing input '" + p + "'; run the producing subcommand first");
    std::string bytes = ReadFile(p);
    inputs_[name] = Sha256Hex(bytes);
    return bytes;
  }

  void Write(const std::string& name, const std::string& bytes) {
    WriteFile(Path(name), bytes);
    outputs_[name] = Sha256Hex(bytes);
  }

  void WriteJson(const std::string& name, const json& j) { Write(name, j.dump(2) + "\n"); }

  void Finish() {
    const std::string resolved = ResolvedConfigText(cfg_);
    WriteFile(Path("config.resolved"), resolved);
    json manifest = json::object();
    const std::string mp = Path("manifest.json");
    if (fs::exists(mp)) {
      try {
        manifest = json::parse(ReadFile(mp));
      } catch (const json::exception&) {
        throw CorruptHeaderError("existing manifest.json is not valid JSON");
      }
    }
    manifest["schema"] = kConfigSchema;
    manifest["version"] = VersionString();
    manifest["commands"][command_] = {{"config_sha256", Sha256Hex(resolved)},
                                      {"seed", cfg_.seed},
                                      {"inputs", inputs_},
                                      {"outputs", outputs_}};
    WriteFile(mp, manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  const RunConfig& cfg_;
  std::string out_;
  std::map<std::string, std::string> inputs_, outputs_;
};

toylm::ToyCorpus LoadCorpus(Run& run, const RunConfig& cfg) {
  return toylm::CorpusFromJsonl(run.Read(kCorpusFile), cfg.corpus);
}

toylm::PredictorModel LoadPredictor(Run& run) {
  const toylm::PredictorModel m = toylm::UnpackPredictor(ParseContainer(run.Read(kPredictorCkpt)));
  if (!m.frozen) throw ConfigError("predictor checkpoint is not frozen");
  return m;
}

struct EncryptorArtifact {
  encryptor::EncryptorModel model;
  objectives::CurriculumConfig curriculum;
  int64_t steps = 0;
};

EncryptorArtifact LoadEncryptor(Run& run) {
  const Container c = ParseContainer(run.Read(kEncryptorCkpt));
  EncryptorArtifact a;
  a.model = encryptor::UnpackEncryptor(c);
  try {
    a.curriculum = trainer::CurriculumFromJson(c.meta.at("curriculum"));
    a.steps = c.meta.at("step").get<int64_t>();
  } catch (const json::exception& e) {
    throw CorruptHeaderError(std::string("bad encryptor checkpoint: ") + e.what());
  }
  return a;
}

std::string ModelLabel(const EncryptorArtifact& a) {
  if (a.steps == 0) return "identity";
  return a.curriculum.lambda2_base == 0.0 ? "osnip-no-div" : "osnip";
}

json BoundJson(const geometry::BoundReport& b) {
  return {{"d", b.d}, {"eps", b.eps}, {"mc_mass", b.mc_mass}, {"exact_mass", b.exact_mass},
          {"bound", b.bound}, {"stderr", b.std_err}, {"satisfied", b.satisfied}, {"agrees", b.agrees}};
}

json UtilityJson(const evalsuite::UtilityReport& u) {
  return {{"clean_accuracy", u.clean_accuracy},   {"encrypted_accuracy", u.encrypted_accuracy},
          {"retained_performance", u.retained_performance},
          {"clean_ppl", u.clean_ppl},             {"encrypted_ppl", u.encrypted_ppl},
          {"ppl_ratio", u.ppl_ratio},             {"kl_mean", u.kl_mean},
          {"kl_median", u.kl_median},             {"cos_abs_mean", u.cos_abs_mean},
          {"cos_band_fraction", u.cos_band_fraction}, {"band_limit", u.band_limit},
          {"n_tokens", u.n_tokens}};
}

void GeometryVerify(Run& run, const RunConfig& cfg) {
  const GeometryConfig& g = cfg.geometry;
  std::ostringstream csv;
  csv << "d,eps,mc_mass,exact_mass,bound,stderr,satisfied\n";
  json rows = json::array();
  bool all_ok = true;
  const Rng band = Rng(cfg.seed).Split(kBandStream);
  for (int64_t d : g.dims) {
    const auto reps = geometry::McBandMass({d, 1.0}, g.eps, g.samples, band.Split(static_cast<uint64_t>(d)));
    for (const auto& b : reps) {
      csv << b.d << ',' << FormatDouble(b.eps) << ',' << FormatDouble(b.mc_mass) << ','
          << FormatDouble(b.exact_mass) << ',' << FormatDouble(b.bound) << ',' << FormatDouble(b.std_err)
          << ',' << (b.satisfied ? "true" : "false") << '\n';
      rows.push_back(BoundJson(b));
      all_ok = all_ok && b.satisfied && b.agrees;
    }
  }
  run.Write("geometry_bounds.csv", csv.str());

  std::ostringstream mcsv;
  mcsv << "t,dof,mc,closed_form,stderr,residual,ok\n";
  const Rng mgf = Rng(cfg.seed).Split(kMgfStream);
  for (int64_t dof : g.mgf_dof) {
    for (const auto& m : geometry::GaussianMgfCheck(g.mgf_t, dof, g.mgf_samples, mgf.Split(dof))) {
      mcsv << FormatDouble(m.t) << ',' << m.dof << ',' << FormatDouble(m.mc) << ','
           << FormatDouble(m.closed_form) << ',' << FormatDouble(m.std_err) << ','
           << FormatDouble(m.residual) << ',' << (m.ok ? "true" : "false") << '\n';
      all_ok = all_ok && m.ok;
    }
  }
  run.Write("geometry_mgf.csv", mcsv.str());

  json summary = {{"bounds", rows}, {"all_ok", all_ok}};
  if (fs::exists(run.Path(kPredictorCkpt)) && fs::exists(run.Path(kCorpusFile))) {
    const toylm::PredictorModel pred = LoadPredictor(run);
    const toylm::ToyCorpus corpus = LoadCorpus(run, cfg);
    const toylm::CorpusSplit split = toylm::SplitCorpus(corpus);
    const Tensor h = pred.Embeddings().Row(split.test.sequences.at(0).at(0));
    const Rng ex = Rng(cfg.seed).Split(kExistenceStream);
    const geometry::DistributionFn f = geometry::PredictorPointFn(pred);
    const double delta = geometry::Quantile(geometry::SampleDirections(f, h, g.existence_pilot, ex.Split(0)).kl,
                                            g.existence_quantile);
    const auto c = geometry::NullspaceMassCheck(f, h, delta, g.existence_eps, g.existence_samples, ex.Split(1));
    summary["existence"] = {{"delta_util", delta},         {"eps", g.existence_eps},
                            {"alpha_hat", c.alpha_hat},    {"sigma_hat", c.sigma_hat},
                            {"gap", c.gap},                {"bound", c.bound},
                            {"stderr", c.std_err},         {"lower_bound_ok", c.lower_bound_ok},
                            {"gap_ok", c.gap_ok},          {"n", c.n}};
  }
  run.WriteJson("geometry.json", summary);
}

void GenCorpus(Run& run, const RunConfig& cfg) {
  const toylm::ToyCorpus corpus = toylm::GenerateCorpus(cfg.corpus, cfg.corpus_sequences);
  run.Write(kCorpusFile, toylm::CorpusToJsonl(corpus));
  const toylm::CorpusSplit split = toylm::SplitCorpus(corpus);
  run.WriteJson("corpus.json", {{"sequences", corpus.size()},
                                {"train", split.train.size()},
                                {"val", split.val.size()},
                                {"test", split.test.size()},
                                {"stop_words", toylm::StopWords(cfg.corpus)}});
}

void TrainPredictorCmd(Run& run, const RunConfig& cfg) {
  const toylm::CorpusSplit split = toylm::SplitCorpus(LoadCorpus(run, cfg));
  const toylm::PredictorTrainResult r = toylm::TrainPredictor(split.train, cfg.predictor, cfg.predictor_train);
  Container c;
  c.meta["kind"] = "predictor";
  toylm::PackPredictor(r.model, c);
  run.Write(kPredictorCkpt, SerializeContainer(c));
  std::ostringstream csv;
  csv << "step,loss\n";
  for (size_t i = 0; i < r.losses.size(); ++i) csv << i << ',' << FormatDouble(r.losses[i]) << '\n';
  run.Write("predictor_train.csv", csv.str());
  const double ppl = toylm::Perplexity(r.model, split.val);
  const double untrained = [&] {
    Rng init = Rng(cfg.predictor_train.seed).Split(11);
    return toylm::Perplexity(toylm::InitPredictor(cfg.predictor, init), split.val);
  }();
  run.WriteJson("predictor.json", {{"val_ppl", ppl},
                                   {"untrained_val_ppl", untrained},
                                   {"val_accuracy", toylm::ClassificationAccuracy(r.model, split.val)},
                                   {"param_sha256", toylm::ParamHash(r.model.params)}});
}

void TrainEncryptorCmd(Run& run, const RunConfig& cfg) {
  const toylm::CorpusSplit split = toylm::SplitCorpus(LoadCorpus(run, cfg));
  const toylm::PredictorModel pred = LoadPredictor(run);
  Rng init = Rng(cfg.seed).Split(kEncInitStream);
  const encryptor::EncryptorModel enc0 = encryptor::InitEncryptor(cfg.encryptor, init);
  objectives::CurriculumConfig cc = cfg.curriculum;
  cc.margin_div = trainer::DiversityMargin(pred.Embeddings(), cfg.margin_scale);
  trainer::TrainConfig tc = cfg.train;
  if (tc.checkpoint_every > 0) {
    tc.checkpoint_dir = run.Path("checkpoints");
    fs::create_directories(tc.checkpoint_dir);
  }
  const std::string before = toylm::ParamHash(pred.params);
  trainer::EncryptorTrainer t(pred, enc0, split.train, tc, cc);
  t.Run();
  t.AssertPredictorFrozen();
  run.Write(kEncryptorCkpt, SerializeContainer(t.Checkpoint()));
  run.Write("train_log.csv", t.log().ToCsv());
  json summary = {{"steps", t.step()},
                  {"margin_div", cc.margin_div},
                  {"predictor_sha256_before", before},
                  {"predictor_sha256_after", toylm::ParamHash(pred.params)}};
  if (!t.log().rows.empty()) {
    const auto& b = t.log().rows.back().loss;
    summary["final"] = {{"util", b.util}, {"priv", b.priv}, {"div", b.div}, {"total", b.total}};
  }
  run.WriteJson("encryptor.json", summary);
}

void AttackCmd(Run& run, const RunConfig& cfg, const CommandOptions& opt) {
  const bool all = !opt.knn && !opt.vocab && !opt.adaptive;
  const toylm::CorpusSplit split = toylm::SplitCorpus(LoadCorpus(run, cfg));
  const toylm::PredictorModel pred = LoadPredictor(run);
  const EncryptorArtifact enc = LoadEncryptor(run);
  const std::string label = ModelLabel(enc);
  const Rng eval = Rng(cfg.seed).Split(kEvalStream);
  const evalsuite::InstanceSet inst =
      evalsuite::BuildInstances(pred, &enc.model, split.test, cfg.eval.sequences, cfg.eval.replicas, eval);
  std::vector<attacks::AttackReport> reports;
  if (all || opt.knn) {
    attacks::AttackReport r =
        attacks::KnnAttack(pred.Embeddings(), inst.StackedPerturbed(), inst.StackedIds(), cfg.attack);
    r.model = label;
    reports.push_back(r);
  }
  if (all || opt.vocab) {
    const evalsuite::InstanceSet vi =
        evalsuite::BuildInstances(pred, &enc.model, split.test, cfg.eval.vocab_sequences, 1, eval);
    for (int64_t layer : cfg.eval.vocab_layers) {
      attacks::AttackConfig ac = cfg.attack;
      ac.layer = layer;
      attacks::AttackReport r =
          attacks::VocabMatchingAttack(pred, vi.perturbed, vi.ids, toylm::StopWords(cfg.corpus), ac);
      r.model = label;
      reports.push_back(r);
    }
  }
  if (all || opt.adaptive) {
    const Rng guess = Rng(cfg.seed).Split(kAdaptiveStream);
    for (attacks::KeyMode mode : {attacks::KeyMode::kRandom, attacks::KeyMode::kOracle}) {
      attacks::AttackReport r = attacks::AdaptiveKeyAttack(enc.model, pred.Embeddings(), inst.perturbed,
                                                           inst.ids, inst.keys, mode, guess, cfg.attack);
      r.model = label;
      reports.push_back(r);
    }
  }
  run.Write("attacks.csv", attacks::ReportsCsv(reports));
  json j = json::array();
  for (const auto& r : reports) j.push_back(r.ToJson());
  run.WriteJson("attacks.json", {{"instances", inst.perturbed.size()}, {"reports", j}});
}

void EvaluateCmd(Run& run, const RunConfig& cfg) {
  const toylm::CorpusSplit split = toylm::SplitCorpus(LoadCorpus(run, cfg));
  const toylm::PredictorModel pred = LoadPredictor(run);
  const EncryptorArtifact enc = LoadEncryptor(run);
  const Rng eval = Rng(cfg.seed).Split(kEvalStream);
  const double band = enc.curriculum.eps_margin + 0.05;
  const evalsuite::UtilityReport u = evalsuite::UtilityEval(pred, &enc.model, split.test, eval, band);
  run.WriteJson("utility.json", UtilityJson(u));

  const int64_t np = std::min<int64_t>(cfg.eval.trajectory_prompts, static_cast<int64_t>(split.test.size()));
  std::vector<std::vector<int64_t>> prompts(split.test.sequences.begin(), split.test.sequences.begin() + np);
  std::vector<encryptor::SecretKey> keys;
  for (int64_t i = 0; i < np; ++i) keys.push_back(evalsuite::InstanceKey(eval, i));
  const evalsuite::NoiseControlResult nc = evalsuite::NoiseControl(
      pred, enc.model, prompts, keys, Rng(cfg.seed).Split(kNoiseStream), cfg.eval.generate);
  run.WriteJson("noise_control.json", {{"encryptor_kl_mean", nc.encryptor_kl_mean},
                                       {"noise_kl_mean", nc.noise_kl_mean},
                                       {"kl_ratio", nc.kl_ratio},
                                       {"final_block_win_rate", nc.final_block_win_rate},
                                       {"encryptor_final", nc.encryptor_final},
                                       {"noise_final", nc.noise_final},
                                       {"n_tokens", nc.n_tokens}});
  std::vector<evalsuite::TrajectoryReport> traj(np);
  ParallelFor(np, [&](int64_t i) {
    const Tensor h = toylm::Embed(pred, prompts[i]);
    traj[i] = evalsuite::LayerTrajectory(pred, h, encryptor::Encrypt(enc.model, h, keys[i]), cfg.eval.generate);
  });
  run.Write("trajectory.csv", evalsuite::TrajectoryCsv(traj));
}

void SweepCmd(Run& run, const RunConfig& cfg, const CommandOptions& opt) {
  const toylm::CorpusSplit split = toylm::SplitCorpus(LoadCorpus(run, cfg));
  const toylm::PredictorModel pred = LoadPredictor(run);
  const std::vector<int64_t> stop = toylm::StopWords(cfg.corpus);
  attacks::AttackConfig ac;
  ac.layer = cfg.sweep.cos_vocab_layer;
  const evalsuite::CosineSweep cs =
      evalsuite::CosineAsrSweep(pred, split.test, cfg.sweep.cos_levels, stop, cfg.sweep.cos_sequences,
                                cfg.eval.vocab_sequences, ac, Rng(cfg.seed).Split(kCosineStream));
  run.Write("sweep_cosine.csv", evalsuite::SweepCsv(cs.points));
  json summary = {{"spearman_knn_top10", cs.spearman_knn}, {"spearman_vocab_clean", cs.spearman_vocab}};

  evalsuite::ExperimentConfig ec;
  ec.predictor = cfg.predictor;
  ec.predictor_train = cfg.predictor_train;
  ec.encryptor = cfg.encryptor;
  ec.train = cfg.train;
  ec.train.steps = cfg.sweep.train_steps;
  ec.curriculum = cfg.curriculum;
  ec.margin_scale = cfg.margin_scale;
  ec.eval_sequences = cfg.eval.sequences;
  ec.eval_replicas = cfg.eval.replicas;
  ec.vocab_sequences = cfg.eval.vocab_sequences;
  ec.seed = cfg.seed;
  if (opt.dims) {
    run.Write("sweep_dims.csv", evalsuite::SweepCsv(evalsuite::DimensionalitySweep(cfg.sweep.dims, split, stop, ec)));
  }
  if (opt.pareto) {
    run.Write("sweep_pareto.csv", evalsuite::SweepCsv(evalsuite::ParetoGrid(
                                      pred, split, stop, cfg.sweep.lambda1_grid, cfg.sweep.eps_grid, ec)));
  }
  run.WriteJson("sweep.json", summary);
}

void ReportCmd(Run& run) {
  json index = json::object();
  json files = json::object();
  for (const char* name : {"geometry.json", "corpus.json", "predictor.json", "encryptor.json", "attacks.json",
                           "utility.json", "noise_control.json", "sweep.json"}) {
    if (!fs::exists(run.Path(name))) continue;
    const std::string bytes = run.Read(name);
    try {
      index[name] = json::parse(bytes);
    } catch (const json::exception&) {
      throw CorruptHeaderError(std::string("artifact ") + name + " is not valid JSON");
    }
  }
  for (const char* name : {"geometry_bounds.csv", "geometry_mgf.csv", "train_log.csv", "attacks.csv",
                           "trajectory.csv", "sweep_cosine.csv", "sweep_dims.csv", "sweep_pareto.csv"}) {
    if (fs::exists(run.Path(name))) files[name] = Sha256Hex(run.Read(name));
  }
  run.WriteJson("report.json", {{"reports", index}, {"tables", files}});
}

}  // namespace

const std::vector<std::string>& Subcommands() {
  static const std::vector<std::string> cmds = {"geometry-verify", "gen-corpus", "train-predictor",
                                                "train-encryptor", "attack",     "evaluate",
                                                "sweep",           "report",     "all"};
  return cmds;
}

std::string VersionString() { return "osnip 0.1.0"; }

RunConfig ResolveOptions(const CommandOptions& opt) {
  RunConfig cfg = LoadConfig(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  cfg.Resolve();
  return cfg;
}

void Execute(const std::string& command, const RunConfig& cfg, const CommandOptions& opt) {
  SetMaxThreads(cfg.threads);
  if (command == "all") {
    for (const char* c : {"gen-corpus", "train-predictor", "train-encryptor", "attack", "evaluate", "report"}) {
      Execute(c, cfg, opt);
    }
    return;
  }
  Run run(command, cfg, opt.out);
  spdlog::info("{}: writing to {}", command, opt.out);
  if (command == "geometry-verify") {
    GeometryVerify(run, cfg);
  } else if (command == "gen-corpus") {
    GenCorpus(run, cfg);
  } else if (command == "train-predictor") {
    TrainPredictorCmd(run, cfg);
  } else if (command == "train-encryptor") {
    TrainEncryptorCmd(run, cfg);
  } else if (command == "attack") {
    AttackCmd(run, cfg, opt);
  } else if (command == "evaluate") {
    EvaluateCmd(run, cfg);
  } else if (command == "sweep") {
    SweepCmd(run, cfg, opt);
  } else if (command == "report") {
    ReportCmd(run);
  } else {
    throw ConfigError("unknown subcommand '" + command + "'");
  }
  run.Finish();
}

int ExitCodeForCurrentException() {
  try {
    throw;
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const NumericError& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kExitNumeric;
  } catch (const IoError& e) {
    spdlog::error("io failure: {}", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("io failure: {}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternal;
  }
}

int RunCommand(const std::string& command, const CommandOptions& opt) {
  try {
    Execute(command, ResolveOptions(opt), opt);
    return kExitOk;
  } catch (...) {
    return ExitCodeForCurrentException();
  }
}

}  // namespace osnip::cli
