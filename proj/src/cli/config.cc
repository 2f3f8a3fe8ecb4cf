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

#include "osnip/cli/config.h"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"

namespace osnip::cli {
namespace {

struct Field {
  std::string name;
  std::string doc;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int64_t ParseInt(const std::string& key, const std::string& raw) {
  const std::string s = Trim(raw);
  int64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  }
  return v;
}

double ParseDouble(const std::string& key, const std::string& raw) {
  const std::string s = Trim(raw);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  }
  return v;
}

bool ParseBool(const std::string& key, const std::string& raw) {
  const std::string s = Trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

std::vector<std::string> SplitList(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!Trim(item).empty()) out.push_back(Trim(item));
  }
  return out;
}

template <typename T>
std::string Join(const std::vector<T>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_floating_point_v<T>) {
      s += FormatDouble(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s;
}

// Binds a member through an accessor so one line declares get and set.
template <typename T, typename Acc>
Field Make(const std::string& name, const std::string& doc, Acc acc) {
  Field f{name, doc, nullptr, nullptr};
  f.get = [acc](const RunConfig& c) -> std::string {
    const T& v = acc(const_cast<RunConfig&>(c));
    if constexpr (std::is_same_v<T, bool>) {
      return v ? "true" : "false";
    } else if constexpr (std::is_floating_point_v<T>) {
      return FormatDouble(v);
    } else if constexpr (std::is_same_v<T, std::vector<int64_t>> || std::is_same_v<T, std::vector<double>>) {
      return Join(v);
    } else {
      return std::to_string(v);
    }
  };
  f.set = [acc, name](RunConfig& c, const std::string& raw) {
    T& v = acc(c);
    if constexpr (std::is_same_v<T, bool>) {
      v = ParseBool(name, raw);
    } else if constexpr (std::is_floating_point_v<T>) {
      v = ParseDouble(name, raw);
    } else if constexpr (std::is_same_v<T, std::vector<int64_t>>) {
      v.clear();
      for (const auto& s : SplitList(raw)) v.push_back(ParseInt(name, s));
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      v.clear();
      for (const auto& s : SplitList(raw)) v.push_back(ParseDouble(name, s));
    } else {
      const int64_t x = ParseInt(name, raw);
      if (std::is_unsigned_v<T> && x < 0) throw ConfigError(name + " must be >= 0");
      v = static_cast<T>(x);
    }
  };
  return f;
}

#define OSNIP_FIELD(T, key, doc, member) \
  Make<T>(key, doc, [](RunConfig& c) -> T& { return c.member; })

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f = {
        OSNIP_FIELD(uint64_t, "run.seed", "global seed for every random stream", seed),
        OSNIP_FIELD(int, "run.threads", "worker cap, 0 = hardware concurrency", threads),
        OSNIP_FIELD(int64_t, "corpus.sequences", "number of generated sequences", corpus_sequences),
        OSNIP_FIELD(int64_t, "corpus.vocab_size", "vocabulary size |V|", corpus.vocab_size),
        OSNIP_FIELD(int64_t, "corpus.num_function", "function tokens", corpus.num_function),
        OSNIP_FIELD(int64_t, "corpus.synonyms", "tokens per content concept", corpus.synonyms),
        OSNIP_FIELD(int64_t, "corpus.num_topics", "topics (classification labels)", corpus.num_topics),
        OSNIP_FIELD(int64_t, "corpus.min_len", "shortest sequence", corpus.min_len),
        OSNIP_FIELD(int64_t, "corpus.max_len", "longest sequence", corpus.max_len),
        OSNIP_FIELD(double, "corpus.beta", "weight of the first-order table", corpus.beta),
        OSNIP_FIELD(double, "corpus.function_weight", "base weight of function concepts", corpus.function_weight),
        OSNIP_FIELD(double, "corpus.own_topic_boost", "boost of same-topic content", corpus.own_topic_boost),
        OSNIP_FIELD(double, "corpus.other_topic_boost", "boost of other-topic content", corpus.other_topic_boost),
        OSNIP_FIELD(double, "corpus.log_weight_sigma", "log-normal spread of table weights", corpus.log_weight_sigma),
        OSNIP_FIELD(int64_t, "corpus.num_stop_words", "most frequent tokens treated as stop words", corpus.num_stop_words),
        OSNIP_FIELD(int64_t, "predictor.embed_dim", "embedding dimension d", predictor.embed_dim),
        OSNIP_FIELD(int64_t, "predictor.model_dim", "width after the input projection", predictor.model_dim),
        OSNIP_FIELD(int64_t, "predictor.hidden", "block MLP width", predictor.hidden),
        OSNIP_FIELD(int64_t, "predictor.layers", "residual blocks", predictor.layers),
        OSNIP_FIELD(int64_t, "predictor.steps", "training steps", predictor_train.steps),
        OSNIP_FIELD(int64_t, "predictor.batch_size", "sequences per step", predictor_train.batch_size),
        OSNIP_FIELD(double, "predictor.learning_rate", "Adam step size", predictor_train.learning_rate),
        OSNIP_FIELD(int64_t, "encryptor.key_dim", "key embedding dimension", encryptor.key_dim),
        OSNIP_FIELD(int64_t, "encryptor.hidden", "hidden width", encryptor.hidden),
        OSNIP_FIELD(int64_t, "encryptor.depth", "hidden tanh layers", encryptor.depth),
        OSNIP_FIELD(double, "train.learning_rate", "encryptor step size", train.learning_rate),
        OSNIP_FIELD(int64_t, "train.steps", "encryptor training steps (0 keeps the identity)", train.steps),
        OSNIP_FIELD(int64_t, "train.batch_size", "windows per step", train.batch_size),
        OSNIP_FIELD(int64_t, "train.window", "tokens per window", train.window),
        OSNIP_FIELD(int64_t, "train.keys_per_batch", "keys sampled per step (>= 2)", train.keys_per_batch),
        OSNIP_FIELD(int64_t, "train.checkpoint_every", "steps between checkpoints, 0 = final only", train.checkpoint_every),
        OSNIP_FIELD(double, "curriculum.lambda1_base", "orthogonality weight", curriculum.lambda1_base),
        OSNIP_FIELD(double, "curriculum.lambda2_base", "key diversity weight (0 disables it)", curriculum.lambda2_base),
        OSNIP_FIELD(double, "curriculum.eps", "orthogonality target", curriculum.eps_margin),
        OSNIP_FIELD(double, "curriculum.margin_scale", "diversity margin in units of the median embedding norm", margin_scale),
        OSNIP_FIELD(int64_t, "curriculum.warmup_steps", "linear warmup length", curriculum.warmup_steps),
        OSNIP_FIELD(double, "curriculum.tau_low", "utility loss where the gate is fully open", curriculum.tau_low),
        OSNIP_FIELD(double, "curriculum.tau_high", "utility loss where the gate closes", curriculum.tau_high),
        OSNIP_FIELD(double, "curriculum.gate_ema", "0 = instantaneous gate, else EMA decay", curriculum.gate_ema),
        OSNIP_FIELD(std::vector<int64_t>, "attack.top_k", "reported k values", attack.top_k),
        OSNIP_FIELD(bool, "attack.vocab_precomputed", "match isolated-token states instead of the recovered prefix", attack.vocab_precomputed),
        OSNIP_FIELD(std::vector<int64_t>, "geometry.dims", "band-bound dimensions", geometry.dims),
        OSNIP_FIELD(std::vector<double>, "geometry.eps", "band-bound margins", geometry.eps),
        OSNIP_FIELD(int64_t, "geometry.samples", "directions per dimension", geometry.samples),
        OSNIP_FIELD(std::vector<double>, "geometry.mgf_t", "MGF arguments", geometry.mgf_t),
        OSNIP_FIELD(std::vector<int64_t>, "geometry.mgf_dof", "chi-square degrees of freedom", geometry.mgf_dof),
        OSNIP_FIELD(int64_t, "geometry.mgf_samples", "MGF samples", geometry.mgf_samples),
        OSNIP_FIELD(double, "geometry.existence_eps", "band margin of the existence check", geometry.existence_eps),
        OSNIP_FIELD(double, "geometry.existence_quantile", "directional KL quantile used as the tolerance", geometry.existence_quantile),
        OSNIP_FIELD(int64_t, "geometry.existence_pilot", "pilot directions for the tolerance", geometry.existence_pilot),
        OSNIP_FIELD(int64_t, "geometry.existence_samples", "directions of the existence check", geometry.existence_samples),
        OSNIP_FIELD(int64_t, "eval.sequences", "test sequences attacked", eval.sequences),
        OSNIP_FIELD(int64_t, "eval.replicas", "keys per attacked sequence", eval.replicas),
        OSNIP_FIELD(int64_t, "eval.vocab_sequences", "sequences for vocabulary matching", eval.vocab_sequences),
        OSNIP_FIELD(std::vector<int64_t>, "eval.vocab_layers", "probed layers", eval.vocab_layers),
        OSNIP_FIELD(int64_t, "eval.trajectory_prompts", "prompts for the trajectory probe", eval.trajectory_prompts),
        OSNIP_FIELD(int64_t, "eval.generate", "greedy tokens per trajectory prompt", eval.generate),
        OSNIP_FIELD(std::vector<double>, "sweep.cos_levels", "constructed |cos| levels", sweep.cos_levels),
        OSNIP_FIELD(int64_t, "sweep.cos_sequences", "sequences per level", sweep.cos_sequences),
        OSNIP_FIELD(int64_t, "sweep.cos_vocab_layer", "vocabulary-attack layer in the cosine sweep", sweep.cos_vocab_layer),
        OSNIP_FIELD(std::vector<int64_t>, "sweep.dims", "dimensionality grid", sweep.dims),
        OSNIP_FIELD(std::vector<double>, "sweep.lambda1_grid", "Pareto grid lambda1 values", sweep.lambda1_grid),
        OSNIP_FIELD(std::vector<double>, "sweep.eps_grid", "Pareto grid eps values", sweep.eps_grid),
        OSNIP_FIELD(int64_t, "sweep.train_steps", "encryptor steps per sweep point", sweep.train_steps),
    };
    Field opt{"train.optimizer", "adam or sgd", nullptr, nullptr};
    opt.get = [](const RunConfig& c) -> std::string {
      return c.train.optimizer == trainer::Optimizer::kAdam ? "adam" : "sgd";
    };
    opt.set = [](RunConfig& c, const std::string& raw) {
      const std::string s = Trim(raw);
      if (s != "adam" && s != "sgd") throw ConfigError("train.optimizer must be adam or sgd");
      c.train.optimizer = s == "adam" ? trainer::Optimizer::kAdam : trainer::Optimizer::kSgd;
    };
    const auto at = std::find_if(f.begin(), f.end(),
                                 [](const Field& x) { return x.name == "train.checkpoint_every"; });
    f.insert(at + 1, opt);
    return f;
  }();
  return fields;
}

#undef OSNIP_FIELD

}  // namespace

void RunConfig::Resolve() {
  corpus.seed = seed;
  predictor_train.seed = seed;
  train.seed = seed;
  attack.seed = seed;
  predictor.vocab_size = corpus.vocab_size;
  predictor.num_classes = corpus.num_topics;
  encryptor.dim = predictor.embed_dim;
  if (threads < 0) throw ConfigError("run.threads must be >= 0");
  if (corpus_sequences < 10) throw ConfigError("corpus.sequences must be >= 10");
  if (!(margin_scale > 0.0)) throw ConfigError("curriculum.margin_scale must be > 0");
  corpus.Validate();
  predictor.Validate();
  encryptor.Validate();
  train.Validate();
  objectives::CurriculumConfig probe = curriculum;
  probe.margin_div = 1.0;
  probe.Validate();
  attack.Validate();
  for (int64_t l : eval.vocab_layers) {
    if (l < 0 || l > predictor.layers) throw ConfigError("eval.vocab_layers entry out of range");
  }
  if (eval.sequences < 1 || eval.replicas < 1 || eval.vocab_sequences < 1 || eval.trajectory_prompts < 1) {
    throw ConfigError("eval counts must be >= 1");
  }
  if (geometry.samples < 10000) throw ConfigError("geometry.samples must be >= 10000");
}

RunConfig ParseConfig(const std::string& ini_text) {
  boost::property_tree::ptree tree;
  std::istringstream is(ini_text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  std::map<std::string, const Field*> index;
  for (const Field& f : Fields()) index[f.name] = &f;
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config key '" + section + "' is outside any section");
    }
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      if (name == "run.schema") {
        if (ParseInt(name, value.data()) != kConfigSchema) throw ConfigError("unsupported config schema");
        continue;
      }
      const auto it = index.find(name);
      if (it == index.end()) throw ConfigError("unknown config key '" + name + "'");
      it->second->set(c, value.data());
    }
  }
  c.Resolve();
  return c;
}

RunConfig LoadConfig(const std::string& path) {
  if (path.empty() || path == "default") {
    RunConfig c;
    c.Resolve();
    return c;
  }
  return ParseConfig(ReadFile(path));
}

std::string ResolvedConfigText(const RunConfig& c) {
  std::ostringstream os;
  std::string section;
  os << "[run]\nschema = " << kConfigSchema << "\n";
  section = "run";
  for (const Field& f : Fields()) {
    const std::string sec = f.name.substr(0, f.name.find('.'));
    if (sec != section) {
      os << "\n[" << sec << "]\n";
      section = sec;
    }
    os << f.name.substr(f.name.find('.') + 1) << " = " << f.get(c) << "\n";
  }
  return os.str();
}

std::vector<ConfigKey> ConfigSchema() {
  std::vector<ConfigKey> out;
  for (const Field& f : Fields()) out.push_back({f.name, f.doc});
  return out;
}

}  // namespace osnip::cli
