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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "osnip/cli/config.h"
#include "osnip/cli/pipeline.h"
#include "osnip/diffmath/container.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/encryptor/key.h"
#include "osnip/geometry/sphere.h"
#include "osnip/toylm/corpus.h"

namespace py = pybind11;
using namespace osnip;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor FromArray(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
  Tensor t({a.shape(0), a.shape(1)});
  std::copy(a.data(), a.data() + a.size(), t.data());
  return t;
}

Array ToArray(const Tensor& t) {
  Array a({t.rows(), t.cols()});
  std::copy(t.data(), t.data() + t.size(), a.mutable_data());
  return a;
}

int Run(const std::string& command, const std::string& config, const std::string& out,
        std::optional<uint64_t> seed, std::optional<int> threads, bool knn, bool vocab, bool adaptive) {
  cli::CommandOptions opt;
  opt.config = config;
  opt.out = out;
  opt.seed = seed;
  opt.threads = threads;
  opt.knn = knn;
  opt.vocab = vocab;
  opt.adaptive = adaptive;
  py::gil_scoped_release release;
  return cli::RunCommand(command, opt);
}

}  // namespace

PYBIND11_MODULE(_osnip, m) {
  m.doc() = "Embedding encryption laboratory: geometry checks, toy predictor, encryptor, attacks";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("version", &cli::VersionString);
  m.def("subcommands", &cli::Subcommands);
  m.def("run", &Run, py::arg("command"), py::arg("config") = "default", py::arg("out") = "out",
        py::arg("seed") = py::none(), py::arg("threads") = py::none(), py::arg("knn") = false,
        py::arg("vocab") = false, py::arg("adaptive") = false,
        "Runs one pipeline subcommand and returns its exit code.");
  m.def("resolved_config", [](const std::string& path) {
    cli::RunConfig c = cli::LoadConfig(path);
    c.Resolve();
    return cli::ResolvedConfigText(c);
  }, py::arg("path") = "default");

  m.def("exact_band_mass", &geometry::ExactBandMass, py::arg("d"), py::arg("eps"));
  m.def("band_complement_bound", &geometry::BandComplementBound, py::arg("d"), py::arg("eps"));
  m.def("mc_band_mass", [](int64_t d, double eps, int64_t n, uint64_t seed) {
    const geometry::BoundReport r = geometry::McBandMass({d, 1.0}, eps, n, Rng(seed));
    py::dict out;
    out["mc_mass"] = r.mc_mass;
    out["exact_mass"] = r.exact_mass;
    out["bound"] = r.bound;
    out["stderr"] = r.std_err;
    out["satisfied"] = r.satisfied;
    return out;
  }, py::arg("d"), py::arg("eps"), py::arg("n"), py::arg("seed") = 42);

  m.def("generate_corpus", [](int64_t n, uint64_t seed) {
    toylm::CorpusSpec spec;
    spec.seed = seed;
    const toylm::ToyCorpus c = toylm::GenerateCorpus(spec, n);
    return py::make_tuple(c.sequences, c.labels);
  }, py::arg("n"), py::arg("seed") = 42);

  m.def("encrypt", [](const std::string& checkpoint, const Array& h, const std::string& key_hex) {
    const encryptor::EncryptorModel enc = encryptor::UnpackEncryptor(LoadContainer(checkpoint));
    return ToArray(encryptor::Encrypt(enc, FromArray(h), encryptor::SecretKey::FromHex(key_hex)));
  }, py::arg("checkpoint"), py::arg("h"), py::arg("key_hex"),
        "Encrypts rows of h with the encryptor stored in a checkpoint.");
  m.def("random_key", [](uint64_t seed) {
    Rng rng(seed);
    return encryptor::SecretKey::Random(rng).Hex();
  }, py::arg("seed"));
}
