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

#include <cmath>

#include "osnip/diffmath/container.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/encryptor/key.h"

namespace osnip::encryptor {
namespace {

Tensor RandomRows(Rng& rng, int64_t n, int64_t d) {
  Tensor t({n, d});
  rng.FillNormal(t.data(), t.size());
  return t;
}

EncryptorModel Perturbed(uint64_t seed) {
  Rng rng(seed);
  EncryptorModel m = InitEncryptor(EncryptorConfig{}, rng);
  Tensor& w = m.params.Mutable("W.2");
  for (double& x : w.vec()) x = 0.3 * rng.Normal();
  return m;
}

TEST(KeyTest, ExpansionIsDeterministicAndUnit) {
  Rng rng(1);
  const SecretKey k = SecretKey::Random(rng);
  const Tensor a = ExpandKey(k, 64), b = ExpandKey(k, 64);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(ops::Norm(a), 1.0, 1e-12);
  EXPECT_EQ(SecretKey::FromHex(k.Hex()), k);
  EXPECT_EQ(k.Hex().size(), 64u);
  EXPECT_THROW(SecretKey::FromHex("abc"), ConfigError);
}

TEST(KeyTest, DistinctKeysAreNearlyOrthogonal) {
  Rng rng(2);
  int big = 0;
  for (int i = 0; i < 200; ++i) {
    const Tensor a = ExpandKey(SecretKey::Random(rng), 64);
    const Tensor b = ExpandKey(SecretKey::Random(rng), 64);
    big += std::fabs(ops::Dot(a, b)) >= 0.5;
  }
  EXPECT_EQ(big, 0);
}

TEST(ProjectTest, Examples) {
  const Tensor h = Tensor::Vector({3.0, 4.0});
  EXPECT_EQ(Project(h, Tensor::Vector({0.0, 0.0})), h);
  const Tensor z = Project(h, Tensor::Vector({-3.0, -2.0}));
  EXPECT_NEAR(z[0], 0.0, 1e-15);
  EXPECT_NEAR(z[1], 5.0, 1e-15);
  EXPECT_THROW(Project(h, Tensor::Vector({-3.0, -4.0})), NumericError);
  EXPECT_THROW(Project(Tensor::Vector({0.0, 0.0}), Tensor::Vector({1.0, 0.0})), NumericError);
}

TEST(ProjectTest, PreservesNormAndIsIdempotent) {
  Rng rng(3);
  const Tensor h = RandomRows(rng, 50, 16), d = RandomRows(rng, 50, 16);
  const Tensor z = Project(h, d);
  const Tensor nh = ops::RowNorms(h), nz = ops::RowNorms(z);
  for (int64_t i = 0; i < 50; ++i) EXPECT_NEAR(nz[i], nh[i], 1e-12 * nh[i]);
  const Tensor again = Project(h, ops::Sub(z, h));
  for (int64_t i = 0; i < again.size(); ++i) EXPECT_NEAR(again[i], z[i], 1e-12);
}

TEST(EncryptorTest, ZeroInitIsExactIdentity) {
  Rng rng(4);
  const EncryptorModel m = InitEncryptor(EncryptorConfig{}, rng);
  EXPECT_EQ(m.params.Get("W.2"), Tensor({64, 128}));
  const Tensor h = RandomRows(rng, 20, 64);
  EXPECT_EQ(Encrypt(m, h, SecretKey::Random(rng)), h);
  EXPECT_EQ(Perturbation(m, h, SecretKey::Random(rng)), Tensor({20, 64}));
}

TEST(EncryptorTest, NormPreservedAndKeyDependent) {
  const EncryptorModel m = Perturbed(5);
  Rng rng(6);
  const Tensor h = RandomRows(rng, 30, 64);
  const SecretKey k1 = SecretKey::Random(rng), k2 = SecretKey::Random(rng);
  const Tensor z1 = Encrypt(m, h, k1), z2 = Encrypt(m, h, k2);
  const Tensor nh = ops::RowNorms(h), n1 = ops::RowNorms(z1);
  for (int64_t i = 0; i < 30; ++i) EXPECT_NEAR(n1[i], nh[i], 1e-12 * nh[i]);
  EXPECT_EQ(Encrypt(m, h, k1), z1);
  EXPECT_GT(ops::Norm(ops::Sub(z1, z2)), 1e-3);
  const Tensor viaDelta = Project(h, Perturbation(m, h, k1));
  for (int64_t i = 0; i < z1.size(); ++i) EXPECT_NEAR(viaDelta[i], z1[i], 1e-12);
}

TEST(EncryptorTest, RowsAreIndependent) {
  const EncryptorModel m = Perturbed(7);
  Rng rng(8);
  const Tensor h = RandomRows(rng, 5, 64);
  const SecretKey k = SecretKey::Random(rng);
  const Tensor all = Encrypt(m, h, k);
  for (int64_t i = 0; i < 5; ++i) {
    const Tensor one = Encrypt(m, h.Row(i).Reshaped({1, 64}), k);
    for (int64_t j = 0; j < 64; ++j) EXPECT_NEAR(one[j], all.at(i, j), 1e-12);
  }
}

TEST(EncryptorTest, RejectsBadInputs) {
  const EncryptorModel m = Perturbed(9);
  Rng rng(10);
  const Tensor key = ExpandKey(SecretKey::Random(rng), 16);
  EXPECT_THROW(Encrypt(m, Tensor({2, 10}), key), ShapeError);
  EXPECT_THROW(Encrypt(m, Tensor({2, 64}), key), NumericError);
  EXPECT_THROW(Encrypt(m, RandomRows(rng, 2, 64), Tensor({3})), ShapeError);
  EncryptorConfig bad;
  bad.depth = 0;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(EncryptorTest, PackUnpackRoundTrip) {
  const EncryptorModel m = Perturbed(11);
  Container c;
  PackEncryptor(m, c);
  const EncryptorModel back = UnpackEncryptor(ParseContainer(SerializeContainer(c)));
  for (const std::string& n : m.params.Names()) EXPECT_EQ(back.params.Get(n), m.params.Get(n));
  c.meta["encryptor"]["hidden"] = 64;
  EXPECT_THROW(UnpackEncryptor(c), CorruptHeaderError);
}

}  // namespace
}  // namespace osnip::encryptor
