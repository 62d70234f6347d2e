// Copyright 2026 The gdn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <string>

#include "gdn/error.hpp"
#include "gdn/model_io.hpp"
#include "gdn/params.hpp"
#include "oracles.hpp"

namespace gdn {
namespace {

bool bitwise_equal(const GdnParams& a, const GdnParams& b) {
  return a.H == b.H && a.alpha == b.alpha && a.beta == b.beta && a.gamma == b.gamma && a.epsilon == b.epsilon;
}

std::vector<TyingConfig> all_tyings(Index n) {
  std::vector<std::vector<Index>> halves(2);
  for (Index i = 0; i < n; ++i) halves[std::size_t(i * 2 / n)].push_back(i);
  return {TyingConfig::full(),        TyingConfig::column_tied_alpha(), TyingConfig::diagonal_gamma(),
          TyingConfig::radial(),      TyingConfig::lp_radial(1.5),      TyingConfig::subspaces(halves),
          TyingConfig::classic_dn()};
}

TEST(InitParams, FullIsDiagonalAndValid) {
  const GdnParams p = init_params(2, TyingConfig::full(), 0);
  EXPECT_NO_THROW(check_invariants(p));
  EXPECT_TRUE(has_diagonal_gamma(p));
  EXPECT_EQ(p.beta, Vector::Ones(2));
  EXPECT_TRUE((p.alpha.array() >= 1.0).all());
  EXPECT_TRUE((p.epsilon.array() >= 0.0).all() && (p.epsilon.array() <= 1.0).all());
  EXPECT_EQ(p.H, Matrix::Identity(2, 2));
}

TEST(InitParams, RadialSharesScalars) {
  const GdnParams p = init_params(4, TyingConfig::radial(), 3);
  EXPECT_TRUE((p.alpha.array() == 2.0).all());
  EXPECT_TRUE((p.beta.array() == p.beta[0]).all());
  EXPECT_TRUE((p.epsilon.array() == p.epsilon[0]).all());
  EXPECT_TRUE((p.gamma.array() == p.gamma(0, 0)).all());
}

TEST(InitParams, SeedIsDeterministic) {
  EXPECT_TRUE(bitwise_equal(init_params(5, TyingConfig::full(), 9), init_params(5, TyingConfig::full(), 9)));
  EXPECT_FALSE(bitwise_equal(init_params(5, TyingConfig::full(), 9), init_params(5, TyingConfig::full(), 10)));
}

TEST(InitParams, EveryTyingIsValidAndConformant) {
  for (const TyingConfig& t : all_tyings(6)) {
    const GdnParams p = init_params(6, t, 1);
    EXPECT_NO_THROW(check_invariants(p)) << to_string(t.variant);
    EXPECT_TRUE(bitwise_equal(p, project_constraints(p, t))) << to_string(t.variant);
  }
}

TEST(InitParams, RejectsBadPartitions) {
  EXPECT_THROW(init_params(3, TyingConfig::subspaces({{0, 1}, {1, 2}}), 0), Error);  // overlap
  EXPECT_THROW(init_params(3, TyingConfig::subspaces({{0, 1}}), 0), Error);          // incomplete
  EXPECT_THROW(init_params(3, TyingConfig::subspaces({{0, 1}, {2, 3}}), 0), Error);  // out of range
  EXPECT_THROW(init_params(3, TyingConfig::subspaces({{0, 1, 2}, {}}), 0), Error);   // empty set
  EXPECT_THROW(init_params(3, TyingConfig::lp_radial(0.5), 0), Error);
  EXPECT_THROW(init_params(0, TyingConfig::full(), 0), Error);
}

TEST(Projection, ClampsToBounds) {
  GdnParams p = init_params(3, TyingConfig::full(), 0);
  p.alpha(0, 0) = 0.5;
  p.beta[1] = -2.0;
  p.gamma(2, 1) = -0.1;
  ProjectionStats stats;
  GdnParams q = project_constraints(p, TyingConfig::full(), &stats);
  EXPECT_EQ(q.alpha(0, 0), 1.0);
  EXPECT_EQ(q.beta[1], kBetaFloor);
  EXPECT_EQ(q.gamma(2, 1), 0.0);
  EXPECT_GE(stats.clamped, 3);
  EXPECT_NO_THROW(check_invariants(q));
}

TEST(Projection, EpsilonClampedAfterAlpha) {
  GdnParams p = init_params(2, TyingConfig::full(), 0);
  p.alpha(0, 0) = 2.0;
  p.epsilon[0] = 0.9;
  EXPECT_EQ(project_constraints(p, TyingConfig::full()).epsilon[0], 0.5);
  // Alpha raised by its own clamp still bounds epsilon.
  p.alpha(1, 1) = 0.2;
  p.epsilon[1] = 3.0;
  const GdnParams q = project_constraints(p, TyingConfig::full());
  EXPECT_EQ(q.alpha(1, 1), 1.0);
  EXPECT_EQ(q.epsilon[1], 1.0);
}

TEST(Projection, IdempotentForEveryTying) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GdnParams raw = testing::random_params(6, seed);
    raw.alpha(1, 2) = 0.3;
    raw.gamma(0, 3) = -1.0;
    raw.epsilon[4] = 5.0;
    for (const TyingConfig& t : all_tyings(6)) {
      const GdnParams once = project_constraints(raw, t);
      const GdnParams twice = project_constraints(once, t);
      EXPECT_TRUE(bitwise_equal(once, twice)) << to_string(t.variant) << " seed " << seed;
      EXPECT_NO_THROW(check_invariants(once));
    }
  }
}

TEST(Projection, ValidParamsUnchanged) {
  const GdnParams p = testing::random_params(5, 42);
  EXPECT_TRUE(bitwise_equal(p, project_constraints(p, TyingConfig::full())));
}

TEST(Projection, TiedGroupsExactlyEqual) {
  const GdnParams raw = testing::random_params(4, 7);
  for (const TyingConfig& t : {TyingConfig::radial(), TyingConfig::lp_radial(3.0)}) {
    const GdnParams q = project_constraints(raw, t);
    EXPECT_TRUE((q.alpha.array() == t.p).all());
    EXPECT_TRUE((q.beta.array() == q.beta[0]).all());
    EXPECT_TRUE((q.epsilon.array() == q.epsilon[0]).all());
    EXPECT_TRUE((q.gamma.array() == q.gamma(0, 0)).all());
  }
  const GdnParams c = project_constraints(raw, TyingConfig::column_tied_alpha());
  for (Index j = 0; j < 4; ++j) EXPECT_TRUE((c.alpha.col(j).array() == c.alpha(0, j)).all());
  const GdnParams d = project_constraints(raw, TyingConfig::diagonal_gamma());
  EXPECT_TRUE(has_diagonal_gamma(d));
  const GdnParams s = project_constraints(raw, TyingConfig::subspaces({{0, 2}, {1, 3}}));
  EXPECT_EQ(s.gamma(0, 1), 0.0);
  EXPECT_EQ(s.gamma(0, 2), s.gamma(2, 0));
  EXPECT_EQ(s.beta[1], s.beta[3]);
  EXPECT_NE(s.gamma(0, 0), 0.0);
  const GdnParams k = project_constraints(raw, TyingConfig::classic_dn());
  EXPECT_TRUE((k.alpha.array() == 1.0).all() && (k.gamma.array() == 1.0).all() && (k.epsilon.array() == 1.0).all());
}

TEST(TieGradient, RadialGroupsReceiveSums) {
  GdnParams g = testing::random_params(3, 1);
  const double gamma_sum = g.gamma.sum();
  const double beta_sum = g.beta.sum();
  tie_gradient(g, TyingConfig::radial());
  EXPECT_TRUE((g.alpha.array() == 0.0).all());
  EXPECT_TRUE((g.gamma.array() == g.gamma(0, 0)).all());
  EXPECT_NEAR(g.gamma(0, 0), gamma_sum, 1e-12);
  EXPECT_NEAR(g.beta[0], beta_sum, 1e-12);
}

TEST(Flatten, RoundTrip) {
  const GdnParams p = testing::random_params(4, 5);
  const Vector f = flatten(p);
  EXPECT_EQ(f.size(), p.size());
  EXPECT_TRUE(bitwise_equal(p, unflatten(f, 4)));
}

TEST(CheckInvariants, NamesViolation) {
  GdnParams p = identity_params(2);
  p.beta[0] = 0.0;
  try {
    check_invariants(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
  p = identity_params(2);
  p.H.setZero();
  EXPECT_THROW(check_invariants(p), Error);
}

Model sample_model() {
  Model m;
  m.params = testing::random_params(16, 11);
  m.tying = TyingConfig::full();
  m.meta.offset = 0.25;
  m.meta.scale = 3.5;
  m.meta.patch_width = 4;
  m.meta.mean_removed = true;
  return m;
}

TEST(ModelIo, RoundTripExact) {
  const Model m = sample_model();
  const Model back = decode_model(encode_model(m));
  EXPECT_TRUE(bitwise_equal(m.params, back.params));
  EXPECT_EQ(back.tying.variant, Variant::Full);
  EXPECT_EQ(back.meta.offset, 0.25);
  EXPECT_EQ(back.meta.scale, 3.5);
  EXPECT_EQ(back.meta.patch_width, 4u);
  EXPECT_TRUE(back.meta.mean_removed);
  EXPECT_FALSE(back.meta.gaussianizer.has_value());
}

TEST(ModelIo, RoundTripTyingAndGaussianizer) {
  Model m;
  m.tying = TyingConfig::subspaces({{0, 3}, {1, 2}});
  m.params = init_params(4, m.tying, 0);
  m.meta.gaussianizer = PointwiseGaussianizer{0.1, 0.2, 1.3, 0.7, -1.0, 2.0};
  const Model back = decode_model(encode_model(m));
  EXPECT_EQ(back.tying.variant, Variant::Subspaces);
  EXPECT_EQ(back.tying.partition, m.tying.partition);
  ASSERT_TRUE(back.meta.gaussianizer.has_value());
  EXPECT_EQ(back.meta.gaussianizer->shape, 1.3);
  EXPECT_EQ(back.meta.gaussianizer->upper, 2.0);
}

TEST(ModelIo, RejectsTruncation) {
  const std::string bytes = encode_model(sample_model());
  for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(10), bytes.size() / 2, bytes.size() - 1}) {
    try {
      decode_model(bytes.substr(0, cut));
      FAIL() << "accepted " << cut << " bytes";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Format);
    }
  }
}

TEST(ModelIo, RejectsBadMagicVersionAndTrailingBytes) {
  std::string bytes = encode_model(sample_model());
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_model(bad), Error);
  bad = bytes;
  bad[4] = 99;  // version
  EXPECT_THROW(decode_model(bad), Error);
  EXPECT_THROW(decode_model(bytes + "x"), Error);
}

TEST(ModelIo, RejectsInvariantViolation) {
  Model m;
  m.params = identity_params(3);
  m.params.beta[1] = 0.0;
  const std::string bytes = encode_model(m);
  try {
    decode_model(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Format);
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
}

}  // namespace
}  // namespace gdn
