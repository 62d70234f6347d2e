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

#include <cmath>
#include <string>

#include "gdn/error.hpp"
#include "gdn/transform.hpp"
#include "oracles.hpp"

namespace gdn {
namespace {

using testing::fd_jacobian;
using testing::random_normal;
using testing::random_params;
using testing::reference_forward;

TEST(Forward, IdentityConfiguration) {
  for (double eps : {0.0, 0.3, 1.0}) {
    GdnParams p = identity_params(5);
    p.epsilon.setConstant(eps);
    const Matrix x = random_normal(5, 100, 1);
    const TransformResult t = forward(p, x);
    EXPECT_EQ(t.y, x);
    EXPECT_TRUE((t.logdet.array() == 0.0).all());
  }
}

TEST(Forward, MatchesReferenceLoops) {
  const GdnParams p = random_params(6, 3);
  const Matrix x = random_normal(6, 50, 4);
  const TransformResult t = forward(p, x);
  for (Index k = 0; k < x.cols(); ++k)
    EXPECT_LT(testing::max_rel_err(t.y.col(k), reference_forward(p, x.col(k))), 1e-13);
}

TEST(Forward, RadialClosedForm) {
  GdnParams p = init_params(4, TyingConfig::radial(), 0);
  p.beta.setConstant(0.7);
  p.gamma.setConstant(0.3);
  p.epsilon.setConstant(0.4);
  p = project_constraints(p, TyingConfig::radial());
  const Matrix x = random_normal(4, 200, 5, 2.0);
  const TransformResult t = forward(p, x);
  for (Index k = 0; k < x.cols(); ++k) {
    const double r = x.col(k).norm();
    const double g2 = r / std::pow(0.7 + 0.3 * r * r, 0.4);
    const Vector expected = x.col(k) / r * g2;
    EXPECT_LT(testing::max_rel_err(t.y.col(k), expected), 1e-12);
  }
}

TEST(Forward, LogdetMatchesFdJacobian) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GdnParams p = random_params(3, seed);
    const Matrix x = random_normal(3, 20, seed + 100);
    const TransformResult t = forward(p, x);
    for (Index k = 0; k < x.cols(); ++k) {
      const Matrix J = fd_jacobian([&](const Vector& v) { return reference_forward(p, v); }, x.col(k));
      EXPECT_LT(testing::rel_err(t.logdet[k], testing::log_abs_det_lu(J), 1.0), 1e-5);
    }
  }
}

TEST(Forward, ReportsNonFiniteSample) {
  const GdnParams p = random_params(3, 1);
  Matrix x = random_normal(3, 4, 2);
  x(1, 2) = std::nan("");
  try {
    forward(p, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Numerical);
    EXPECT_NE(std::string(e.what()).find("sample 2"), std::string::npos);
  }
}

TEST(Forward, RejectsDimensionMismatch) {
  EXPECT_THROW(forward(identity_params(3), Matrix::Zero(2, 4)), Error);
}

TEST(Forward, OrthantPreserved) {
  const GdnParams p = random_params(8, 9);
  const Matrix x = random_normal(8, 500, 10);
  const TransformResult t = forward(p, x);
  EXPECT_TRUE((t.y.array().sign() == t.z.array().sign()).all());
}

TEST(Forward, LogdetAdditivity) {
  const GdnParams p = random_params(5, 12);
  const Matrix x = random_normal(5, 30, 13);
  const TransformResult t = forward(p, x);
  for (Index k = 0; k < x.cols(); ++k) {
    const Matrix Jz = jacobian_wrt_z(p, t.z.col(k));
    const double expected = std::log(std::abs(Jz.determinant())) + log_abs_det_h(p);
    EXPECT_NEAR(t.logdet[k], expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Forward, ThreadCountDoesNotChangeBits) {
  const GdnParams p = random_params(6, 1);
  const Matrix x = random_normal(6, 1000, 2);
  const TransformResult a = forward(p, x, 1);
  const TransformResult b = forward(p, x, 3);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.logdet, b.logdet);
}

TEST(Jacobian, IdentityConfiguration) {
  EXPECT_EQ(jacobian_wrt_input(identity_params(4), random_normal(4, 1, 0).col(0)), Matrix::Identity(4, 4));
}

TEST(Jacobian, DiagonalGammaGivesDiagonal) {
  const GdnParams p = project_constraints(random_params(5, 2), TyingConfig::diagonal_gamma());
  const Matrix J = jacobian_wrt_z(p, random_normal(5, 1, 3).col(0));
  EXPECT_TRUE(J.isDiagonal(0.0));
  EXPECT_TRUE((J.diagonal().array() > 0.0).all());
}

TEST(Jacobian, MatchesCentralFd) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GdnParams p = random_params(4, seed);
    const Vector x = random_normal(4, 1, seed + 50).col(0);
    const Matrix fd = fd_jacobian([&](const Vector& v) { return reference_forward(p, v); }, x);
    const Matrix J = jacobian_wrt_input(p, x);
    for (Index k = 0; k < 4; ++k) EXPECT_LT(testing::max_rel_err(J.col(k), fd.col(k)), 1e-5) << "seed " << seed;
  }
}

TEST(Jacobian, DiagonalGammaOutputsDecouple) {
  const GdnParams p = project_constraints(random_params(4, 8), TyingConfig::diagonal_gamma());
  const Vector x = random_normal(4, 1, 9).col(0);
  const Vector z = p.H * x;
  const Vector y0 = forward(p, x).y.col(0);
  for (Index j = 0; j < 4; ++j) {
    Vector z2 = z;
    z2[j] += 0.37;
    const Vector x2 = p.H.partialPivLu().solve(z2);
    const Vector y2 = forward(p, x2).y.col(0);
    for (Index i = 0; i < 4; ++i)
      if (i != j) EXPECT_NEAR(y2[i], y0[i], 1e-13 * std::max(1.0, std::abs(y0[i])));
  }
}

TEST(CheckPd, IdentityHasUnitEigenvalue) {
  const PdCheck c = check_pd(identity_params(3), Vector::Constant(3, 0.4));
  EXPECT_TRUE(c.positive_definite);
  EXPECT_DOUBLE_EQ(c.min_eigenvalue, 1.0);
}

TEST(CheckPd, DiagonalGammaAlwaysPositive) {
  const GdnParams p = project_constraints(random_params(5, 4, 2.0), TyingConfig::diagonal_gamma());
  const Matrix z = random_normal(5, 200, 5, 10.0);
  for (Index k = 0; k < z.cols(); ++k) EXPECT_TRUE(check_pd(p, z.col(k)).positive_definite);
}

TEST(CheckPd, DetectsAxisViolationWhenEpsilonTooLarge) {
  GdnParams p = identity_params(2);
  p.alpha.setConstant(2.0);
  p.gamma(0, 0) = 1.0;
  p.epsilon[0] = 0.9;  // alpha_00 epsilon_0 = 1.8 > 1, bypassing projection
  bool found = false;
  for (double t = 0.0; t <= 10.0; t += 0.05) {
    const Vector z = (Vector(2) << t, 0.0).finished();
    if (!check_pd(p, z).positive_definite) {
      found = true;
      // dy_0/dz_0 = D^-eps (1 - alpha eps gamma t^2 / D) turns negative once
      // gamma t^2 (alpha eps - 1) > beta.
      EXPECT_GT(t * t * 0.8, 1.0 - 1e-9);
      break;
    }
  }
  EXPECT_TRUE(found);
}

TEST(AxisMonotonicity, ValidParams) {
  const GdnParams p = random_params(3, 6, 1.0);
  for (Index i = 0; i < 3; ++i) {
    double prev = 0.0;
    for (double t = 0.0; t <= 50.0; t += 0.1) {
      Vector z = Vector::Zero(3);
      z[i] = t;
      const Vector x = p.H.partialPivLu().solve(z);
      const double y = std::abs(forward(p, x).y(i, 0));
      EXPECT_GE(y, prev - 1e-12);
      prev = y;
    }
  }
}

TEST(Inverse, IdentityIsExactInOneStep) {
  const GdnParams p = identity_params(4);
  const Matrix y = random_normal(4, 10, 1);
  const InverseResult r = invert(p, y);
  EXPECT_EQ(r.x, y);
  EXPECT_TRUE((r.iterations.array() == 1).all());
  EXPECT_TRUE(r.all_converged());
}

TEST(Inverse, RoundTripRandomParams) {
  const GdnParams p = random_params(16, 21, 0.05);
  const Matrix x = random_normal(16, 1000, 22);
  const TransformResult t = forward(p, x);
  const InverseResult r = invert(p, t.y);
  Index checked = 0;
  for (Index k = 0; k < x.cols(); ++k) {
    if (!pd_along_segment(p, t.z.col(k), 16)) continue;
    ++checked;
    EXPECT_TRUE(r.converged[std::size_t(k)]);
    EXPECT_LT((r.x.col(k) - x.col(k)).lpNorm<Eigen::Infinity>(), 1e-6) << "sample " << k;
  }
  EXPECT_GT(checked, 900);
}

TEST(Inverse, DegenerateInitialGuess) {
  GdnParams p = identity_params(2);
  p.alpha.setConstant(2.0);
  p.gamma(0, 0) = 1.0;
  p.gamma(1, 1) = 0.5;
  p.epsilon << 0.5, 0.5;  // alpha_ii epsilon_i == 1
  const Matrix x = random_normal(2, 50, 3, 3.0);
  const Matrix back = inverse(p, forward(p, x).y);
  EXPECT_LT((back - x).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Inverse, ReportsNonConvergence) {
  const GdnParams p = random_params(4, 2, 0.5);
  const Matrix y = forward(p, random_normal(4, 5, 3, 3.0)).y;
  InverseOptions opt;
  opt.max_iter = 1;
  opt.newton_iter = 0;
  const InverseResult r = invert(p, y, opt);
  EXPECT_FALSE(r.all_converged());
  try {
    inverse(p, y, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Numerical);
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos);
  }
}

TEST(Inverse, SingularH) {
  GdnParams p = identity_params(2);
  p.H.setZero();
  EXPECT_THROW(invert(p, Matrix::Zero(2, 1)), Error);
}

TEST(Inverse, ThreadCountDoesNotChangeBits) {
  const GdnParams p = random_params(5, 30, 0.1);
  const Matrix y = forward(p, random_normal(5, 300, 31)).y;
  InverseOptions one, three;
  three.threads = 3;
  EXPECT_EQ(invert(p, y, one).x, invert(p, y, three).x);
}

}  // namespace
}  // namespace gdn
