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

#include "gdn/error.hpp"
#include "gdn/mi_curve.hpp"
#include "oracles.hpp"

namespace gdn {
namespace {

TEST(OrientedFilter, ZeroMeanUnitNormAntisymmetric) {
  const Matrix k = oriented_filter_kernel();
  EXPECT_NEAR(k.sum(), 0.0, 1e-15);
  EXPECT_NEAR(k.norm(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(k(2, 0), -k(2, 4));
  EXPECT_EQ(k(1, 2), 0.0);
  EXPECT_DOUBLE_EQ(k(0, 1), k(4, 1));
}

TEST(OrientedFilter, RespondsToVerticalEdges) {
  Image edge = Image::Zero(9, 9);
  edge.rightCols(4).setOnes();
  Image flat = Image::Ones(9, 9);
  const Image r = filter_valid(edge, oriented_filter_kernel());
  EXPECT_EQ(r.rows(), 5);
  EXPECT_GT(r.cwiseAbs().maxCoeff(), 0.5);
  EXPECT_LT(filter_valid(flat, oriented_filter_kernel()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(filter_valid(edge.transpose(), oriented_filter_kernel()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CoefficientPairs, OffsetsAndDeterminism) {
  Image r(3, 10);
  for (Index i = 0; i < r.rows(); ++i)
    for (Index j = 0; j < r.cols(); ++j) r(i, j) = 100.0 * i + j;
  const Matrix p = coefficient_pairs({r}, 4, 15, 1, 10);
  ASSERT_EQ(p.cols(), 15);
  for (Index k = 0; k < p.cols(); ++k) EXPECT_EQ(p(1, k) - p(0, k), 4.0);
  EXPECT_EQ(p, coefficient_pairs({r}, 4, 15, 1, 10));
  EXPECT_THROW(coefficient_pairs({r}, 8, 15, 1, 10), Error);  // only 6 positions
  EXPECT_THROW(coefficient_pairs({r}, 0, 15, 1, 1), Error);
}

TEST(MiCurve, FormatsRows) {
  const std::string s = format_mi_curve({{4, 100, 0.5, 0.1, 0.2, 0.05}});
  EXPECT_EQ(s, "distance,variant,mi\n4,raw,0.5\n4,ica_mg,0.1\n4,rg,0.2\n4,gdn,0.05\n");
}

}  // namespace
}  // namespace gdn
