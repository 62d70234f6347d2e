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

#pragma once

#include "gdn/params.hpp"

namespace gdn {

/// Monotone scalar map that marginally Gaussianizes intensities:
///
///   apply(v) = Phi^-1(F(v)),   F(v) = 1 - (1 - sigmoid((v - location) / scale)^shape)^asymmetry
///
/// F is a four-parameter generalized logistic distribution function (shape
/// controls the lower tail, asymmetry the upper tail); with shape ==
/// asymmetry == 1 it is the plain logistic. apply() is strictly increasing on
/// the real line and maps F-distributed input to a standard normal, which
/// also removes the mean.
struct PointwiseGaussianizer {
  double location = 0.0;
  double scale = 1.0;
  double shape = 1.0;
  double asymmetry = 1.0;
  /// Range of the fitting data. The map is defined everywhere; outside this
  /// range it extrapolates the fitted tails.
  double lower = 0.0;
  double upper = 0.0;

  double apply(double v) const;
  double invert(double u) const;
  /// d apply / d v, for log-Jacobian bookkeeping.
  double derivative(double v) const;

  Matrix apply(const Matrix& v) const { return v.unaryExpr([this](double t) { return apply(t); }); }
  Matrix invert(const Matrix& u) const { return u.unaryExpr([this](double t) { return invert(t); }); }
};

/// Least-squares match of apply() at the 1%..99% sample quantiles to the
/// corresponding standard normal quantiles (Levenberg-Marquardt). Throws
/// InvalidArgument for fewer than 2 samples or constant input.
PointwiseGaussianizer fit_pointwise_gaussianizer(const Eigen::Ref<const Vector>& intensities);

}  // namespace gdn
