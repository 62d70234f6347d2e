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

/// Per-sample pieces of the training loss and their batch mean
///   loss = mean(1/2 |y|^2 - log|det dy/dx|),
/// the negentropy of the output up to terms that do not depend on the
/// parameters (equivalently, the mean negative log-likelihood of the induced
/// density up to a constant).
struct LossTerms {
  Vector quad;    // 1/2 |y|^2
  Vector logdet;  // log|det dy/dx|
  double loss = 0.0;
};

LossTerms loss(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads = 1);

struct GradientResult {
  GdnParams grad;      // d loss / d theta, reduced to the tying scheme
  double loss = 0.0;   // loss at the evaluation point
  double input_quad = 0.0;  // mean 1/2 |x|^2 of the batch
  double min_logdet = 0.0;  // smallest per-sample log|det dy/dx|
};

/// Closed-form gradient of loss() with respect to H, alpha, beta, gamma and
/// epsilon. Throws Numerical when the Jacobian is singular for some sample.
GradientResult grad_params(const GdnParams& params, const Eigen::Ref<const Matrix>& x, const TyingConfig& tying,
                           int threads = 1);

}  // namespace gdn
