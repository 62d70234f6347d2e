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

#include <vector>

#include "gdn/params.hpp"

namespace gdn {

/// Batched forward result. Samples are columns.
struct TransformResult {
  Matrix z;       // H x
  Matrix y;       // normalized output
  Vector logdet;  // log|det dy/dx| per sample
};

/// Forward map of a batch (N x M, one sample per column). Throws Numerical
/// with the sample and component index when an intermediate is non-finite.
TransformResult forward(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads = 1);

/// dy/dz at a single point z.
Matrix jacobian_wrt_z(const GdnParams& params, const Eigen::Ref<const Vector>& z);

/// dy/dx = (dy/dz) H at a single input x.
Matrix jacobian_wrt_input(const GdnParams& params, const Eigen::Ref<const Vector>& x);

/// log|det H|.
double log_abs_det_h(const GdnParams& params);

struct PdCheck {
  bool positive_definite = false;
  double min_eigenvalue = 0.0;  // of the symmetric part of dy/dz
};

/// Positive definiteness of the symmetric part of dy/dz at z. This is the
/// sufficient condition for the normalization stage to be invertible.
PdCheck check_pd(const GdnParams& params, const Eigen::Ref<const Vector>& z);

/// True when check_pd holds at `steps` + 1 evenly spaced points on the
/// segment from 0 to z.
bool pd_along_segment(const GdnParams& params, const Eigen::Ref<const Vector>& z, int steps = 32);

struct InverseOptions {
  double tolerance = 1e-10;  // on |z(n+1) - z(n)|_inf
  int max_iter = 200;
  int newton_iter = 50;  // fallback when the fixed point stalls; 0 disables
  int threads = 1;
};

struct InverseResult {
  Matrix x;
  Matrix z;
  Vector residual;            // |forward(x).y - y|_inf per sample
  Eigen::VectorXi iterations;  // fixed-point plus Newton iterations used
  std::vector<bool> converged;
  bool all_converged() const;
};

/// Inverts the transform sample by sample: a fixed-point iteration on the
/// normalization, then x = H^-1 z. Non-converged samples are flagged in the
/// result rather than thrown.
InverseResult invert(const GdnParams& params, const Eigen::Ref<const Matrix>& y, const InverseOptions& options = {});

/// Same as invert() but throws Numerical naming the first sample that did not
/// converge, with its residual.
Matrix inverse(const GdnParams& params, const Eigen::Ref<const Matrix>& y, const InverseOptions& options = {});

}  // namespace gdn
