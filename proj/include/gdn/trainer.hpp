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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdn/params.hpp"

namespace gdn {

enum class HInit { Identity, Zca };

struct FitConfig {
  Index batch_size = 256;
  int epochs = 50;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  TyingConfig tying;
  HInit h_init = HInit::Identity;
  double gamma_init = 0.1;
  int threads = 1;
  /// Samples probed each epoch for the smallest symmetric-part eigenvalue.
  Index pd_probes = 16;
  /// Start from these parameters instead of init_params (projected first).
  std::optional<GdnParams> initial;

  /// Throws InvalidArgument on out-of-range fields.
  void validate(Index dim) const;
};

struct EpochStats {
  double loss = 0.0;          // mean batch loss before each step
  double delta_j = 0.0;       // mean of (1/2 |x|^2 - loss) over batches
  double min_logdet = 0.0;    // smallest per-sample log|det dy/dx| seen
  Index clamped = 0;          // entries moved by projection, summed over steps
  double min_pd_eigenvalue = 0.0;  // over the probe samples, end of epoch
  Index rejected_steps = 0;   // steps dropped by the divergence guard
  Index halvings = 0;         // step-size halvings by the divergence guard
};

struct FitReport {
  std::vector<EpochStats> epochs;
  GdnParams params;
  bool diverged = false;
  std::string diagnostic;  // empty unless diverged
};

/// Projected Adam on the mean loss over `x` (N x M, samples are columns).
/// Each epoch visits a seeded permutation of the samples in batches of
/// batch_size, dropping the remainder. After each step the parameters are
/// projected onto the constraint set. A step whose result has a per-sample
/// log-determinant below log(1e-12) on its batch (or is not finite) is
/// retried with half the step, up to 5 times, and then dropped.
/// On divergence the last valid parameters are returned with a diagnostic.
FitReport fit(const Eigen::Ref<const Matrix>& x, const FitConfig& config);

struct VariantScore {
  Variant variant = Variant::Full;
  double delta_j = 0.0;          // nats, on the evaluation batch
  double delta_j_per_dim = 0.0;  // nats per dimension
  FitReport report;
};

/// Fits DiagonalGamma (ICA-MG), Radial (RG) and Full GDN with the same
/// config and seed and scores each with delta_j on `eval` (or on the
/// training data when `eval` is empty). Full starts from whichever special
/// case has the lower training loss; `base.initial` is ignored.
std::vector<VariantScore> fit_special_cases(const Eigen::Ref<const Matrix>& x, const FitConfig& base,
                                            const Eigen::Ref<const Matrix>& eval = Matrix());

std::string to_string(HInit h);
HInit h_init_from_string(const std::string& name);

}  // namespace gdn
