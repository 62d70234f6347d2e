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

#include <string>
#include <vector>

#include "gdn/model_io.hpp"
#include "gdn/trainer.hpp"
#include "gdn/transform.hpp"

namespace gdn {

/// A composition of complete (linear + normalization) stages; stage k
/// consumes the output of stage k - 1. Each stage carries its own linear map
/// in params.H.
struct Cascade {
  std::vector<Model> stages;
};

struct StageDiagnostics {
  double delta_j = 0.0;         // on the stage's input batch, nats
  double input_kurtosis = 0.0;  // mean excess kurtosis of the linear responses H x
  double input_ks = 0.0;        // mean KS vs N(0, 1) of the standardized responses
  bool identity_fallback = false;  // fitted stage lost negentropy and was replaced by the identity
};

struct CascadeFit {
  Cascade cascade;
  std::vector<StageDiagnostics> diagnostics;
  std::vector<FitReport> reports;
};

/// Greedy layer-wise fit: stage k is fitted on the outputs of stages
/// 0..k-1. Diagnostics are measured on `eval` (or the training data when
/// empty) pushed through the preceding stages. A stage whose delta_j on that
/// batch is negative is replaced by the identity configuration, so adding a
/// stage never increases the loss there. Errors carry the stage index.
CascadeFit fit_cascade(const Eigen::Ref<const Matrix>& x, const std::vector<FitConfig>& stage_configs,
                       const Eigen::Ref<const Matrix>& eval = Matrix());

/// y and the summed per-stage log|det| of the composition. An empty cascade
/// is the identity with logdet 0.
TransformResult forward_cascade(const Cascade& cascade, const Eigen::Ref<const Matrix>& x, int threads = 1);

/// Inverts the stages in reverse order; throws Numerical if a stage fails.
Matrix invert_cascade(const Cascade& cascade, const Eigen::Ref<const Matrix>& y, const InverseOptions& options = {});

/// delta_j of the composite transform on x.
double cascade_delta_j(const Cascade& cascade, const Eigen::Ref<const Matrix>& x, int threads = 1);

/// Per-stage delta_j with each stage evaluated on its own input; these sum
/// to cascade_delta_j.
std::vector<double> stage_delta_j(const Cascade& cascade, const Eigen::Ref<const Matrix>& x, int threads = 1);

inline constexpr std::uint32_t kCascadeVersion = 1;

/// "GDNC" | u32 version | u32 stage count | per stage: u64 byte length, model block.
std::string encode_cascade(const Cascade& cascade);
Cascade decode_cascade(std::string_view bytes);
void save_cascade(const std::string& path, const Cascade& cascade);
Cascade load_cascade(const std::string& path);

}  // namespace gdn
