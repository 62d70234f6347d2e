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

#include "gdn/gaussianizer.hpp"
#include "gdn/params.hpp"

namespace gdn {

/// How raw data maps to model input:  x = (raw - offset) * scale, with an
/// optional pointwise Gaussianizer applied to raw values first.
struct PreprocMeta {
  double offset = 0.0;
  double scale = 1.0;
  std::uint32_t patch_width = 0;
  bool mean_removed = false;
  std::optional<PointwiseGaussianizer> gaussianizer;
};

struct Model {
  GdnParams params;
  TyingConfig tying;
  PreprocMeta meta;
};

inline constexpr std::uint32_t kModelVersion = 1;

/// Binary model layout (little-endian):
///   "GDNM" | u32 version | u32 dim | u32 variant | f64 p
///   | u32 #subspaces, then per subspace: u32 size, u32 indices...
///   | f64 H, alpha (row-major N x N) | f64 beta (N) | f64 gamma (N x N) | f64 epsilon (N)
///   | f64 offset | f64 scale | u32 patch_width | u8 mean_removed
///   | u8 has_gaussianizer [ f64 location, scale, shape, asymmetry, lower, upper ]
std::string encode_model(const Model& model);

/// Throws Format on bad magic, version mismatch, truncation, trailing bytes,
/// or parameters that violate the model invariants.
Model decode_model(std::string_view bytes);

void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace gdn
