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
#include <string>
#include <vector>

#include "gdn/pnm.hpp"
#include "gdn/trainer.hpp"

namespace gdn {

/// 5 x 5 first derivative of a Gaussian (sigma 1) along the horizontal axis,
/// scaled to unit Euclidean norm. Responds to vertical edges.
Matrix oriented_filter_kernel();

/// 2-D correlation restricted to positions where the kernel fits.
Image filter_valid(const Image& image, const Matrix& kernel);

/// Up to `count` pairs (r, c), (r, c + distance) drawn uniformly from all
/// horizontally separated positions across the responses, as a 2 x M
/// matrix. Throws InvalidArgument when fewer than `min_count` positions exist.
Matrix coefficient_pairs(const std::vector<Image>& responses, Index distance, Index count, std::uint64_t seed,
                         Index min_count = 1000);

struct MiCurveConfig {
  std::vector<Index> distances{1, 2, 4, 8, 16, 32, 64, 128};
  Index pairs = 20000;
  Index min_pairs = 1000;
  FitConfig fit;  // tying is overridden per variant
  std::uint64_t seed = 0;
};

struct MiCurvePoint {
  Index distance = 0;
  Index pairs = 0;
  double raw = 0.0;
  double ica_mg = 0.0;
  double rg = 0.0;
  double gdn = 0.0;
};

/// For each distance: filter the images, draw coefficient pairs, scale them
/// to unit variance, fit the 2-D DiagonalGamma, Radial and Full models, and
/// measure the MI of each transformed pair sample. The Full model starts
/// from whichever special-case fit reached the lower training loss.
std::vector<MiCurvePoint> pairwise_mi_curve(const std::vector<Image>& images, const MiCurveConfig& config);

/// CSV with header "distance,variant,mi"; variants raw, ica_mg, rg, gdn.
std::string format_mi_curve(const std::vector<MiCurvePoint>& points);

}  // namespace gdn
