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

#include "gdn/model_io.hpp"
#include "gdn/pnm.hpp"
#include "gdn/transform.hpp"

namespace gdn {

/// log p(x) = log|det dy/dx| - 1/2 |y|^2 - (N/2) log(2 pi), per column.
Vector log_density(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads = 1);

/// Draws y ~ N(0, I) (the standard-normal generator stream of `seed`) and
/// maps it through the inverse. Samples whose inversion did not converge are
/// flagged in the result.
InverseResult sample(const GdnParams& params, Index count, std::uint64_t seed, const InverseOptions& options = {});

enum class ScoreMode { Analytic, FiniteDifference };

std::string to_string(ScoreMode mode);
ScoreMode score_mode_from_string(const std::string& name);

/// Gradient of log_density with respect to x, per column. Analytic mode uses
/// the closed-form second derivatives of the transform; FiniteDifference
/// mode takes central differences of log_density with step `fd_step`.
Matrix score(const GdnParams& params, const Eigen::Ref<const Matrix>& x, ScoreMode mode = ScoreMode::Analytic,
             double fd_step = 1e-5, int threads = 1);

struct DenoiseConfig {
  double sigma = 0.0;  // noise standard deviation in model units
  ScoreMode score_mode = ScoreMode::Analytic;
  double fd_step = 1e-5;
  /// Also compute the other score mode and throw Numerical when the two
  /// disagree beyond self_check_tolerance (relative, infinity norm).
  bool self_check = false;
  double self_check_tolerance = 1e-4;
  int threads = 1;

  void validate() const;
};

/// Empirical-Bayes least-squares estimate x_hat = x_tilde + sigma^2 score(x_tilde),
/// where `params` models the density of the noisy observations.
Matrix denoise(const GdnParams& params, const Eigen::Ref<const Matrix>& x_tilde, const DenoiseConfig& config);

/// Denoises a [0, 1] grayscale image with a patch model: every overlapping
/// patch (stride 1) of width meta.patch_width is mapped to model units with
/// `meta`, denoised at sigma * meta.scale, mapped back, and the overlapping
/// estimates are averaged. config.sigma is in image units here.
Image denoise_image(const Model& model, const Image& noisy, const DenoiseConfig& config);

/// 10 log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Mean SSIM over all 8 x 8 windows (stride 1, uniform weights) with
/// K1 = 0.01, K2 = 0.03 and dynamic range `peak`.
double ssim(const Image& a, const Image& b, double peak = 1.0);

}  // namespace gdn
