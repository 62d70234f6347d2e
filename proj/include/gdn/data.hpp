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

namespace gdn {

/// A set of N-dimensional data vectors. Samples are the columns of `data`
/// (N x M); on disk the same bytes read as a row-major M x N matrix.
struct PatchSet {
  Matrix data;
  std::string source;   // provenance, free text
  std::string preproc;  // applied pointwise map and mean handling
  Index patch_width = 0;  // 0 unless image-sourced

  Index dim() const { return data.rows(); }
  Index count() const { return data.cols(); }
};

/// Vectorized (row-major) size x size patches. With stride > 0 the patches
/// sit on a stride grid starting at the top-left corner; with stride == 0,
/// `max_count` patches are taken at uniformly random offsets drawn from
/// `seed`. For grid mode a positive max_count keeps the first max_count.
PatchSet extract_patches(const Image& image, Index size, Index stride, std::uint64_t seed, Index max_count);

/// Random patches pooled over several images, `count` in total, spread as
/// evenly as possible over the images.
PatchSet extract_patches(const std::vector<Image>& images, Index size, Index count, std::uint64_t seed);

struct SaturationFilter {
  std::vector<PnmImage> kept;
  std::vector<std::size_t> removed;  // indices into the input
};

/// Drops images with more than `top_bin_fraction` of their samples in the
/// highest histogram bin (value == maxval). Exactly at the threshold is kept.
SaturationFilter filter_saturated(const std::vector<PnmImage>& images, double top_bin_fraction = 0.001);

/// sRGB electro-optical transfer of one encoded channel value in [0, 1].
double srgb_decode(double encoded);

/// Linear luminance (Rec. 709 weights on linearized channels), in [0, 1].
/// Graymaps are linearized as if all three channels carried the value.
Image srgb_to_linear(const PnmImage& image);

/// Scale-mixing distribution of a Gaussian scale mixture.
struct ScaleDistribution {
  enum class Kind { Constant, Uniform, LogNormal } kind = Kind::Constant;
  double a = 1.0;  // Constant: value; Uniform: low;  LogNormal: sigma of log s
  double b = 1.0;  // Uniform: high

  static ScaleDistribution constant(double s) { return {Kind::Constant, s, s}; }
  static ScaleDistribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static ScaleDistribution log_normal(double sigma) { return {Kind::LogNormal, sigma, 0.0}; }
};

// Generators draw in chunks of kGeneratorChunk samples; chunk k uses an
// mt19937_64 seeded with splitmix64(seed + k). Output depends only on the
// seed and the count, never on how chunks are scheduled.
inline constexpr Index kGeneratorChunk = 4096;

/// x = s g with g ~ N(0, I) and s drawn from `scale`.
PatchSet gen_gsm(Index dim, const ScaleDistribution& scale, Index count, std::uint64_t seed);

/// x = A l with l_i iid unit-variance Laplacian sources and A = `mixing`.
PatchSet gen_ica_laplace(const Matrix& mixing, Index count, std::uint64_t seed);

/// Lp-symmetric samples: iid p-generalized normal components (an
/// Lp-spherical law) multiplied by a log-normal radial scale exp(spread n).
PatchSet gen_lp_radial(Index dim, double p, Index count, std::uint64_t seed, double spread = 0.75);

/// Binary dataset file: "GDNP", u64 M, u64 N, then M x N float64 row-major.
void write_patchset(const std::string& path, const PatchSet& set);
PatchSet read_patchset(const std::string& path);
std::string encode_patchset(const PatchSet& set);
PatchSet decode_patchset(const std::string& bytes);

/// Symmetric whitening matrix C^-1/2 of the sample covariance of the columns.
Matrix zca_whitening(const Eigen::Ref<const Matrix>& x);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gdn
