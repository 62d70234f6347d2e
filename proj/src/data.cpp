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

#include "gdn/data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bytes.hpp"
#include "gdn/error.hpp"

namespace gdn {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

Vector vectorize(const Image& image, Index row, Index col, Index size) {
  Vector v(size * size);
  for (Index r = 0; r < size; ++r)
    for (Index c = 0; c < size; ++c) v[r * size + c] = image(row + r, col + c);
  return v;
}

template <typename Fill>
Matrix generate(Index dim, Index count, std::uint64_t seed, Fill&& fill) {
  Matrix out(dim, count);
  for (Index chunk = 0; chunk * kGeneratorChunk < count; ++chunk) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(chunk)));
    const Index end = std::min(count, (chunk + 1) * kGeneratorChunk);
    for (Index k = chunk * kGeneratorChunk; k < end; ++k) fill(rng, out.col(k));
  }
  return out;
}

}  // namespace

PatchSet extract_patches(const Image& image, Index size, Index stride, std::uint64_t seed, Index max_count) {
  if (size < 1) throw invalid_argument("patch size must be positive");
  if (image.rows() < size || image.cols() < size) throw invalid_argument("image smaller than patch size");
  PatchSet out;
  out.patch_width = size;
  std::vector<Vector> cols;
  if (stride > 0) {
    for (Index r = 0; r + size <= image.rows(); r += stride)
      for (Index c = 0; c + size <= image.cols(); c += stride) {
        if (max_count > 0 && Index(cols.size()) >= max_count) break;
        cols.push_back(vectorize(image, r, c, size));
      }
    out.source = "grid stride " + std::to_string(stride);
  } else {
    if (max_count < 1) throw invalid_argument("random patch extraction needs max_count > 0");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> row(0, image.rows() - size);
    std::uniform_int_distribution<Index> col(0, image.cols() - size);
    for (Index k = 0; k < max_count; ++k) {
      const Index r = row(rng);
      const Index c = col(rng);
      cols.push_back(vectorize(image, r, c, size));
    }
    out.source = "random seed " + std::to_string(seed);
  }
  out.data.resize(size * size, Index(cols.size()));
  for (Index k = 0; k < Index(cols.size()); ++k) out.data.col(k) = cols[std::size_t(k)];
  return out;
}

PatchSet extract_patches(const std::vector<Image>& images, Index size, Index count, std::uint64_t seed) {
  if (images.empty()) throw invalid_argument("no images to extract patches from");
  PatchSet out;
  out.patch_width = size;
  out.data.resize(size * size, count);
  const Index n_img = Index(images.size());
  Index filled = 0;
  for (Index i = 0; i < n_img; ++i) {
    const Index share = count / n_img + (i < count % n_img ? 1 : 0);
    if (share == 0) continue;
    const PatchSet part = extract_patches(images[std::size_t(i)], size, 0, splitmix64(seed ^ std::uint64_t(i)), share);
    out.data.middleCols(filled, share) = part.data;
    filled += share;
  }
  out.source = std::to_string(n_img) + " images, random seed " + std::to_string(seed);
  return out;
}

SaturationFilter filter_saturated(const std::vector<PnmImage>& images, double fraction) {
  SaturationFilter out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const PnmImage& img = images[i];
    std::size_t top = 0;
    for (std::uint16_t v : img.samples) top += (v == img.maxval);
    if (static_cast<double>(top) > fraction * static_cast<double>(img.samples.size())) {
      out.removed.push_back(i);
    } else {
      out.kept.push_back(img);
    }
  }
  return out;
}

double srgb_decode(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

Image srgb_to_linear(const PnmImage& img) {
  Image out(img.height, img.width);
  const double scale = 1.0 / img.maxval;
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      if (img.channels == 1) {
        out(r, c) = srgb_decode(img.at(r, c) * scale);
      } else {
        out(r, c) = 0.2126 * srgb_decode(img.at(r, c, 0) * scale) + 0.7152 * srgb_decode(img.at(r, c, 1) * scale) +
                    0.0722 * srgb_decode(img.at(r, c, 2) * scale);
      }
    }
  return out;
}

PatchSet gen_gsm(Index dim, const ScaleDistribution& scale, Index count, std::uint64_t seed) {
  if (dim < 1 || count < 0) throw invalid_argument("gen_gsm: bad dimension or count");
  if (scale.kind == ScaleDistribution::Kind::Uniform && !(scale.a > 0.0 && scale.b >= scale.a))
    throw invalid_argument("gen_gsm: uniform scale needs 0 < low <= high");
  PatchSet out;
  out.data = generate(dim, count, seed, [&](std::mt19937_64& rng, auto col) {
    std::normal_distribution<double> normal;
    double s = scale.a;
    if (scale.kind == ScaleDistribution::Kind::Uniform) {
      s = std::uniform_real_distribution<double>(scale.a, scale.b)(rng);
    } else if (scale.kind == ScaleDistribution::Kind::LogNormal) {
      s = std::exp(scale.a * normal(rng));
    }
    for (Index i = 0; i < dim; ++i) col[i] = s * normal(rng);
  });
  out.source = "gsm seed " + std::to_string(seed);
  return out;
}

PatchSet gen_ica_laplace(const Matrix& mixing, Index count, std::uint64_t seed) {
  if (mixing.rows() != mixing.cols() || mixing.rows() < 1) throw invalid_argument("gen_ica_laplace: mixing must be square");
  const Index dim = mixing.rows();
  const Matrix sources = generate(dim, count, seed, [&](std::mt19937_64& rng, auto col) {
    std::exponential_distribution<double> expo(1.0);
    std::bernoulli_distribution coin(0.5);
    // Laplace(0, 1/sqrt 2) has unit variance.
    for (Index i = 0; i < dim; ++i) col[i] = (coin(rng) ? 1.0 : -1.0) * expo(rng) / std::sqrt(2.0);
  });
  PatchSet out;
  out.data = mixing * sources;
  out.source = "ica_laplace seed " + std::to_string(seed);
  return out;
}

PatchSet gen_lp_radial(Index dim, double p, Index count, std::uint64_t seed, double spread) {
  if (dim < 1 || !(p > 0.0)) throw invalid_argument("gen_lp_radial: bad dimension or exponent");
  PatchSet out;
  out.data = generate(dim, count, seed, [&](std::mt19937_64& rng, auto col) {
    std::gamma_distribution<double> gamma(1.0 / p, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> normal;
    // |g|^p / p ~ Gamma(1/p, 1) gives density proportional to exp(-|g|^p / p).
    const double s = std::exp(spread * normal(rng));
    for (Index i = 0; i < dim; ++i) {
      const double mag = std::pow(p * gamma(rng), 1.0 / p);
      col[i] = s * (coin(rng) ? mag : -mag);
    }
  });
  out.source = "lp_radial p=" + std::to_string(p) + " seed " + std::to_string(seed);
  return out;
}

std::string encode_patchset(const PatchSet& set) {
  detail::ByteWriter w;
  w.magic("GDNP");
  w.u64(static_cast<std::uint64_t>(set.count()));
  w.u64(static_cast<std::uint64_t>(set.dim()));
  w.raw(set.data.data(), static_cast<std::size_t>(set.data.size()) * 8);
  return w.take();
}

PatchSet decode_patchset(const std::string& bytes) {
  detail::ByteReader r(bytes, "patch set");
  r.expect_magic("GDNP");
  const std::uint64_t m = r.u64();
  const std::uint64_t n = r.u64();
  if (n == 0 || n > (1u << 20) || m > (std::uint64_t(1) << 40)) throw format_error("patch set: bad shape");
  if (r.remaining() != m * n * 8) throw format_error("patch set: payload size does not match header");
  PatchSet set;
  set.data.resize(Index(n), Index(m));
  r.raw(set.data.data(), static_cast<std::size_t>(m * n * 8));
  if (!set.data.allFinite()) throw format_error("patch set: non-finite entries");
  return set;
}

void write_patchset(const std::string& path, const PatchSet& set) { detail::write_file(path, encode_patchset(set)); }

PatchSet read_patchset(const std::string& path) {
  PatchSet set = decode_patchset(detail::read_file(path));
  set.source = path;
  return set;
}

Matrix zca_whitening(const Eigen::Ref<const Matrix>& x) {
  const Index m = x.cols();
  if (m < 2) throw invalid_argument("zca_whitening needs at least 2 samples");
  const Vector mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / static_cast<double>(m - 1);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const double floor = 1e-10 * std::max(eig.eigenvalues().maxCoeff(), 1e-300);
  const Vector scale = eig.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace gdn
