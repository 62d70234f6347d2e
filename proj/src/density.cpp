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

#include "gdn/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gdn/data.hpp"
#include "gdn/error.hpp"
#include "kernel.hpp"
#include "parallel.hpp"

namespace gdn {

Vector log_density(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads) {
  const TransformResult t = forward(params, x, threads);
  const double norm = 0.5 * static_cast<double>(params.dim()) * std::log(2.0 * std::numbers::pi);
  return (t.logdet - 0.5 * t.y.colwise().squaredNorm().transpose()).array() - norm;
}

InverseResult sample(const GdnParams& params, Index count, std::uint64_t seed, const InverseOptions& options) {
  if (count < 0) throw invalid_argument("sample count must be nonnegative");
  const Matrix y = gen_gsm(params.dim(), ScaleDistribution::constant(1.0), count, seed).data;
  return invert(params, y, options);
}

std::string to_string(ScoreMode mode) { return mode == ScoreMode::Analytic ? "analytic" : "fd"; }

ScoreMode score_mode_from_string(const std::string& name) {
  if (name == "analytic") return ScoreMode::Analytic;
  if (name == "fd") return ScoreMode::FiniteDifference;
  throw invalid_argument("unknown score mode '" + name + "' (expected analytic or fd)");
}

Matrix score(const GdnParams& params, const Eigen::Ref<const Matrix>& x, ScoreMode mode, double fd_step,
             int threads) {
  const Index n = params.dim();
  const Index m = x.cols();
  if (x.rows() != n) throw invalid_argument("score: input dimension does not match model");
  Matrix out(n, m);

  if (mode == ScoreMode::FiniteDifference) {
    if (!(fd_step > 0.0)) throw invalid_argument("fd_step must be positive");
    detail::parallel_blocks(detail::block_count(m), threads, [&](Index b) {
      const Index begin = b * detail::kBlockSize;
      const Index len = std::min(detail::kBlockSize, m - begin);
      Matrix probe(n, 2 * n);
      for (Index k = begin; k < begin + len; ++k) {
        for (Index i = 0; i < n; ++i) {
          probe.col(2 * i) = x.col(k);
          probe.col(2 * i + 1) = x.col(k);
          probe(i, 2 * i) += fd_step;
          probe(i, 2 * i + 1) -= fd_step;
        }
        const Vector lp = log_density(params, probe);
        for (Index i = 0; i < n; ++i) out(i, k) = (lp[2 * i] - lp[2 * i + 1]) / (2.0 * fd_step);
      }
    });
    return out;
  }

  const Matrix z = params.H * x;
  const bool diag = has_diagonal_gamma(params);
  detail::parallel_blocks(detail::block_count(m), threads, [&](Index b) {
    const Index begin = b * detail::kBlockSize;
    const Index len = std::min(detail::kBlockSize, m - begin);
    detail::SampleState st;
    Matrix M;
    Vector dl_dz(n);
    for (Index k = begin; k < begin + len; ++k) {
      detail::evaluate(params, z.col(k), st);
      const Matrix J = detail::normalization_jacobian(params, st);
      double logdet = 0.0;
      if (!detail::inverse_transpose(J, diag, M, logdet))
        throw numerical_error("score: singular Jacobian at sample " + std::to_string(k));
      detail::backward(params, st, J, M, nullptr, dl_dz);
      out.col(k).noalias() = -(params.H.transpose() * dl_dz);
    }
  });
  if (!out.allFinite()) throw numerical_error("score: non-finite value");
  return out;
}

void DenoiseConfig::validate() const {
  if (!(sigma > 0.0)) throw invalid_argument("sigma must be positive");
  if (score_mode == ScoreMode::FiniteDifference && !(fd_step > 0.0))
    throw invalid_argument("fd_step must be positive in fd mode");
  if (self_check && !(fd_step > 0.0)) throw invalid_argument("self_check needs a positive fd_step");
  if (threads < 1) throw invalid_argument("threads must be at least 1");
}

Matrix denoise(const GdnParams& params, const Eigen::Ref<const Matrix>& x_tilde, const DenoiseConfig& config) {
  config.validate();
  const Matrix s = score(params, x_tilde, config.score_mode, config.fd_step, config.threads);
  if (config.self_check) {
    const ScoreMode other =
        config.score_mode == ScoreMode::Analytic ? ScoreMode::FiniteDifference : ScoreMode::Analytic;
    const Matrix t = score(params, x_tilde, other, config.fd_step, config.threads);
    for (Index k = 0; k < s.cols(); ++k) {
      const double scale = std::max(s.col(k).lpNorm<Eigen::Infinity>(), 1e-12);
      const double err = (s.col(k) - t.col(k)).lpNorm<Eigen::Infinity>() / scale;
      if (err > config.self_check_tolerance)
        throw numerical_error("denoise: analytic and fd scores disagree at sample " + std::to_string(k) +
                              " (relative error " + std::to_string(err) + ")");
    }
  }
  return x_tilde + config.sigma * config.sigma * s;
}

Image denoise_image(const Model& model, const Image& noisy, const DenoiseConfig& config) {
  config.validate();
  const Index w = model.meta.patch_width;
  if (w < 1 || w * w != model.params.dim()) throw invalid_argument("denoise_image: model has no patch width");
  if (model.meta.gaussianizer)
    throw invalid_argument("denoise_image: models with a pointwise Gaussianizer are not supported");
  if (noisy.rows() < w || noisy.cols() < w) throw invalid_argument("denoise_image: image smaller than a patch");

  const Index rows = noisy.rows() - w + 1;
  const Index cols = noisy.cols() - w + 1;
  const Index count = rows * cols;
  Matrix patches(w * w, count);
  Vector means = Vector::Zero(count);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const Index k = r * cols + c;
      for (Index i = 0; i < w; ++i)
        for (Index j = 0; j < w; ++j) patches(i * w + j, k) = noisy(r + i, c + j);
      if (model.meta.mean_removed) means[k] = patches.col(k).mean();
    }
  const Matrix x = ((patches.rowwise() - means.transpose()).array() - model.meta.offset) * model.meta.scale;

  DenoiseConfig cfg = config;
  cfg.sigma = config.sigma * model.meta.scale;
  const Matrix xh = denoise(model.params, x, cfg);
  const Matrix back = (xh.array() / model.meta.scale + model.meta.offset).matrix().rowwise() + means.transpose();

  Image sum = Image::Zero(noisy.rows(), noisy.cols());
  Image hits = Image::Zero(noisy.rows(), noisy.cols());
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const Index k = r * cols + c;
      for (Index i = 0; i < w; ++i)
        for (Index j = 0; j < w; ++j) {
          sum(r + i, c + j) += back(i * w + j, k);
          hits(r + i, c + j) += 1.0;
        }
    }
  return sum.cwiseQuotient(hits);
}

double psnr(const Image& a, const Image& b, double peak) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw invalid_argument("psnr: image sizes differ");
  if (a.size() == 0) throw invalid_argument("psnr: empty image");
  const double mse = (a - b).squaredNorm() / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& a, const Image& b, double peak) {
  constexpr Index kWindow = 8;
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw invalid_argument("ssim: image sizes differ");
  if (a.rows() < kWindow || a.cols() < kWindow) throw invalid_argument("ssim: image smaller than the window");
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const double inv_n = 1.0 / static_cast<double>(kWindow * kWindow);
  double total = 0.0;
  Index windows = 0;
  for (Index r = 0; r + kWindow <= a.rows(); ++r)
    for (Index c = 0; c + kWindow <= a.cols(); ++c) {
      const auto wa = a.block(r, c, kWindow, kWindow).array();
      const auto wb = b.block(r, c, kWindow, kWindow).array();
      const double ma = wa.sum() * inv_n;
      const double mb = wb.sum() * inv_n;
      const double va = (wa - ma).square().sum() * inv_n;
      const double vb = (wb - mb).square().sum() * inv_n;
      const double cov = ((wa - ma) * (wb - mb)).sum() * inv_n;
      total += (2.0 * ma * mb + c1) * (2.0 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  return total / static_cast<double>(windows);
}

}  // namespace gdn
