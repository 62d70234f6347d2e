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

#include "gdn/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

#include "gdn/error.hpp"
#include "gdn/transform.hpp"
#include "kernel.hpp"
#include "parallel.hpp"

namespace gdn {

namespace {

struct Partial {
  Matrix dz_xt;  // sum of (d l / d z) x^T
  GdnParams grad;
  double loss_sum = 0.0;  // excludes log|det H|
  double input_quad_sum = 0.0;
  double min_logdet_j = std::numeric_limits<double>::infinity();

  Partial& operator+=(const Partial& o) {
    dz_xt += o.dz_xt;
    grad.alpha += o.grad.alpha;
    grad.beta += o.grad.beta;
    grad.gamma += o.grad.gamma;
    grad.epsilon += o.grad.epsilon;
    loss_sum += o.loss_sum;
    input_quad_sum += o.input_quad_sum;
    min_logdet_j = std::min(min_logdet_j, o.min_logdet_j);
    return *this;
  }
};

}  // namespace

LossTerms loss(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads) {
  const TransformResult t = forward(params, x, threads);
  LossTerms out;
  out.quad = 0.5 * t.y.colwise().squaredNorm().transpose();
  out.logdet = t.logdet;
  const Vector per_sample = out.quad - out.logdet;
  std::vector<double> parts(static_cast<std::size_t>(detail::block_count(x.cols())));
  for (std::size_t b = 0; b < parts.size(); ++b) {
    const Index begin = Index(b) * detail::kBlockSize;
    const Index len = std::min(detail::kBlockSize, x.cols() - begin);
    parts[b] = per_sample.segment(begin, len).sum();
  }
  out.loss = detail::tree_reduce(std::move(parts)) / static_cast<double>(x.cols());
  return out;
}

GradientResult grad_params(const GdnParams& p, const Eigen::Ref<const Matrix>& x, const TyingConfig& tying,
                           int threads) {
  const Index n = p.dim();
  const Index m = x.cols();
  if (x.rows() != n) throw invalid_argument("input batch dimension does not match model");
  if (m < 1) throw invalid_argument("empty batch");

  const Eigen::PartialPivLU<Matrix> h_lu(p.H);
  if (!(h_lu.rcond() > 1e-14)) throw numerical_error("H is singular");
  const double logdet_h = detail::log_abs_det(p.H, false);
  const bool diag = has_diagonal_gamma(p);
  const Matrix z_all = p.H * x;

  std::vector<Partial> parts(static_cast<std::size_t>(detail::block_count(m)));
  detail::parallel_blocks(Index(parts.size()), threads, [&](Index b) {
    const Index begin = b * detail::kBlockSize;
    const Index len = std::min(detail::kBlockSize, m - begin);
    Partial& acc = parts[std::size_t(b)];
    acc.grad = zeros_like(n);
    Matrix G(n, len);
    detail::SampleState st;
    Matrix M;
    for (Index k = 0; k < len; ++k) {
      detail::evaluate(p, z_all.col(begin + k), st);
      const Matrix J = detail::normalization_jacobian(p, st);
      double logdet_j = 0.0;
      if (!detail::inverse_transpose(J, diag, M, logdet_j) || !std::isfinite(logdet_j)) {
        std::ostringstream msg;
        msg << "singular Jacobian at sample " << (begin + k);
        throw numerical_error(msg.str());
      }
      detail::backward(p, st, J, M, &acc.grad, G.col(k));
      acc.loss_sum += 0.5 * st.y.squaredNorm() - logdet_j;
      acc.input_quad_sum += 0.5 * x.col(begin + k).squaredNorm();
      acc.min_logdet_j = std::min(acc.min_logdet_j, logdet_j);
    }
    acc.dz_xt.noalias() = G * x.middleCols(begin, len).transpose();
  });

  Partial total = detail::tree_reduce(std::move(parts));
  const double inv_m = 1.0 / static_cast<double>(m);
  GradientResult out;
  out.grad = std::move(total.grad);
  out.grad.alpha *= inv_m;
  out.grad.beta *= inv_m;
  out.grad.gamma *= inv_m;
  out.grad.epsilon *= inv_m;
  out.grad.H = total.dz_xt * inv_m - h_lu.inverse().transpose();
  if (!out.grad.H.allFinite() || !out.grad.alpha.allFinite() || !out.grad.beta.allFinite() ||
      !out.grad.gamma.allFinite() || !out.grad.epsilon.allFinite())
    throw numerical_error("non-finite gradient");
  tie_gradient(out.grad, tying);
  out.loss = total.loss_sum * inv_m - logdet_h;
  out.input_quad = total.input_quad_sum * inv_m;
  out.min_logdet = total.min_logdet_j + logdet_h;
  return out;
}

}  // namespace gdn
