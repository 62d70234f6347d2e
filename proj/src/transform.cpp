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

#include "gdn/transform.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "gdn/error.hpp"
#include "kernel.hpp"
#include "parallel.hpp"

namespace gdn {

namespace {

void require_batch(const GdnParams& p, Index rows, const char* what) {
  if (rows != p.dim()) {
    std::ostringstream msg;
    msg << what << " has " << rows << " rows, model dimension is " << p.dim();
    throw invalid_argument(msg.str());
  }
}

// y = z * D(z)^-epsilon without derivative bookkeeping.
Vector normalize(const GdnParams& p, const Vector& z) {
  const Eigen::ArrayXd log_abs = z.array().abs().log();
  const Eigen::ArrayXd D =
      p.beta.array() + (p.gamma.array() * (p.alpha.array().rowwise() * log_abs.transpose()).exp()).rowwise().sum();
  return (z.array() * (-p.epsilon.array() * D.log()).exp()).matrix();
}

// D(z)^epsilon, the fixed-point multiplier.
Vector gain(const GdnParams& p, const Vector& z) {
  const Eigen::ArrayXd log_abs = z.array().abs().log();
  const Eigen::ArrayXd D =
      p.beta.array() + (p.gamma.array() * (p.alpha.array().rowwise() * log_abs.transpose()).exp()).rowwise().sum();
  return (p.epsilon.array() * D.log()).exp().matrix();
}

Vector initial_guess(const GdnParams& p, const Vector& y) {
  Vector z0 = y;
  for (Index i = 0; i < p.dim(); ++i) {
    const double g = p.gamma(i, i);
    const double ae = p.alpha(i, i) * p.epsilon[i];
    if (g > 0.0 && ae < 1.0 && y[i] != 0.0) {
      const double mag = std::pow(std::pow(g, p.epsilon[i]) * std::abs(y[i]), 1.0 / (1.0 - ae));
      z0[i] = std::copysign(mag, y[i]);
    }
  }
  // The tail-bound start can overshoot badly when alpha_ii eps_i is close to
  // one; fall back to z = y whenever it is not the better of the two.
  if (!z0.allFinite()) return y;
  const double r_tail = (normalize(p, z0) - y).lpNorm<Eigen::Infinity>();
  const double r_plain = (normalize(p, y) - y).lpNorm<Eigen::Infinity>();
  return (std::isfinite(r_tail) && r_tail <= r_plain) ? z0 : y;
}

struct SolveOutcome {
  Vector z;
  int iterations = 0;
};

SolveOutcome solve_normalization(const GdnParams& p, const Vector& y, const InverseOptions& opt) {
  SolveOutcome out;
  Vector z = initial_guess(p, y);
  bool done = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    Vector next = (gain(p, z).array() * y.array()).matrix();
    ++out.iterations;
    if (!next.allFinite()) break;
    const double step = (next - z).lpNorm<Eigen::Infinity>();
    z = std::move(next);
    if (step < opt.tolerance) {
      done = true;
      break;
    }
  }
  if (!done && opt.newton_iter > 0) {
    if (!z.allFinite()) z = y;
    detail::SampleState st;
    double res = (normalize(p, z) - y).lpNorm<Eigen::Infinity>();
    for (int it = 0; it < opt.newton_iter && res > 1e-13 * std::max(1.0, y.lpNorm<Eigen::Infinity>()); ++it) {
      ++out.iterations;
      detail::evaluate(p, z, st);
      const Matrix J = detail::normalization_jacobian(p, st);
      const Vector delta = J.partialPivLu().solve(st.y - y);
      if (!delta.allFinite()) break;
      double t = 1.0;
      bool improved = false;
      for (int k = 0; k < 30; ++k, t *= 0.5) {
        const Vector cand = z - t * delta;
        const double r = (normalize(p, cand) - y).lpNorm<Eigen::Infinity>();
        if (r < res) {
          z = cand;
          res = r;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
  }
  out.z = std::move(z);
  return out;
}

}  // namespace

TransformResult forward(const GdnParams& p, const Eigen::Ref<const Matrix>& x, int threads) {
  require_batch(p, x.rows(), "input batch");
  const Index m = x.cols();
  TransformResult out;
  out.z.noalias() = p.H * x;
  out.y.resize(p.dim(), m);
  out.logdet.resize(m);
  const double logdet_h = log_abs_det_h(p);
  const bool diag = has_diagonal_gamma(p);

  detail::parallel_blocks(detail::block_count(m), threads, [&](Index b) {
    detail::SampleState st;
    const Index end = std::min(m, (b + 1) * detail::kBlockSize);
    for (Index k = b * detail::kBlockSize; k < end; ++k) {
      detail::evaluate(p, out.z.col(k), st);
      out.y.col(k) = st.y;
      out.logdet[k] = detail::log_abs_det(detail::normalization_jacobian(p, st), diag) + logdet_h;
      for (Index i = 0; i < p.dim(); ++i) {
        if (!std::isfinite(st.y[i])) {
          std::ostringstream msg;
          msg << "non-finite output at sample " << k << ", component " << i;
          throw numerical_error(msg.str());
        }
      }
      if (!std::isfinite(out.logdet[k])) {
        std::ostringstream msg;
        msg << "non-finite log-determinant at sample " << k;
        throw numerical_error(msg.str());
      }
    }
  });
  return out;
}

Matrix jacobian_wrt_z(const GdnParams& p, const Eigen::Ref<const Vector>& z) {
  require_batch(p, z.size(), "point");
  detail::SampleState st;
  detail::evaluate(p, z, st);
  return detail::normalization_jacobian(p, st);
}

Matrix jacobian_wrt_input(const GdnParams& p, const Eigen::Ref<const Vector>& x) {
  require_batch(p, x.size(), "point");
  const Vector z = p.H * x;
  return jacobian_wrt_z(p, z) * p.H;
}

double log_abs_det_h(const GdnParams& p) {
  return detail::log_abs_det(p.H, false);
}

PdCheck check_pd(const GdnParams& p, const Eigen::Ref<const Vector>& z) {
  const Matrix J = jacobian_wrt_z(p, z);
  const Matrix sym = 0.5 * (J + J.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  PdCheck out;
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  out.positive_definite = out.min_eigenvalue > 0.0;
  return out;
}

bool pd_along_segment(const GdnParams& p, const Eigen::Ref<const Vector>& z, int steps) {
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    if (!check_pd(p, t * z).positive_definite) return false;
  }
  return true;
}

bool InverseResult::all_converged() const {
  for (bool c : converged)
    if (!c) return false;
  return true;
}

InverseResult invert(const GdnParams& p, const Eigen::Ref<const Matrix>& y, const InverseOptions& opt) {
  require_batch(p, y.rows(), "output batch");
  const Index m = y.cols();
  const Eigen::PartialPivLU<Matrix> h_lu(p.H);
  if (!(h_lu.rcond() > 1e-14)) throw numerical_error("cannot invert: H is singular");

  InverseResult out;
  out.z.resize(p.dim(), m);
  out.x.resize(p.dim(), m);
  out.residual.resize(m);
  out.iterations.resize(m);
  out.converged.assign(static_cast<std::size_t>(m), false);
  std::vector<char> ok(static_cast<std::size_t>(m), 0);

  detail::parallel_blocks(detail::block_count(m), opt.threads, [&](Index b) {
    const Index begin = b * detail::kBlockSize;
    const Index end = std::min(m, begin + detail::kBlockSize);
    for (Index k = begin; k < end; ++k) {
      const Vector target = y.col(k);
      SolveOutcome sol = solve_normalization(p, target, opt);
      out.z.col(k) = sol.z;
      out.iterations[k] = sol.iterations;
      const Vector xk = h_lu.solve(sol.z);
      out.x.col(k) = xk;
      const Vector zk = p.H * xk;
      const double r = (normalize(p, zk) - target).lpNorm<Eigen::Infinity>();
      out.residual[k] = std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
      ok[std::size_t(k)] = out.residual[k] <= 1e-8 && xk.allFinite();
    }
  });
  for (Index k = 0; k < m; ++k) out.converged[std::size_t(k)] = ok[std::size_t(k)] != 0;
  return out;
}

Matrix inverse(const GdnParams& p, const Eigen::Ref<const Matrix>& y, const InverseOptions& opt) {
  InverseResult r = invert(p, y, opt);
  for (Index k = 0; k < y.cols(); ++k) {
    if (!r.converged[std::size_t(k)]) {
      std::ostringstream msg;
      msg << "inverse did not converge at sample " << k << " after " << r.iterations[k]
          << " iterations (residual " << r.residual[k] << ")";
      throw numerical_error(msg.str());
    }
  }
  return std::move(r.x);
}

}  // namespace gdn
