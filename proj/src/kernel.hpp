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

// Per-sample evaluation of the normalization stage and its first and second
// derivatives. Not part of the public interface.

#include <cmath>
#include <limits>

#include <Eigen/Core>
#include <Eigen/LU>

#include "gdn/params.hpp"

namespace gdn::detail {

/// Quantities of one sample, reused across the forward map, the Jacobian,
/// and the gradient. Buffers are resized on first use and then recycled.
struct SampleState {
  Vector z;
  Vector log_abs;  // log|z_j|, 0 where z_j == 0 (every product it meets is 0 there)
  Matrix A;        // |z_j|^alpha_ij
  Matrix P;        // |z_j|^(alpha_ij - 1) sgn(z_j), 0 at z_j == 0
  Matrix U;        // dD_i/dz_j = alpha_ij gamma_ij P_ij
  Vector D;        // beta_i + sum_j gamma_ij A_ij
  Vector log_D;
  Vector s;        // D_i^-epsilon_i
  Vector y;
  Vector e;        // y_i / D_i = z_i D_i^-(epsilon_i + 1)
};

inline void evaluate(const GdnParams& p, const Eigen::Ref<const Vector>& z, SampleState& st) {
  const Index n = p.dim();
  st.z = z;
  st.log_abs.resize(n);
  Vector inv_z(n);
  for (Index j = 0; j < n; ++j) {
    const double a = std::abs(z[j]);
    st.log_abs[j] = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
    inv_z[j] = a > 0.0 ? 1.0 / z[j] : 0.0;
  }
  // exp(alpha * -inf) == 0 handles z_j == 0 for every alpha >= 1.
  st.A.noalias() = (p.alpha.array().rowwise() * st.log_abs.transpose().array()).exp().matrix();
  for (Index j = 0; j < n; ++j)
    if (!std::isfinite(st.log_abs[j])) st.log_abs[j] = 0.0;
  st.P.noalias() = (st.A.array().rowwise() * inv_z.transpose().array()).matrix();
  st.U.noalias() = (p.alpha.array() * p.gamma.array() * st.P.array()).matrix();
  st.D.noalias() = p.beta + (p.gamma.array() * st.A.array()).rowwise().sum().matrix();
  st.log_D = st.D.array().log().matrix();
  st.s = (-p.epsilon.array() * st.log_D.array()).exp().matrix();
  st.y = (z.array() * st.s.array()).matrix();
  st.e = (st.y.array() / st.D.array()).matrix();
}

/// dy/dz = diag(s) - diag(epsilon * e) U.
inline Matrix normalization_jacobian(const GdnParams& p, const SampleState& st) {
  Matrix J = -((p.epsilon.array() * st.e.array()).matrix().asDiagonal() * st.U);
  J.diagonal() += st.s;
  return J;
}

/// Second derivative factor V_ij = d U_ij / d z_j
///   = alpha_ij (alpha_ij - 1) gamma_ij |z_j|^(alpha_ij - 2).
/// At z_j == 0 the value is 2 gamma_ij for alpha_ij == 2 and 0 otherwise.
inline Matrix second_derivative_factor(const GdnParams& p, const SampleState& st) {
  const Index n = p.dim();
  Matrix V(n, n);
  for (Index j = 0; j < n; ++j) {
    const double zj = st.z[j];
    for (Index i = 0; i < n; ++i) {
      const double a = p.alpha(i, j);
      const double g = p.gamma(i, j);
      if (g == 0.0 || a == 1.0) {
        V(i, j) = 0.0;
      } else if (zj != 0.0) {
        V(i, j) = a * (a - 1.0) * g * st.A(i, j) / (zj * zj);
      } else {
        V(i, j) = a == 2.0 ? 2.0 * g : 0.0;
      }
    }
  }
  return V;
}

/// log|det J| for J = dy/dz. When gamma is diagonal, J is diagonal.
/// Returns -inf when J is exactly singular.
inline double log_abs_det(const Matrix& J, bool diagonal, int* sign = nullptr) {
  if (diagonal) {
    double acc = 0.0;
    int sg = 1;
    for (Index i = 0; i < J.rows(); ++i) {
      const double d = J(i, i);
      if (d < 0.0) sg = -sg;
      acc += std::log(std::abs(d));
    }
    if (sign) *sign = sg;
    return acc;
  }
  const Eigen::PartialPivLU<Matrix> lu(J);
  const Matrix& m = lu.matrixLU();
  double acc = 0.0;
  int sg = lu.permutationP().determinant();
  for (Index i = 0; i < m.rows(); ++i) {
    const double d = m(i, i);
    if (d < 0.0) sg = -sg;
    acc += std::log(std::abs(d));
  }
  if (sign) *sign = sg;
  return acc;
}

/// Inverse-transpose of J (the trace-term weights). Computed from an LU
/// factorization; diagonal J takes the elementwise shortcut.
inline bool inverse_transpose(const Matrix& J, bool diagonal, Matrix& M, double& logdet) {
  const Index n = J.rows();
  if (diagonal) {
    M.setZero(n, n);
    logdet = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d = J(i, i);
      if (d == 0.0 || !std::isfinite(d)) return false;
      M(i, i) = 1.0 / d;
      logdet += std::log(std::abs(d));
    }
    return true;
  }
  const Eigen::PartialPivLU<Matrix> lu(J);
  const Matrix& m = lu.matrixLU();
  logdet = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double d = m(i, i);
    if (d == 0.0 || !std::isfinite(d)) return false;
    logdet += std::log(std::abs(d));
  }
  M = lu.solve(Matrix::Identity(n, n)).transpose();
  return M.allFinite();
}

/// Backward pass for one sample of the per-sample loss
///   l = 1/2 |y|^2 - log|det dy/dz|
/// Adds d l / d{alpha, beta, gamma, epsilon} into `grad` (when non-null)
/// and writes d l / d z into `dl_dz`. `M` is inverse_transpose(J).
inline void backward(const GdnParams& p, const SampleState& st, const Matrix& J, const Matrix& M,
                     GdnParams* grad, Eigen::Ref<Vector> dl_dz) {
  const auto eps = p.epsilon.array();
  const auto s = st.s.array();
  const auto D = st.D.array();
  const auto y = st.y.array();
  const auto e = st.e.array();
  const Eigen::ArrayXd c = eps * e;  // -dy_i/dD_i

  const Eigen::ArrayXd w = (M.array() * st.U.array()).rowwise().sum();
  const Eigen::ArrayXd m_diag = M.diagonal().array();
  // r_i: sensitivity of -log|det J| to D_i with U held fixed.
  const Eigen::ArrayXd r = m_diag * eps * s / D - w * (eps + 1.0) * c / D;

  if (grad) {
    const Eigen::ArrayXd q = -y * c + r;  // total d l / d D_i
    const auto L = st.log_abs.transpose().array();
    grad->beta.array() += q;
    const Eigen::ArrayXXd cMP = (M.array() * st.P.array()).colwise() * c;
    grad->gamma.array() += st.A.array().colwise() * q + p.alpha.array() * cMP;
    grad->alpha.array() += ((p.gamma.array() * st.A.array()).rowwise() * L).colwise() * q +
                           p.gamma.array() * cMP * (1.0 + p.alpha.array().rowwise() * L);
    grad->epsilon.array() += st.log_D.array() * (-y * y + m_diag * s) + w * e * (1.0 - eps * st.log_D.array());
  }

  const Matrix V = second_derivative_factor(p, st);
  Vector g = -(st.U.transpose() * r.matrix());
  g.array() -= w * eps * s / D;
  g.noalias() -= (M.array() * V.array()).matrix().transpose() * c.matrix();
  dl_dz.noalias() = J.transpose() * st.y;
  dl_dz -= g;
}

}  // namespace gdn::detail
