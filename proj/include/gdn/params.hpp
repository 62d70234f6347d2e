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

#include <Eigen/Core>

namespace gdn {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Lower bound applied to beta by projection; beta must stay strictly positive.
inline constexpr double kBetaFloor = 1e-6;

/// Parameters of a generalized divisive normalization transform
///
///   z = H x,   y_i = z_i / (beta_i + sum_j gamma_ij |z_j|^alpha_ij)^epsilon_i
///
/// Valid parameters satisfy alpha >= 1, beta > 0, gamma >= 0,
/// 0 <= epsilon_i <= 1 / alpha_ii, and a non-singular H.
struct GdnParams {
  Matrix H;
  Matrix alpha;
  Vector beta;
  Matrix gamma;
  Vector epsilon;

  Index dim() const { return beta.size(); }

  /// Total number of scalar entries across all blocks (3 N^2 + 2 N).
  Index size() const { return 3 * dim() * dim() + 2 * dim(); }
};

/// Parameter-sharing schemes. Each one pins or ties entries of GdnParams so
/// that the transform reduces to a known special case.
enum class Variant : std::uint32_t {
  Full = 0,
  ColumnTiedAlpha = 1,  // alpha_ij == a_j
  DiagonalGamma = 2,    // marginal Gaussianization after a linear unmixing
  Radial = 3,           // alpha == 2, shared beta/gamma/epsilon
  LpRadial = 4,         // alpha == p, shared beta/gamma/epsilon
  Subspaces = 5,        // alpha == 2, shared per subspace, no cross-subspace pooling
  ClassicDN = 6,        // alpha == gamma == epsilon == 1
};

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct TyingConfig {
  Variant variant = Variant::Full;
  /// Subspaces only: disjoint 0-based index sets covering {0..N-1}.
  std::vector<std::vector<Index>> partition;
  /// LpRadial only.
  double p = 2.0;

  static TyingConfig full() { return {}; }
  static TyingConfig column_tied_alpha() { return {Variant::ColumnTiedAlpha, {}, 2.0}; }
  static TyingConfig diagonal_gamma() { return {Variant::DiagonalGamma, {}, 2.0}; }
  static TyingConfig radial() { return {Variant::Radial, {}, 2.0}; }
  static TyingConfig lp_radial(double p) { return {Variant::LpRadial, {}, p}; }
  static TyingConfig subspaces(std::vector<std::vector<Index>> sets) {
    return {Variant::Subspaces, std::move(sets), 2.0};
  }
  static TyingConfig classic_dn() { return {Variant::ClassicDN, {}, 2.0}; }
};

/// Throws InvalidArgument if the tying scheme cannot be applied at `dim`
/// (overlapping or incomplete partition, p < 1).
void validate_tying(const TyingConfig& tying, Index dim);

/// Initial parameters: H = I, beta = 1, gamma diagonal (or the tied shared
/// value), epsilon = 1 / (2 alpha_ii). `seed` jitters the diagonal of gamma by
/// up to 5% for the untied variants so that equal components do not stay
/// exactly symmetric.
GdnParams init_params(Index dim, const TyingConfig& tying, std::uint64_t seed, double gamma0 = 0.1);

/// H = I, alpha = 1, beta = 1, gamma = 0, epsilon = 1/2: the map y = x.
GdnParams identity_params(Index dim);

struct ProjectionStats {
  Index clamped = 0;  // entries moved by a box constraint
};

/// Clamp onto the constraint set and re-impose the tying scheme. Idempotent;
/// returns valid tying-conformant input bit-for-bit unchanged.
GdnParams project_constraints(GdnParams params, const TyingConfig& tying, ProjectionStats* stats = nullptr);

/// Reduce a gradient to the tying scheme: tied groups receive the summed
/// gradient of the group, pinned entries receive zero.
void tie_gradient(GdnParams& grad, const TyingConfig& tying);

/// Throws InvalidArgument naming the first violated invariant.
void check_invariants(const GdnParams& params);

/// True when every off-diagonal gamma entry is exactly zero, i.e. the
/// normalization Jacobian is diagonal.
bool has_diagonal_gamma(const GdnParams& params);

/// Flat view of all blocks in the order H, alpha, beta, gamma, epsilon
/// (each block column-major). Used by the optimizer and the FD oracles.
Vector flatten(const GdnParams& params);
GdnParams unflatten(const Eigen::Ref<const Vector>& flat, Index dim);

/// Zero-filled parameter structure of matching shape (gradient container).
GdnParams zeros_like(Index dim);

}  // namespace gdn
