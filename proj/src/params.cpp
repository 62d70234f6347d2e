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

#include "gdn/params.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "gdn/error.hpp"

namespace gdn {

namespace {

// Replace every listed entry by the group mean. Leaves groups whose entries
// are already identical untouched so projection is bitwise idempotent.
template <typename Get>
void average_group(std::size_t count, Get&& get) {
  if (count == 0) return;
  const double first = get(0);
  bool all_equal = true;
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double v = get(k);
    all_equal = all_equal && (v == first);
    sum += v;
  }
  if (all_equal) return;
  const double mean = sum / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) get(k) = mean;
}

// Same grouping, but every entry receives the group sum.
template <typename Get>
void sum_group(std::size_t count, Get&& get) {
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) sum += get(k);
  for (std::size_t k = 0; k < count; ++k) get(k) = sum;
}

double pinned_alpha(const TyingConfig& tying) {
  switch (tying.variant) {
    case Variant::Radial:
    case Variant::Subspaces:
      return 2.0;
    case Variant::LpRadial:
      return tying.p;
    case Variant::ClassicDN:
      return 1.0;
    default:
      return 0.0;  // not pinned
  }
}

// Apply `op` (average or sum) to every tied group, and `pin` to pinned
// entries. Shared by projection and gradient reduction.
template <typename GroupOp, typename Pin>
void apply_tying(GdnParams& p, const TyingConfig& tying, GroupOp&& group, Pin&& pin) {
  const Index n = p.dim();
  Matrix& a = p.alpha;
  Matrix& g = p.gamma;
  switch (tying.variant) {
    case Variant::Full:
      break;
    case Variant::ColumnTiedAlpha:
      for (Index j = 0; j < n; ++j) group(n, [&](std::size_t k) -> double& { return a(Index(k), j); });
      break;
    case Variant::DiagonalGamma:
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
          if (i != j) pin(g(i, j), 0.0);
      break;
    case Variant::Radial:
    case Variant::LpRadial: {
      const double alpha_value = pinned_alpha(tying);
      for (Index k = 0; k < a.size(); ++k) pin(a.data()[k], alpha_value);
      group(std::size_t(n), [&](std::size_t k) -> double& { return p.beta[Index(k)]; });
      group(std::size_t(n), [&](std::size_t k) -> double& { return p.epsilon[Index(k)]; });
      group(std::size_t(g.size()), [&](std::size_t k) -> double& { return g.data()[k]; });
      break;
    }
    case Variant::Subspaces: {
      for (Index k = 0; k < a.size(); ++k) pin(a.data()[k], 2.0);
      std::vector<Index> block_of(static_cast<std::size_t>(n), -1);
      for (std::size_t b = 0; b < tying.partition.size(); ++b)
        for (Index i : tying.partition[b]) block_of[std::size_t(i)] = Index(b);
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
          if (block_of[std::size_t(i)] != block_of[std::size_t(j)]) pin(g(i, j), 0.0);
      for (const auto& set : tying.partition) {
        const std::size_t m = set.size();
        group(m, [&](std::size_t k) -> double& { return p.beta[set[k]]; });
        group(m, [&](std::size_t k) -> double& { return p.epsilon[set[k]]; });
        group(m * m, [&](std::size_t k) -> double& { return g(set[k / m], set[k % m]); });
      }
      break;
    }
    case Variant::ClassicDN:
      for (Index k = 0; k < a.size(); ++k) pin(a.data()[k], 1.0);
      for (Index k = 0; k < g.size(); ++k) pin(g.data()[k], 1.0);
      for (Index i = 0; i < n; ++i) pin(p.epsilon[i], 1.0);
      break;
  }
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::ColumnTiedAlpha: return "column_tied_alpha";
    case Variant::DiagonalGamma: return "diagonal_gamma";
    case Variant::Radial: return "radial";
    case Variant::LpRadial: return "lp_radial";
    case Variant::Subspaces: return "subspaces";
    case Variant::ClassicDN: return "classic_dn";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  for (auto v : {Variant::Full, Variant::ColumnTiedAlpha, Variant::DiagonalGamma, Variant::Radial,
                 Variant::LpRadial, Variant::Subspaces, Variant::ClassicDN}) {
    if (to_string(v) == name) return v;
  }
  // Common aliases used in reports.
  if (name == "gdn") return Variant::Full;
  if (name == "ica_mg" || name == "ica-mg") return Variant::DiagonalGamma;
  if (name == "rg") return Variant::Radial;
  if (name == "isa") return Variant::Subspaces;
  throw invalid_argument("unknown tying variant '" + name + "'");
}

void validate_tying(const TyingConfig& tying, Index dim) {
  if (dim < 1) throw invalid_argument("dimension must be at least 1");
  if (tying.variant == Variant::LpRadial && !(tying.p >= 1.0 && std::isfinite(tying.p)))
    throw invalid_argument("lp_radial exponent must be finite and >= 1");
  if (tying.variant != Variant::Subspaces) return;
  std::vector<int> seen(static_cast<std::size_t>(dim), 0);
  for (std::size_t b = 0; b < tying.partition.size(); ++b) {
    if (tying.partition[b].empty()) throw invalid_argument("subspace partition contains an empty set");
    for (Index i : tying.partition[b]) {
      if (i < 0 || i >= dim) {
        std::ostringstream msg;
        msg << "subspace index " << i << " out of range [0, " << dim << ")";
        throw invalid_argument(msg.str());
      }
      if (seen[std::size_t(i)]++) {
        std::ostringstream msg;
        msg << "subspace partition overlaps at index " << i;
        throw invalid_argument(msg.str());
      }
    }
  }
  for (Index i = 0; i < dim; ++i) {
    if (!seen[std::size_t(i)]) {
      std::ostringstream msg;
      msg << "subspace partition does not cover index " << i;
      throw invalid_argument(msg.str());
    }
  }
}

GdnParams zeros_like(Index dim) {
  GdnParams p;
  p.H = Matrix::Zero(dim, dim);
  p.alpha = Matrix::Zero(dim, dim);
  p.beta = Vector::Zero(dim);
  p.gamma = Matrix::Zero(dim, dim);
  p.epsilon = Vector::Zero(dim);
  return p;
}

GdnParams identity_params(Index dim) {
  GdnParams p;
  p.H = Matrix::Identity(dim, dim);
  p.alpha = Matrix::Ones(dim, dim);
  p.beta = Vector::Ones(dim);
  p.gamma = Matrix::Zero(dim, dim);
  p.epsilon = Vector::Constant(dim, 0.5);
  return p;
}

GdnParams init_params(Index dim, const TyingConfig& tying, std::uint64_t seed, double gamma0) {
  validate_tying(tying, dim);
  if (!(gamma0 >= 0.0)) throw invalid_argument("initial gamma must be nonnegative");
  GdnParams p = identity_params(dim);
  const double pinned = pinned_alpha(tying);
  if (pinned > 0.0) p.alpha.setConstant(pinned);

  switch (tying.variant) {
    case Variant::Radial:
    case Variant::LpRadial:
      p.gamma.setConstant(gamma0);
      break;
    case Variant::Subspaces:
      for (const auto& set : tying.partition)
        for (Index i : set)
          for (Index j : set) p.gamma(i, j) = gamma0;
      break;
    case Variant::ClassicDN:
      p.gamma.setOnes();
      break;
    default: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> jitter(-0.05, 0.05);
      for (Index i = 0; i < dim; ++i) p.gamma(i, i) = gamma0 * (1.0 + jitter(rng));
      break;
    }
  }
  for (Index i = 0; i < dim; ++i) p.epsilon[i] = 0.5 / p.alpha(i, i);
  if (tying.variant == Variant::ClassicDN) p.epsilon.setOnes();
  return project_constraints(std::move(p), tying);
}

GdnParams project_constraints(GdnParams p, const TyingConfig& tying, ProjectionStats* stats) {
  Index clamped = 0;
  auto clamp_low = [&](double& v, double lo) {
    if (v < lo) {
      v = lo;
      ++clamped;
    }
  };
  for (Index k = 0; k < p.alpha.size(); ++k) clamp_low(p.alpha.data()[k], 1.0);
  for (Index k = 0; k < p.beta.size(); ++k) clamp_low(p.beta[k], kBetaFloor);
  for (Index k = 0; k < p.gamma.size(); ++k) clamp_low(p.gamma.data()[k], 0.0);

  apply_tying(
      p, tying, [](std::size_t count, auto&& get) { average_group(count, get); },
      [&](double& v, double value) {
        if (v != value) v = value;
      });

  // epsilon bound depends on the (tied) diagonal of alpha, so it goes last.
  for (Index i = 0; i < p.dim(); ++i) {
    double& e = p.epsilon[i];
    const double hi = 1.0 / p.alpha(i, i);
    if (e < 0.0) {
      e = 0.0;
      ++clamped;
    } else if (e > hi) {
      e = hi;
      ++clamped;
    }
  }
  if (stats) stats->clamped += clamped;
  return p;
}

void tie_gradient(GdnParams& grad, const TyingConfig& tying) {
  apply_tying(
      grad, tying, [](std::size_t count, auto&& get) { sum_group(count, get); },
      [](double& v, double) { v = 0.0; });
}

void check_invariants(const GdnParams& p) {
  const Index n = p.dim();
  auto fail = [](const std::string& what) { throw invalid_argument("parameter invariant violated: " + what); };
  if (n < 1) fail("dimension must be at least 1");
  if (p.H.rows() != n || p.H.cols() != n || p.alpha.rows() != n || p.alpha.cols() != n ||
      p.gamma.rows() != n || p.gamma.cols() != n || p.epsilon.size() != n)
    fail("inconsistent block shapes");
  if (!p.H.allFinite() || !p.alpha.allFinite() || !p.beta.allFinite() || !p.gamma.allFinite() ||
      !p.epsilon.allFinite())
    fail("non-finite entry");
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (!(p.alpha(i, j) >= 1.0)) fail("alpha(" + std::to_string(i) + "," + std::to_string(j) + ") < 1");
      if (!(p.gamma(i, j) >= 0.0)) fail("gamma(" + std::to_string(i) + "," + std::to_string(j) + ") < 0");
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (!(p.beta[i] > 0.0)) fail("beta(" + std::to_string(i) + ") <= 0");
    if (!(p.epsilon[i] >= 0.0 && p.epsilon[i] <= 1.0 / p.alpha(i, i)))
      fail("epsilon(" + std::to_string(i) + ") outside [0, 1/alpha_ii]");
  }
  const Eigen::PartialPivLU<Matrix> lu(p.H);
  if (!(lu.rcond() > 1e-14)) fail("H is singular");
}

bool has_diagonal_gamma(const GdnParams& p) {
  const Index n = p.dim();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i != j && p.gamma(i, j) != 0.0) return false;
  return true;
}

Vector flatten(const GdnParams& p) {
  const Index n = p.dim();
  const Index nn = n * n;
  Vector flat(p.size());
  flat.segment(0, nn) = p.H.reshaped();
  flat.segment(nn, nn) = p.alpha.reshaped();
  flat.segment(2 * nn, n) = p.beta;
  flat.segment(2 * nn + n, nn) = p.gamma.reshaped();
  flat.segment(3 * nn + n, n) = p.epsilon;
  return flat;
}

GdnParams unflatten(const Eigen::Ref<const Vector>& flat, Index n) {
  const Index nn = n * n;
  if (flat.size() != 3 * nn + 2 * n) throw invalid_argument("flat parameter vector has wrong length");
  GdnParams p;
  p.H = flat.segment(0, nn).reshaped(n, n);
  p.alpha = flat.segment(nn, nn).reshaped(n, n);
  p.beta = flat.segment(2 * nn, n);
  p.gamma = flat.segment(2 * nn + n, nn).reshaped(n, n);
  p.epsilon = flat.segment(3 * nn + n, n);
  return p;
}

}  // namespace gdn
