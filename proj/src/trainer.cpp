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

#include "gdn/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "gdn/data.hpp"
#include "gdn/error.hpp"
#include "gdn/objective.hpp"
#include "gdn/stats.hpp"
#include "gdn/transform.hpp"

namespace gdn {

namespace {

constexpr int kMaxHalvings = 5;
const double kMinLogdet = std::log(1e-12);

std::vector<Index> permutation(Index m, std::uint64_t seed) {
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index(0));
  std::mt19937_64 rng(seed);
  for (Index i = m - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[std::size_t(i)], order[std::size_t(j)]);
  }
  return order;
}

// Whether the candidate keeps every batch log-determinant finite and above
// the divergence floor.
bool acceptable(const GdnParams& p, const Matrix& batch, int threads) {
  try {
    const LossTerms t = loss(p, batch, threads);
    return std::isfinite(t.loss) && t.logdet.minCoeff() >= kMinLogdet;
  } catch (const Error&) {
    return false;
  }
}

double min_pd_eigenvalue(const GdnParams& p, const Matrix& probes) {
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < probes.cols(); ++k)
    best = std::min(best, check_pd(p, p.H * probes.col(k)).min_eigenvalue);
  return best;
}

}  // namespace

void FitConfig::validate(Index dim) const {
  if (batch_size < 1) throw invalid_argument("batch_size must be positive");
  if (epochs < 1) throw invalid_argument("epochs must be positive");
  if (!(learning_rate > 0.0)) throw invalid_argument("learning_rate must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw invalid_argument("adam_beta1 must be in (0, 1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw invalid_argument("adam_beta2 must be in (0, 1)");
  if (!(adam_eps > 0.0)) throw invalid_argument("adam_eps must be positive");
  if (!(gamma_init >= 0.0)) throw invalid_argument("gamma_init must be nonnegative");
  if (threads < 1) throw invalid_argument("threads must be at least 1");
  if (pd_probes < 0) throw invalid_argument("pd_probes must be nonnegative");
  validate_tying(tying, dim);
  if (initial && initial->dim() != dim) throw invalid_argument("initial parameters do not match data dimension");
}

FitReport fit(const Eigen::Ref<const Matrix>& x, const FitConfig& config) {
  const Index n = x.rows();
  const Index m = x.cols();
  if (n < 1) throw invalid_argument("fit: data has no dimensions");
  if (!x.allFinite()) throw invalid_argument("fit: data contains non-finite values");
  config.validate(n);
  if (m < config.batch_size) throw invalid_argument("fit: fewer samples than batch_size");

  GdnParams params;
  if (config.initial) {
    params = project_constraints(*config.initial, config.tying);
  } else {
    params = init_params(n, config.tying, config.seed, config.gamma_init);
    if (config.h_init == HInit::Zca) params.H = zca_whitening(x);
  }
  check_invariants(params);

  Matrix probes(n, std::min(config.pd_probes, m));
  for (Index k = 0; k < probes.cols(); ++k) probes.col(k) = x.col(k * m / probes.cols());

  const Index size = params.size();
  Vector theta = flatten(params);
  Vector m1 = Vector::Zero(size);
  Vector m2 = Vector::Zero(size);
  double b1_pow = 1.0;
  double b2_pow = 1.0;

  FitReport report;
  const Index batches = m / config.batch_size;
  Matrix batch(n, config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<Index> order = permutation(m, splitmix64(config.seed + static_cast<std::uint64_t>(epoch)));
    EpochStats stats;
    stats.min_logdet = std::numeric_limits<double>::infinity();
    double loss_sum = 0.0;
    double dj_sum = 0.0;
    Index evaluated = 0;

    for (Index b = 0; b < batches; ++b) {
      for (Index k = 0; k < config.batch_size; ++k)
        batch.col(k) = x.col(order[std::size_t(b * config.batch_size + k)]);

      GradientResult g;
      try {
        g = grad_params(params, batch, config.tying, config.threads);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Numerical) throw;
        ++stats.rejected_steps;
        continue;
      }
      ++evaluated;
      loss_sum += g.loss;
      dj_sum += g.input_quad - g.loss;
      stats.min_logdet = std::min(stats.min_logdet, g.min_logdet);

      const Vector grad = flatten(g.grad);
      m1 = config.adam_beta1 * m1 + (1.0 - config.adam_beta1) * grad;
      m2 = config.adam_beta2 * m2 + (1.0 - config.adam_beta2) * grad.cwiseAbs2();
      b1_pow *= config.adam_beta1;
      b2_pow *= config.adam_beta2;
      const Vector step = config.learning_rate * (m1 / (1.0 - b1_pow)).array() /
                          ((m2 / (1.0 - b2_pow)).array().sqrt() + config.adam_eps);

      double scale = 1.0;
      bool accepted = false;
      for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
        ProjectionStats ps;
        GdnParams candidate = project_constraints(unflatten(theta - scale * step, n), config.tying, &ps);
        if (acceptable(candidate, batch, config.threads)) {
          params = std::move(candidate);
          theta = flatten(params);
          stats.clamped += ps.clamped;
          accepted = true;
          break;
        }
        if (attempt < kMaxHalvings) {
          scale *= 0.5;
          ++stats.halvings;
        }
      }
      if (!accepted) ++stats.rejected_steps;
    }

    if (evaluated == 0 || !std::isfinite(loss_sum)) {
      report.diverged = true;
      std::ostringstream msg;
      msg << "diverged in epoch " << epoch << ": "
          << (evaluated == 0 ? "every batch had a singular Jacobian" : "non-finite loss");
      report.diagnostic = msg.str();
      break;
    }
    stats.loss = loss_sum / static_cast<double>(evaluated);
    stats.delta_j = dj_sum / static_cast<double>(evaluated);
    stats.min_pd_eigenvalue = probes.cols() ? min_pd_eigenvalue(params, probes) : 0.0;
    report.epochs.push_back(stats);
  }
  report.params = std::move(params);
  return report;
}

std::vector<VariantScore> fit_special_cases(const Eigen::Ref<const Matrix>& x, const FitConfig& base,
                                            const Eigen::Ref<const Matrix>& eval) {
  const Eigen::Ref<const Matrix>& scored = eval.size() ? eval : x;
  if (scored.rows() != x.rows()) throw invalid_argument("fit_special_cases: evaluation batch dimension mismatch");
  std::vector<VariantScore> out;
  FitConfig cfg = base;
  cfg.initial.reset();
  auto score = [&](Variant variant, FitReport report) {
    VariantScore s;
    s.variant = variant;
    s.report = std::move(report);
    s.delta_j = delta_j(s.report.params, scored, cfg.threads);
    s.delta_j_per_dim = s.delta_j / static_cast<double>(x.rows());
    out.push_back(std::move(s));
  };
  cfg.tying = TyingConfig::diagonal_gamma();
  score(Variant::DiagonalGamma, fit(x, cfg));
  cfg.tying = TyingConfig::radial();
  score(Variant::Radial, fit(x, cfg));

  // Both special cases are points of the full family; start from the one
  // with the lower training loss.
  const GdnParams& ica = out[0].report.params;
  const GdnParams& rg = out[1].report.params;
  cfg.tying = TyingConfig::full();
  cfg.initial = loss(ica, x, cfg.threads).loss <= loss(rg, x, cfg.threads).loss ? ica : rg;
  score(Variant::Full, fit(x, cfg));
  return out;
}

std::string to_string(HInit h) { return h == HInit::Zca ? "zca" : "identity"; }

HInit h_init_from_string(const std::string& name) {
  if (name == "identity") return HInit::Identity;
  if (name == "zca") return HInit::Zca;
  throw invalid_argument("unknown h_init '" + name + "' (expected identity or zca)");
}

}  // namespace gdn
