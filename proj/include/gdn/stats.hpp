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

#include <functional>
#include <string>
#include <vector>

#include "gdn/params.hpp"

namespace gdn {

/// Negentropy reduction achieved by the transform, in nats:
///   mean(1/2 |x|^2) - loss(params, x) = mean(1/2 |x|^2 + log|det dy/dx| - 1/2 |y|^2).
/// Positive values mean the output is closer to a standard normal than the
/// input. Exactly zero for the identity configuration.
double delta_j(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads = 1);

/// delta_j divided by the dimension (nats per pixel for patch data).
double delta_j_per_dim(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads = 1);

/// Mean of 1/2 |x|^2 over the columns, with the same blocked summation as loss().
double mean_half_square(const Eigen::Ref<const Matrix>& x);

/// floor(M^(1/3)) capped at 64 (and at least 2).
int default_mi_bins(Index samples);

/// Plug-in mutual information (nats) of a 2 x M sample with equiquantile
/// binning and Miller-Madow bias correction. bins == 0 selects
/// default_mi_bins(M). Ties are broken by sample index, so any strictly
/// monotone map of a coordinate leaves the estimate unchanged. Throws
/// InvalidArgument when a coordinate is constant.
double mutual_information(const Eigen::Ref<const Matrix>& pairs, int bins = 0);

double normal_cdf(double x);

/// CDF of the Chi distribution with `dof` degrees of freedom (the norm of a
/// dof-dimensional standard normal), via the regularized lower incomplete
/// gamma function P(dof/2, r^2/2).
double chi_cdf(double r, double dof);

/// Kolmogorov-Smirnov statistic sup |F_empirical - cdf|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_normal(const Eigen::Ref<const Vector>& samples);
double ks_chi(const Eigen::Ref<const Vector>& radii, double dof);

double excess_kurtosis(const Eigen::Ref<const Vector>& samples);

/// Normalized Amari index in [0, 1] of P = unmixing * mixing; zero exactly
/// when P is a scaled permutation.
double amari_index(const Matrix& unmixing, const Matrix& mixing);

struct EvalReport {
  double delta_j = 0.0;          // nats
  double delta_j_per_dim = 0.0;  // nats per dimension
  double mi = 0.0;               // output MI in nats (2-D models only, else NaN)
  Vector marginal_ks;            // per output component vs N(0, 1)
  double radial_ks = 0.0;        // |y| vs Chi(N)
  double max_marginal_ks() const { return marginal_ks.size() ? marginal_ks.maxCoeff() : 0.0; }
};

EvalReport marginal_radial_report(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads = 1);

/// CSV text with header "metric,component,value"; component is empty for
/// scalar metrics.
std::string format_eval_report(const EvalReport& report);

}  // namespace gdn
