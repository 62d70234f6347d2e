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

#include "gdn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "gdn/error.hpp"
#include "gdn/objective.hpp"
#include "gdn/transform.hpp"
#include "parallel.hpp"

namespace gdn {

double mean_half_square(const Eigen::Ref<const Matrix>& x) {
  const Index m = x.cols();
  if (m == 0) return 0.0;
  // Same summation as loss(), so that delta_j of the identity is exactly 0.
  const Vector quad = 0.5 * x.colwise().squaredNorm().transpose();
  std::vector<double> parts(static_cast<std::size_t>(detail::block_count(m)));
  for (std::size_t b = 0; b < parts.size(); ++b) {
    const Index begin = Index(b) * detail::kBlockSize;
    const Index len = std::min(detail::kBlockSize, m - begin);
    parts[b] = quad.segment(begin, len).sum();
  }
  return detail::tree_reduce(std::move(parts)) / static_cast<double>(m);
}

double delta_j(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads) {
  return mean_half_square(x) - loss(params, x, threads).loss;
}

double delta_j_per_dim(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads) {
  return delta_j(params, x, threads) / static_cast<double>(params.dim());
}

int default_mi_bins(Index samples) {
  const int b = static_cast<int>(std::floor(std::cbrt(static_cast<double>(samples)) + 1e-9));
  return std::clamp(b, 2, 64);
}

namespace {

std::vector<int> quantile_bins(const Eigen::Ref<const Eigen::RowVectorXd>& v, int bins) {
  const Index m = v.size();
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v[a] < v[b]; });
  std::vector<int> bin(static_cast<std::size_t>(m));
  for (Index rank = 0; rank < m; ++rank)
    bin[std::size_t(order[std::size_t(rank)])] = static_cast<int>((rank * bins) / m);
  return bin;
}

}  // namespace

double mutual_information(const Eigen::Ref<const Matrix>& pairs, int bins) {
  if (pairs.rows() != 2) throw invalid_argument("mutual_information expects a 2 x M sample");
  const Index m = pairs.cols();
  if (m < 4) throw invalid_argument("mutual_information needs at least 4 samples");
  for (Index r = 0; r < 2; ++r)
    if (pairs.row(r).maxCoeff() == pairs.row(r).minCoeff())
      throw invalid_argument("mutual_information: coordinate " + std::to_string(r) + " has zero variance");
  if (bins <= 0) bins = default_mi_bins(m);
  const std::vector<int> bx = quantile_bins(pairs.row(0), bins);
  const std::vector<int> by = quantile_bins(pairs.row(1), bins);

  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(bins, bins);
  for (Index k = 0; k < m; ++k) joint(bx[std::size_t(k)], by[std::size_t(k)]) += 1.0;
  const Eigen::VectorXd px = joint.rowwise().sum();
  const Eigen::RowVectorXd py = joint.colwise().sum();
  const double total = static_cast<double>(m);

  double mi = 0.0;
  int occupied = 0;
  for (int j = 0; j < bins; ++j)
    for (int i = 0; i < bins; ++i) {
      const double c = joint(i, j);
      if (c == 0.0) continue;
      ++occupied;
      mi += c / total * std::log(c * total / (px[i] * py[j]));
    }
  const int occ_x = static_cast<int>((px.array() > 0).count());
  const int occ_y = static_cast<int>((py.array() > 0).count());
  // Miller-Madow: each entropy estimate gains (occupied - 1) / 2M.
  mi += static_cast<double>(occ_x + occ_y - occupied - 1) / (2.0 * total);
  return mi;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi_cdf(double r, double dof) {
  if (!(dof > 0.0)) throw invalid_argument("chi_cdf: dof must be positive");
  if (r <= 0.0) return 0.0;
  if (std::isinf(r)) return 1.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * r * r);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

double ks_normal(const Eigen::Ref<const Vector>& samples) {
  return ks_statistic(std::vector<double>(samples.data(), samples.data() + samples.size()), normal_cdf);
}

double ks_chi(const Eigen::Ref<const Vector>& radii, double dof) {
  return ks_statistic(std::vector<double>(radii.data(), radii.data() + radii.size()),
                      [dof](double r) { return chi_cdf(r, dof); });
}

double excess_kurtosis(const Eigen::Ref<const Vector>& v) {
  const double mean = v.mean();
  const Eigen::ArrayXd c = v.array() - mean;
  const double m2 = c.square().mean();
  if (!(m2 > 0.0)) throw invalid_argument("excess_kurtosis: zero variance");
  return c.square().square().mean() / (m2 * m2) - 3.0;
}

double amari_index(const Matrix& unmixing, const Matrix& mixing) {
  if (unmixing.cols() != mixing.rows() || unmixing.rows() != mixing.cols())
    throw invalid_argument("amari_index: shape mismatch");
  const Matrix p = (unmixing * mixing).cwiseAbs();
  const Index n = p.rows();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += p.row(i).sum() / p.row(i).maxCoeff() - 1.0;
  for (Index j = 0; j < n; ++j) acc += p.col(j).sum() / p.col(j).maxCoeff() - 1.0;
  return acc / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

EvalReport marginal_radial_report(const GdnParams& params, const Eigen::Ref<const Matrix>& x, int threads) {
  const TransformResult t = forward(params, x, threads);
  EvalReport r;
  r.delta_j = delta_j(params, x, threads);
  r.delta_j_per_dim = r.delta_j / static_cast<double>(params.dim());
  r.mi = params.dim() == 2 ? mutual_information(t.y) : std::numeric_limits<double>::quiet_NaN();
  r.marginal_ks.resize(params.dim());
  for (Index i = 0; i < params.dim(); ++i) r.marginal_ks[i] = ks_normal(t.y.row(i).transpose());
  r.radial_ks = ks_chi(t.y.colwise().norm().transpose(), static_cast<double>(params.dim()));
  return r;
}

std::string format_eval_report(const EvalReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "metric,component,value\n";
  out << "delta_j,," << r.delta_j << '\n';
  out << "delta_j_per_dim,," << r.delta_j_per_dim << '\n';
  if (!std::isnan(r.mi)) out << "mi,," << r.mi << '\n';
  out << "radial_ks,," << r.radial_ks << '\n';
  for (Index i = 0; i < r.marginal_ks.size(); ++i) out << "marginal_ks," << i << ',' << r.marginal_ks[i] << '\n';
  return out.str();
}

}  // namespace gdn
