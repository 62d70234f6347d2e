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

#include "gdn/gaussianizer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "gdn/error.hpp"

namespace gdn {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double normal_quantile(double p) { return -kSqrt2 * boost::math::erfc_inv(2.0 * p); }

// log sigmoid(t), stable for both signs.
double log_sigmoid(double t) { return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t)); }

// log(1 - exp(x)) for x < 0.
double log1mexp(double x) { return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x)); }

struct Tails {
  double log_lower;  // log F
  double log_upper;  // log (1 - F)
};

Tails tails(const PointwiseGaussianizer& g, double v) {
  const double t = (v - g.location) / g.scale;
  const double log_a = g.shape * log_sigmoid(t);
  const double log_upper = g.asymmetry * log1mexp(log_a);
  return {log1mexp(log_upper), log_upper};
}

struct QuantileFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::vector<double> quantiles;
  std::vector<double> targets;

  int inputs() const { return 4; }
  int values() const { return static_cast<int>(quantiles.size()); }

  static PointwiseGaussianizer unpack(const Eigen::VectorXd& th) {
    PointwiseGaussianizer g;
    g.location = th[0];
    g.scale = std::exp(th[1]);
    g.shape = std::exp(th[2]);
    g.asymmetry = std::exp(th[3]);
    return g;
  }

  int operator()(const Eigen::VectorXd& th, Eigen::VectorXd& fvec) const {
    const PointwiseGaussianizer g = unpack(th);
    for (std::size_t k = 0; k < quantiles.size(); ++k) {
      double r = g.apply(quantiles[k]) - targets[k];
      if (!std::isfinite(r)) r = 1e6;
      fvec[Index(k)] = r;
    }
    return 0;
  }
};

}  // namespace

double PointwiseGaussianizer::apply(double v) const {
  const Tails tl = tails(*this, v);
  if (tl.log_lower < tl.log_upper) return normal_quantile(std::exp(tl.log_lower));
  return -normal_quantile(std::exp(tl.log_upper));
}

double PointwiseGaussianizer::invert(double u) const {
  // Upper-tail probability q = 1 - Phi(u), computed without cancellation.
  const double log_q = u < 0.0 ? std::log1p(-0.5 * std::erfc(-u / kSqrt2)) : std::log(0.5 * std::erfc(u / kSqrt2));
  const double log_1ma = log_q / asymmetry;  // log(1 - a)
  const double log_a = log1mexp(log_1ma);
  const double log_sig = log_a / shape;
  const double t = log_sig - log1mexp(log_sig);
  return location + scale * t;
}

double PointwiseGaussianizer::derivative(double v) const {
  const double t = (v - location) / scale;
  const double log_sig = log_sigmoid(t);
  const double log_1msig = log_sigmoid(-t);
  const double log_a = shape * log_sig;
  const double log_1ma = log1mexp(log_a);
  // log f(v), f = dF/dv
  const double log_f = std::log(asymmetry * shape / scale) + (asymmetry - 1.0) * log_1ma + log_a + log_1msig;
  const double u = apply(v);
  const double log_phi = -0.5 * u * u - 0.9189385332046727;
  return std::exp(log_f - log_phi);
}

PointwiseGaussianizer fit_pointwise_gaussianizer(const Eigen::Ref<const Vector>& intensities) {
  const Index m = intensities.size();
  if (m < 2) throw invalid_argument("need at least 2 samples to fit a pointwise Gaussianizer");
  std::vector<double> sorted(intensities.data(), intensities.data() + m);
  std::sort(sorted.begin(), sorted.end());
  if (!std::isfinite(sorted.front()) || !std::isfinite(sorted.back()))
    throw invalid_argument("non-finite intensity values");
  if (sorted.front() == sorted.back()) throw invalid_argument("constant input cannot be Gaussianized");

  auto quantile = [&](double prob) {
    const double pos = prob * static_cast<double>(m - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };

  QuantileFunctor f;
  for (int k = 1; k <= 99; ++k) {
    const double prob = k / 100.0;
    f.quantiles.push_back(quantile(prob));
    f.targets.push_back(normal_quantile(prob));
  }

  const double median = quantile(0.5);
  double iqr = quantile(0.75) - quantile(0.25);
  if (!(iqr > 0.0)) iqr = 0.1 * (sorted.back() - sorted.front());
  Eigen::VectorXd th(4);
  th << median, std::log(iqr / (2.0 * std::log(3.0))), 0.0, 0.0;

  Eigen::NumericalDiff<QuantileFunctor> diff(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<QuantileFunctor>> lm(diff);
  lm.parameters.maxfev = 4000;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-12;
  lm.minimize(th);

  PointwiseGaussianizer g = QuantileFunctor::unpack(th);
  g.lower = sorted.front();
  g.upper = sorted.back();
  return g;
}

}  // namespace gdn
