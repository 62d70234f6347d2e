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

#include "gdn/mi_curve.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gdn/data.hpp"
#include "gdn/error.hpp"
#include "gdn/stats.hpp"
#include "gdn/transform.hpp"

namespace gdn {

Matrix oriented_filter_kernel() {
  Matrix k(5, 5);
  for (Index r = 0; r < 5; ++r)
    for (Index c = 0; c < 5; ++c) {
      const double x = static_cast<double>(c - 2);
      const double y = static_cast<double>(r - 2);
      k(r, c) = -x * std::exp(-0.5 * (x * x + y * y));
    }
  return k / k.norm();
}

Image filter_valid(const Image& image, const Matrix& kernel) {
  const Index rows = image.rows() - kernel.rows() + 1;
  const Index cols = image.cols() - kernel.cols() + 1;
  if (rows < 1 || cols < 1) throw invalid_argument("filter_valid: image smaller than kernel");
  Image out(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      out(r, c) = (image.block(r, c, kernel.rows(), kernel.cols()).array() * kernel.array()).sum();
  return out;
}

Matrix coefficient_pairs(const std::vector<Image>& responses, Index distance, Index count, std::uint64_t seed,
                         Index min_count) {
  if (distance < 1) throw invalid_argument("coefficient_pairs: distance must be positive");
  std::vector<Index> offsets{0};
  for (const Image& r : responses) {
    const Index per_image = r.cols() > distance ? r.rows() * (r.cols() - distance) : 0;
    offsets.push_back(offsets.back() + per_image);
  }
  const Index available = offsets.back();
  if (available < min_count || available == 0)
    throw invalid_argument("coefficient_pairs: only " + std::to_string(available) + " pairs at distance " +
                           std::to_string(distance));
  const Index m = std::min(count, available);
  Matrix out(2, m);
  std::mt19937_64 rng(splitmix64(seed));
  for (Index k = 0; k < m; ++k) {
    const auto pos = static_cast<Index>(rng() % static_cast<std::uint64_t>(available));
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), pos) - 1;
    const std::size_t img = static_cast<std::size_t>(it - offsets.begin());
    const Image& r = responses[img];
    const Index local = pos - *it;
    const Index width = r.cols() - distance;
    const Index row = local / width;
    const Index col = local % width;
    out(0, k) = r(row, col);
    out(1, k) = r(row, col + distance);
  }
  return out;
}

std::vector<MiCurvePoint> pairwise_mi_curve(const std::vector<Image>& images, const MiCurveConfig& config) {
  if (images.empty()) throw invalid_argument("pairwise_mi_curve: no images");
  const Matrix kernel = oriented_filter_kernel();
  std::vector<Image> responses;
  for (const Image& im : images) responses.push_back(filter_valid(im, kernel));

  std::vector<MiCurvePoint> out;
  for (std::size_t d = 0; d < config.distances.size(); ++d) {
    const Index distance = config.distances[d];
    Matrix pairs = coefficient_pairs(responses, distance, config.pairs, config.seed + d, config.min_pairs);
    pairs.colwise() -= pairs.rowwise().mean();
    const double sd = std::sqrt(pairs.squaredNorm() / static_cast<double>(pairs.size()));
    if (!(sd > 0.0)) throw invalid_argument("pairwise_mi_curve: zero-variance responses");
    pairs /= sd;

    MiCurvePoint p;
    p.distance = distance;
    p.pairs = pairs.cols();
    p.raw = mutual_information(pairs);

    const std::vector<VariantScore> fits = fit_special_cases(pairs, config.fit);
    const int threads = config.fit.threads;
    p.ica_mg = mutual_information(forward(fits[0].report.params, pairs, threads).y);
    p.rg = mutual_information(forward(fits[1].report.params, pairs, threads).y);
    p.gdn = mutual_information(forward(fits[2].report.params, pairs, threads).y);
    out.push_back(p);
  }
  return out;
}

std::string format_mi_curve(const std::vector<MiCurvePoint>& points) {
  std::ostringstream out;
  out.precision(10);
  out << "distance,variant,mi\n";
  for (const MiCurvePoint& p : points) {
    out << p.distance << ",raw," << p.raw << '\n';
    out << p.distance << ",ica_mg," << p.ica_mg << '\n';
    out << p.distance << ",rg," << p.rg << '\n';
    out << p.distance << ",gdn," << p.gdn << '\n';
  }
  return out.str();
}

}  // namespace gdn
