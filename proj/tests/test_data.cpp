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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "gdn/data.hpp"
#include "gdn/error.hpp"
#include "gdn/gaussianizer.hpp"
#include "gdn/pnm.hpp"
#include "gdn/stats.hpp"
#include "oracles.hpp"

namespace gdn {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gdn_test_" + name)).string();
}

TEST(ExtractPatches, WholeImage) {
  Image im(2, 2);
  im << 0.1, 0.2, 0.3, 0.4;
  const PatchSet s = extract_patches(im, 2, 1, 0, 0);
  ASSERT_EQ(s.count(), 1);
  EXPECT_EQ(s.data.col(0), (Vector(4) << 0.1, 0.2, 0.3, 0.4).finished());
  EXPECT_EQ(s.patch_width, 2);
}

TEST(ExtractPatches, StrideGridIsDisjointAndExact) {
  Image im(16, 16);
  for (Index i = 0; i < im.size(); ++i) im.data()[i] = static_cast<double>(i) / 7.0;
  const PatchSet s = extract_patches(im, 8, 8, 0, 0);
  ASSERT_EQ(s.count(), 4);
  std::vector<double> all(s.data.data(), s.data.data() + s.data.size());
  std::sort(all.begin(), all.end());
  std::vector<double> src(im.data(), im.data() + im.size());
  std::sort(src.begin(), src.end());
  EXPECT_EQ(all, src);
  EXPECT_EQ(s.data(1, 1), im(0, 9));  // second patch starts at column 8
}

TEST(ExtractPatches, RandomModeIsSeeded) {
  const Image im = testing::random_normal(40, 50, 1);
  const PatchSet a = extract_patches(im, 5, 0, 17, 30);
  const PatchSet b = extract_patches(im, 5, 0, 17, 30);
  const PatchSet c = extract_patches(im, 5, 0, 18, 30);
  EXPECT_EQ(a.count(), 30);
  EXPECT_EQ(a.data, b.data);
  EXPECT_NE(a.data, c.data);
}

TEST(ExtractPatches, TooSmallImage) {
  EXPECT_THROW(extract_patches(Image::Zero(3, 3), 4, 1, 0, 0), Error);
}

PnmImage gray_with_max(int total, int at_max) {
  PnmImage im;
  im.width = total;
  im.height = 1;
  im.samples.assign(std::size_t(total), 100);
  for (int i = 0; i < at_max; ++i) im.samples[std::size_t(i)] = 255;
  return im;
}

TEST(FilterSaturated, Thresholds) {
  const SaturationFilter f =
      filter_saturated({gray_with_max(1000, 500), gray_with_max(1000, 0), gray_with_max(1000, 1), gray_with_max(1000, 2)});
  EXPECT_EQ(f.kept.size(), 2u);
  EXPECT_EQ(f.removed, (std::vector<std::size_t>{0, 3}));
}

TEST(Srgb, TransferValues) {
  EXPECT_EQ(srgb_decode(0.0), 0.0);
  EXPECT_DOUBLE_EQ(srgb_decode(1.0), 1.0);
  EXPECT_NEAR(srgb_decode(128.0 / 255.0), 0.215861, 1e-6);
  PnmImage rgb;
  rgb.width = 4;
  rgb.height = 1;
  rgb.channels = 3;
  rgb.samples = {0, 0, 0, 255, 255, 255, 255, 0, 0, 0, 255, 0};
  const Image lum = srgb_to_linear(rgb);
  EXPECT_EQ(lum(0, 0), 0.0);
  EXPECT_NEAR(lum(0, 1), 1.0, 1e-12);
  EXPECT_GT(lum(0, 3), lum(0, 2));
}

Vector logistic_sample(Index m, std::uint64_t seed, double loc, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(m);
  for (Index i = 0; i < m; ++i) {
    const double p = u(rng);
    v[i] = loc + scale * std::log(p / (1.0 - p));
  }
  return v;
}

TEST(Gaussianizer, LogisticInputIsGaussianized) {
  const Vector v = logistic_sample(100000, 3, 2.0, 0.5);
  const PointwiseGaussianizer g = fit_pointwise_gaussianizer(v);
  const Vector u = g.apply(Matrix(v)).col(0);
  EXPECT_LE(ks_normal(u), 0.01);
  EXPECT_NEAR(u.mean(), 0.0, 0.01);
}

TEST(Gaussianizer, SkewedInputMeetsContract) {
  std::mt19937_64 rng(5);
  std::gamma_distribution<double> gam(2.0, 1.0);
  Vector v(20000);
  for (Index i = 0; i < v.size(); ++i) v[i] = gam(rng);
  const PointwiseGaussianizer g = fit_pointwise_gaussianizer(v);
  const Vector u = g.apply(Matrix(v)).col(0);
  EXPECT_NEAR(u.mean(), 0.0, 0.01);
  EXPECT_LE(ks_normal(u), 0.05);
}

TEST(Gaussianizer, NormalInputIsNearAffine) {
  const Vector v = testing::random_normal(20000, 1, 7, 3.0).col(0).array() + 1.0;
  const PointwiseGaussianizer g = fit_pointwise_gaussianizer(v);
  const Vector u = g.apply(Matrix(v)).col(0);
  const double corr = ((v.array() - v.mean()) * (u.array() - u.mean())).mean() /
                      std::sqrt((v.array() - v.mean()).square().mean() * (u.array() - u.mean()).square().mean());
  EXPECT_GE(corr, 0.999);
}

TEST(Gaussianizer, RoundTripAndMonotone) {
  const PointwiseGaussianizer g = fit_pointwise_gaussianizer(logistic_sample(5000, 9, 0.3, 0.1));
  for (int k = 0; k < 100; ++k) {
    const double v = g.lower + (g.upper - g.lower) * k / 99.0;
    EXPECT_NEAR(g.invert(g.apply(v)), v, 1e-8 * std::max(1.0, std::abs(v)));
  }
  double prev = -INFINITY;
  for (int k = 0; k < 1000; ++k) {
    const double a = g.apply(g.lower + (g.upper - g.lower) * k / 999.0);
    EXPECT_GT(a, prev);
    prev = a;
  }
}

TEST(Gaussianizer, ConstantInputRejected) {
  EXPECT_THROW(fit_pointwise_gaussianizer(Vector::Constant(100, 0.5)), Error);
}

TEST(Generators, DegenerateGsmIsNormal) {
  const PatchSet s = gen_gsm(3, ScaleDistribution::constant(1.0), 20000, 1);
  const double threshold = 1.63 / std::sqrt(20000.0);
  for (Index i = 0; i < 3; ++i) EXPECT_LE(ks_normal(s.data.row(i).transpose()), threshold);
}

TEST(Generators, IndependentLaplaceHasNoMi) {
  const PatchSet s = gen_ica_laplace(Matrix::Identity(2, 2), 1000000, 2);
  EXPECT_LE(mutual_information(s.data), 0.01);
  EXPECT_NEAR(s.data.row(0).squaredNorm() / 1e6, 1.0, 0.02);
}

TEST(Generators, LpRadialP2IsRotationInvariant) {
  const PatchSet s = gen_lp_radial(2, 2.0, 200000, 3);
  const double c = std::cos(0.6), sn = std::sin(0.6);
  const Matrix rot = (Matrix(2, 2) << c, -sn, sn, c).finished();
  EXPECT_NEAR(mutual_information(s.data), mutual_information(rot * s.data), 0.01);
}

TEST(Generators, SeededAndChunkIndependent) {
  const ScaleDistribution sd = ScaleDistribution::log_normal(0.5);
  const PatchSet a = gen_gsm(4, sd, 10000, 5);
  EXPECT_EQ(a.data, gen_gsm(4, sd, 10000, 5).data);
  EXPECT_NE(a.data, gen_gsm(4, sd, 10000, 6).data);
  // A shorter draw is a prefix of a longer one.
  EXPECT_EQ(gen_gsm(4, sd, 5000, 5).data, a.data.leftCols(5000));
  EXPECT_EQ(gen_lp_radial(3, 1.5, 100, 1).data, gen_lp_radial(3, 1.5, 100, 1).data);
}

TEST(PatchSetIo, RoundTrip) {
  PatchSet s;
  s.data = testing::random_normal(5, 33, 1);
  const std::string path = temp_path("patchset.bin");
  write_patchset(path, s);
  EXPECT_EQ(read_patchset(path).data, s.data);
  std::remove(path.c_str());
}

TEST(PatchSetIo, RejectsMalformed) {
  PatchSet s;
  s.data = testing::random_normal(3, 4, 1);
  const std::string bytes = encode_patchset(s);
  EXPECT_EQ(decode_patchset(bytes).data, s.data);
  EXPECT_THROW(decode_patchset(bytes.substr(0, bytes.size() - 3)), Error);
  EXPECT_THROW(decode_patchset("XXXX" + bytes.substr(4)), Error);
  EXPECT_THROW(decode_patchset(bytes + "zz"), Error);
  EXPECT_THROW(read_patchset(temp_path("does_not_exist")), Error);
}

TEST(Pnm, ParsesAsciiAndBinary) {
  const PnmImage p2 = parse_pnm("P2\n# comment\n3 1\n255\n0 128 255\n");
  EXPECT_EQ(p2.width, 3);
  EXPECT_EQ(p2.at(0, 1), 128);
  std::string p5 = "P5 2 1 65535\n";
  p5 += std::string("\x01\x02\xff\xff", 4);
  const PnmImage w = parse_pnm(p5);
  EXPECT_EQ(w.at(0, 0), 0x0102);
  EXPECT_EQ(w.at(0, 1), 0xffff);
  const PnmImage p3 = parse_pnm("P3 1 1 255 10 20 30");
  EXPECT_EQ(p3.channels, 3);
  EXPECT_EQ(p3.at(0, 0, 2), 30);
  EXPECT_THROW(parse_pnm("P7 1 1 255"), Error);
  EXPECT_THROW(parse_pnm("P5 4 4 255\nab"), Error);
}

TEST(Pnm, WriteReadRoundTrip) {
  Image im(3, 4);
  for (Index i = 0; i < im.size(); ++i) im.data()[i] = static_cast<double>(i) / 11.0;
  const std::string path = temp_path("img.pgm");
  write_pnm(path, from_unit_gray(im, 65535));
  const Image back = to_unit_gray(read_pnm(path));
  EXPECT_LT((back - im).cwiseAbs().maxCoeff(), 1.0 / 65535);
  std::remove(path.c_str());
}

TEST(Zca, WhitensAndIsSymmetric) {
  const Matrix mix = (Matrix(3, 3) << 2, 1, 0, 0, 1, 0.5, 0.3, 0, 1).finished();
  const Matrix x = mix * testing::random_normal(3, 50000, 4);
  const Matrix w = zca_whitening(x);
  EXPECT_LT((w - w.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix y = w * x;
  const Matrix yc = y.colwise() - y.rowwise().mean();
  const Matrix cov = yc * yc.transpose() / static_cast<double>(y.cols() - 1);
  EXPECT_LT((cov - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

}  // namespace
}  // namespace gdn
