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

#include "gdn/cascade.hpp"

#include "bytes.hpp"
#include "gdn/error.hpp"
#include "gdn/stats.hpp"

namespace gdn {

namespace {

StageDiagnostics input_diagnostics(const GdnParams& params, const Matrix& x) {
  StageDiagnostics d;
  const Matrix z = params.H * x;
  for (Index i = 0; i < z.rows(); ++i) {
    const Vector row = z.row(i).transpose();
    const double mean = row.mean();
    const double sd = std::sqrt((row.array() - mean).square().mean());
    d.input_kurtosis += excess_kurtosis(row);
    d.input_ks += ks_normal((row.array() - mean) / sd);
  }
  d.input_kurtosis /= static_cast<double>(z.rows());
  d.input_ks /= static_cast<double>(z.rows());
  return d;
}

Error with_stage(const Error& e, std::size_t stage) {
  return {e.kind(), "stage " + std::to_string(stage) + ": " + e.what()};
}

}  // namespace

CascadeFit fit_cascade(const Eigen::Ref<const Matrix>& x, const std::vector<FitConfig>& stage_configs,
                       const Eigen::Ref<const Matrix>& eval) {
  if (stage_configs.empty()) throw invalid_argument("fit_cascade: no stage configs");
  const bool separate = eval.size() != 0;
  if (separate && eval.rows() != x.rows()) throw invalid_argument("fit_cascade: evaluation batch dimension mismatch");
  Matrix train = x;
  Matrix scored = separate ? Matrix(eval) : Matrix();
  CascadeFit out;
  for (std::size_t k = 0; k < stage_configs.size(); ++k) {
    const FitConfig& cfg = stage_configs[k];
    try {
      FitReport report = fit(train, cfg);
      Model stage{report.params, cfg.tying, {}};
      const Matrix& batch = separate ? scored : train;
      const double dj = delta_j(stage.params, batch, cfg.threads);
      bool fallback = false;
      if (dj < 0.0) {
        stage.params = identity_params(train.rows());
        stage.tying = TyingConfig::full();
        fallback = true;
      }
      StageDiagnostics d = input_diagnostics(stage.params, batch);
      d.delta_j = fallback ? 0.0 : dj;
      d.identity_fallback = fallback;

      train = forward(stage.params, train, cfg.threads).y;
      if (separate) scored = forward(stage.params, scored, cfg.threads).y;
      out.cascade.stages.push_back(std::move(stage));
      out.diagnostics.push_back(d);
      out.reports.push_back(std::move(report));
    } catch (const Error& e) {
      throw with_stage(e, k);
    }
  }
  return out;
}

TransformResult forward_cascade(const Cascade& cascade, const Eigen::Ref<const Matrix>& x, int threads) {
  TransformResult out;
  out.y = x;
  out.z = x;
  out.logdet = Vector::Zero(x.cols());
  for (std::size_t k = 0; k < cascade.stages.size(); ++k) {
    try {
      TransformResult t = forward(cascade.stages[k].params, out.y, threads);
      out.logdet += t.logdet;
      out.z = std::move(t.z);
      out.y = std::move(t.y);
    } catch (const Error& e) {
      throw with_stage(e, k);
    }
  }
  return out;
}

Matrix invert_cascade(const Cascade& cascade, const Eigen::Ref<const Matrix>& y, const InverseOptions& options) {
  Matrix x = y;
  for (std::size_t k = cascade.stages.size(); k-- > 0;) {
    try {
      x = inverse(cascade.stages[k].params, x, options);
    } catch (const Error& e) {
      throw with_stage(e, k);
    }
  }
  return x;
}

double cascade_delta_j(const Cascade& cascade, const Eigen::Ref<const Matrix>& x, int threads) {
  const TransformResult t = forward_cascade(cascade, x, threads);
  const Vector per_sample = 0.5 * t.y.colwise().squaredNorm().transpose() - t.logdet;
  return mean_half_square(x) - per_sample.mean();
}

std::vector<double> stage_delta_j(const Cascade& cascade, const Eigen::Ref<const Matrix>& x, int threads) {
  std::vector<double> out;
  Matrix cur = x;
  for (const Model& stage : cascade.stages) {
    out.push_back(delta_j(stage.params, cur, threads));
    cur = forward(stage.params, cur, threads).y;
  }
  return out;
}

std::string encode_cascade(const Cascade& cascade) {
  detail::ByteWriter w;
  w.magic("GDNC");
  w.u32(kCascadeVersion);
  w.u32(static_cast<std::uint32_t>(cascade.stages.size()));
  for (const Model& m : cascade.stages) {
    const std::string block = encode_model(m);
    w.u64(block.size());
    w.raw(block.data(), block.size());
  }
  return w.take();
}

Cascade decode_cascade(std::string_view bytes) {
  detail::ByteReader r(bytes, "cascade");
  r.expect_magic("GDNC");
  const std::uint32_t version = r.u32();
  if (version != kCascadeVersion)
    throw format_error("cascade: unsupported version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  Cascade c;
  Index dim = -1;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::uint64_t len = r.u64();
    if (len > r.remaining()) throw format_error("cascade: stage " + std::to_string(k) + " block truncated");
    Model m = decode_model(bytes.substr(r.position(), len));
    std::string skip(len, '\0');
    r.raw(skip.data(), len);
    if (dim >= 0 && m.params.dim() != dim) throw format_error("cascade: stage dimensions differ");
    dim = m.params.dim();
    c.stages.push_back(std::move(m));
  }
  r.expect_end();
  return c;
}

void save_cascade(const std::string& path, const Cascade& cascade) { detail::write_file(path, encode_cascade(cascade)); }

Cascade load_cascade(const std::string& path) { return decode_cascade(detail::read_file(path)); }

}  // namespace gdn
