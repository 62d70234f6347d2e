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

#include "gdn/model_io.hpp"

#include "bytes.hpp"
#include "gdn/error.hpp"

namespace gdn {

std::string encode_model(const Model& model) {
  const GdnParams& p = model.params;
  detail::ByteWriter w;
  w.magic("GDNM");
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(p.dim()));
  w.u32(static_cast<std::uint32_t>(model.tying.variant));
  w.f64(model.tying.p);
  w.u32(static_cast<std::uint32_t>(model.tying.partition.size()));
  for (const auto& set : model.tying.partition) {
    w.u32(static_cast<std::uint32_t>(set.size()));
    for (Index i : set) w.u32(static_cast<std::uint32_t>(i));
  }
  w.matrix(p.H);
  w.matrix(p.alpha);
  w.vector(p.beta);
  w.matrix(p.gamma);
  w.vector(p.epsilon);
  w.f64(model.meta.offset);
  w.f64(model.meta.scale);
  w.u32(model.meta.patch_width);
  w.u8(model.meta.mean_removed ? 1 : 0);
  w.u8(model.meta.gaussianizer ? 1 : 0);
  if (const auto& g = model.meta.gaussianizer) {
    for (double v : {g->location, g->scale, g->shape, g->asymmetry, g->lower, g->upper}) w.f64(v);
  }
  return w.take();
}

Model decode_model(std::string_view bytes) {
  detail::ByteReader r(bytes, "model");
  r.expect_magic("GDNM");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion)
    throw format_error("model: version " + std::to_string(version) + " not supported (expected " +
                       std::to_string(kModelVersion) + ")");
  const std::uint32_t n = r.u32();
  if (n == 0 || n > 4096) throw format_error("model: bad dimension " + std::to_string(n));
  Model m;
  const std::uint32_t tag = r.u32();
  if (tag > static_cast<std::uint32_t>(Variant::ClassicDN)) throw format_error("model: unknown tying tag");
  m.tying.variant = static_cast<Variant>(tag);
  m.tying.p = r.f64();
  const std::uint32_t sets = r.u32();
  if (sets > n) throw format_error("model: too many subspaces");
  for (std::uint32_t b = 0; b < sets; ++b) {
    const std::uint32_t size = r.u32();
    if (size > n) throw format_error("model: subspace larger than dimension");
    std::vector<Index> set(size);
    for (auto& i : set) i = r.u32();
    m.tying.partition.push_back(std::move(set));
  }
  const Index dim = n;
  m.params.H = r.matrix(dim, dim);
  m.params.alpha = r.matrix(dim, dim);
  m.params.beta = r.vector(dim);
  m.params.gamma = r.matrix(dim, dim);
  m.params.epsilon = r.vector(dim);
  m.meta.offset = r.f64();
  m.meta.scale = r.f64();
  m.meta.patch_width = r.u32();
  m.meta.mean_removed = r.u8() != 0;
  if (r.u8() != 0) {
    PointwiseGaussianizer g;
    g.location = r.f64();
    g.scale = r.f64();
    g.shape = r.f64();
    g.asymmetry = r.f64();
    g.lower = r.f64();
    g.upper = r.f64();
    m.meta.gaussianizer = g;
  }
  r.expect_end();
  try {
    validate_tying(m.tying, dim);
    check_invariants(m.params);
  } catch (const Error& e) {
    throw format_error(std::string("model: ") + e.what());
  }
  return m;
}

void save_model(const std::string& path, const Model& model) { detail::write_file(path, encode_model(model)); }

Model load_model(const std::string& path) { return decode_model(detail::read_file(path)); }

}  // namespace gdn
