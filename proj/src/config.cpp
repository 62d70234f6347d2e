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

#include "gdn/config.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "gdn/error.hpp"

namespace gdn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end)
    throw invalid_argument("config: bad value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw invalid_argument("config: bad boolean '" + value + "' for " + key);
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::vector<std::vector<Index>> parse_partition(const std::string& text) {
  std::vector<std::vector<Index>> out;
  std::stringstream sets(text);
  std::string set;
  while (std::getline(sets, set, ';')) {
    std::vector<Index> ids;
    std::stringstream items(set);
    std::string item;
    while (std::getline(items, item, ',')) ids.push_back(parse_number<Index>("partition", trim(item)));
    out.push_back(std::move(ids));
  }
  return out;
}

std::string format_partition(const std::vector<std::vector<Index>>& partition) {
  std::string out;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    if (b) out += ';';
    for (std::size_t i = 0; i < partition[b].size(); ++i) {
      if (i) out += ',';
      out += std::to_string(partition[b][i]);
    }
  }
  return out;
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  FitConfig& f = c.fit;
  std::set<std::string> seen;
  std::stringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw invalid_argument("config line " + std::to_string(lineno) + ": duplicate key " + key);
    if (key == "batch_size") f.batch_size = parse_number<Index>(key, value);
    else if (key == "epochs") f.epochs = parse_number<int>(key, value);
    else if (key == "learning_rate") f.learning_rate = parse_number<double>(key, value);
    else if (key == "adam_beta1") f.adam_beta1 = parse_number<double>(key, value);
    else if (key == "adam_beta2") f.adam_beta2 = parse_number<double>(key, value);
    else if (key == "adam_eps") f.adam_eps = parse_number<double>(key, value);
    else if (key == "seed") f.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "variant") f.tying.variant = variant_from_string(value);
    else if (key == "p") f.tying.p = parse_number<double>(key, value);
    else if (key == "partition") f.tying.partition = parse_partition(value);
    else if (key == "h_init") f.h_init = h_init_from_string(value);
    else if (key == "gamma_init") f.gamma_init = parse_number<double>(key, value);
    else if (key == "pd_probes") f.pd_probes = parse_number<Index>(key, value);
    else if (key == "threads") f.threads = parse_number<int>(key, value);
    else if (key == "stages") c.stages = parse_number<int>(key, value);
    else if (key == "offset") c.meta.offset = parse_number<double>(key, value);
    else if (key == "scale") c.meta.scale = parse_number<double>(key, value);
    else if (key == "patch_width") c.meta.patch_width = parse_number<std::uint32_t>(key, value);
    else if (key == "mean_removed") c.meta.mean_removed = parse_bool(key, value);
    else throw invalid_argument("config line " + std::to_string(lineno) + ": unknown key " + key);
  }
  if (c.stages < 1) throw invalid_argument("config: stages must be at least 1");
  if (!(c.meta.scale > 0.0)) throw invalid_argument("config: scale must be positive");
  return c;
}

std::string format_run_config(const RunConfig& c) {
  const FitConfig& f = c.fit;
  std::ostringstream out;
  out << "batch_size = " << f.batch_size << '\n'
      << "epochs = " << f.epochs << '\n'
      << "learning_rate = " << format_double(f.learning_rate) << '\n'
      << "adam_beta1 = " << format_double(f.adam_beta1) << '\n'
      << "adam_beta2 = " << format_double(f.adam_beta2) << '\n'
      << "adam_eps = " << format_double(f.adam_eps) << '\n'
      << "seed = " << f.seed << '\n'
      << "variant = " << to_string(f.tying.variant) << '\n'
      << "p = " << format_double(f.tying.p) << '\n'
      << "partition = " << format_partition(f.tying.partition) << '\n'
      << "h_init = " << to_string(f.h_init) << '\n'
      << "gamma_init = " << format_double(f.gamma_init) << '\n'
      << "pd_probes = " << f.pd_probes << '\n'
      << "threads = " << f.threads << '\n'
      << "stages = " << c.stages << '\n'
      << "offset = " << format_double(c.meta.offset) << '\n'
      << "scale = " << format_double(c.meta.scale) << '\n'
      << "patch_width = " << c.meta.patch_width << '\n'
      << "mean_removed = " << (c.meta.mean_removed ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace gdn
