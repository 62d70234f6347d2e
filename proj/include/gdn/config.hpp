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

#include <string>

#include "gdn/model_io.hpp"
#include "gdn/trainer.hpp"

namespace gdn {

/// Everything a `fit` run reads from its key=value config file.
struct RunConfig {
  FitConfig fit;
  int stages = 1;  // > 1 fits a greedy cascade with the same config per stage
  PreprocMeta meta;  // recorded into the model; describes how the data was made
};

/// Parses "key = value" lines; '#' starts a comment, blank lines are ignored.
/// Keys: batch_size, epochs, learning_rate, adam_beta1, adam_beta2, adam_eps,
/// seed, variant, p, partition, h_init, gamma_init, pd_probes, threads,
/// stages, offset, scale, patch_width, mean_removed. `partition` lists
/// 0-based subspaces as "0,1;2,3". Unknown keys, duplicate keys and
/// malformed values throw InvalidArgument naming the line.
RunConfig parse_run_config(const std::string& text);

/// Every key with its resolved value, one "key = value" per line, in the
/// order listed above. parse_run_config(format_run_config(c)) reproduces c.
std::string format_run_config(const RunConfig& config);

/// "0,1;2,3" <-> {{0,1},{2,3}}.
std::vector<std::vector<Index>> parse_partition(const std::string& text);
std::string format_partition(const std::vector<std::vector<Index>>& partition);

}  // namespace gdn
