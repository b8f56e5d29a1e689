// Copyright 2026 The ngcsim Authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ngcsim/simulator.hpp"

namespace ngc {

// key -> raw value, as read from a config file or collected from flags.
using ConfigMap = std::map<std::string, std::string>;

// One `key = value` pair per line; `#` starts a comment. Keys use
// underscores. Throws UsageError for malformed lines and unknown keys.
ConfigMap parse_config_text(std::string_view text);
ConfigMap load_config_file(const std::filesystem::path& path);

struct ExperimentConfig {
  RunConfig run;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir;
  bool compress_check = false;

  bool operator==(const ExperimentConfig&) const = default;
};

// Defaults, overlaid by `file`, overlaid by `flags`. Throws UsageError naming
// the key for unknown keys, unparsable or out-of-range values, and
// inconsistent pairs such as an explicit alpha with dpsgd.
ExperimentConfig resolve_config(const ConfigMap& file, const ConfigMap& flags);

// Command-line entry point: parses flags (plus --config FILE) with CLI11.
// Throws UsageError; --help is reported through `help_text` and `wants_help`.
struct ParsedArgs {
  ExperimentConfig config;
  bool wants_help = false;
  std::string help_text;
};
ParsedArgs parse_config(const std::vector<std::string>& args);

// Fully resolved key=value text; parse_config_text reads it back.
std::string format_config(const ExperimentConfig& config);

const std::vector<std::string>& known_config_keys();

}  // namespace ngc
