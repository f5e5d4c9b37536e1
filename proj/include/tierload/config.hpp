// Copyright 2026 The tierload Authors. All Rights Reserved.
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

// Run configuration as a flat JSON object. Every key has a default; unknown
// keys are rejected. Precedence: command-line override > file > default.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tierload/dataloader.hpp"

namespace tierload {

struct ConfigKey {
  std::string name;
  std::string default_value;  // JSON text
  std::string help;
};

const std::vector<ConfigKey>& config_keys();

// key -> value text. Values are parsed as JSON when possible, otherwise taken
// as a bare string; comma lists are accepted for array keys.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

// Throws ParameterError on malformed JSON, unknown keys or bad values.
PipelineConfig parse_config(std::string_view json_text, const ConfigOverrides& overrides = {});

// Throws IoError when the file cannot be read.
PipelineConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

// The defaults as an indented JSON document.
std::string default_config_json();

}  // namespace tierload
