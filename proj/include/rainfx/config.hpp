// Copyright 2026 The rainfx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rainfx/dropfield.hpp"
#include "rainfx/protodrop.hpp"
#include "rainfx/render.hpp"

namespace rainfx {

/// Everything that determines the rendered output for a given input image.
struct EffectiveConfig {
  FieldConfig field;
  ProtoDropParams proto;
  RenderOptions render;

  void validate() const;
  bool operator==(const EffectiveConfig&) const = default;
};

/// Applies one `section.key = value` setting, e.g. ("field.p_r", "0.001").
/// Unknown keys and unparsable values raise ParameterError.
void apply_setting(EffectiveConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key=value`, as given on the command line.
void apply_override(EffectiveConfig& cfg, std::string_view assignment);

/// Reads a key-value file with `[section]` headers and `#` comments.
void load_config_file(EffectiveConfig& cfg, const std::filesystem::path& path);
void parse_config_text(EffectiveConfig& cfg, std::string_view text, std::string_view origin = "<text>");

nlohmann::json to_json(const EffectiveConfig& cfg);
EffectiveConfig config_from_json(const nlohmann::json& j);

/// Key-value rendering of the config, loadable with load_config_file.
std::string to_config_text(const EffectiveConfig& cfg);

}  // namespace rainfx
