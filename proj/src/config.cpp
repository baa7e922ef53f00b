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

#include "rainfx/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rainfx/errors.hpp"

namespace rainfx {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParameterError("invalid value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ParameterError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

using Setter = std::function<void(EffectiveConfig&, std::string_view key, std::string_view value)>;

template <typename T, typename Member>
Setter number(Member member) {
  return [member](EffectiveConfig& c, std::string_view k, std::string_view v) {
    std::invoke(member, c) = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"field.p_r", number<double>([](EffectiveConfig& c) -> double& { return c.field.spawn_probability; })},
      {"field.p_d", number<double>([](EffectiveConfig& c) -> double& { return c.field.slip_probability; })},
      {"field.scale_min", number<double>([](EffectiveConfig& c) -> double& { return c.field.scale_range.min; })},
      {"field.scale_max", number<double>([](EffectiveConfig& c) -> double& { return c.field.scale_range.max; })},
      {"field.diameter_min_mm",
       number<double>([](EffectiveConfig& c) -> double& { return c.field.diameter_range_mm.min; })},
      {"field.diameter_max_mm",
       number<double>([](EffectiveConfig& c) -> double& { return c.field.diameter_range_mm.max; })},
      {"field.pixels_per_mm", number<double>([](EffectiveConfig& c) -> double& { return c.field.pixels_per_mm; })},
      {"field.metaball_threshold",
       number<double>([](EffectiveConfig& c) -> double& { return c.field.metaball_threshold; })},
      {"field.seed", number<std::uint64_t>([](EffectiveConfig& c) -> std::uint64_t& { return c.field.seed; })},
      {"field.max_drops", number<int>([](EffectiveConfig& c) -> int& { return c.field.max_drops; })},
      {"field.spawn_every_frame",
       [](EffectiveConfig& c, std::string_view k, std::string_view v) { c.field.spawn_every_frame = parse_bool(k, v); }},
      {"proto.radius_px", number<double>([](EffectiveConfig& c) -> double& { return c.proto.radius_px; })},
      {"proto.cap_ratio", number<double>([](EffectiveConfig& c) -> double& { return c.proto.cap_ratio; })},
      {"proto.refraction_gain", number<double>([](EffectiveConfig& c) -> double& { return c.proto.refraction_gain; })},
      {"proto.resolution", number<int>([](EffectiveConfig& c) -> int& { return c.proto.resolution; })},
      {"render.defocus_sigma", number<double>([](EffectiveConfig& c) -> double& { return c.render.defocus_sigma; })},
      {"render.dark_band",
       [](EffectiveConfig& c, std::string_view k, std::string_view v) { c.render.dark_band = parse_bool(k, v); }},
      {"render.dark_band_width", number<double>([](EffectiveConfig& c) -> double& { return c.render.dark_band_width; })},
      {"render.dark_band_gain", number<double>([](EffectiveConfig& c) -> double& { return c.render.dark_band_gain; })},
  };
  return table;
}

}  // namespace

void EffectiveConfig::validate() const {
  field.validate();
  proto.validate();
  if (!(render.defocus_sigma >= 0.0)) throw ParameterError("render.defocus_sigma must be non-negative");
  if (!(render.dark_band_width >= 0.0)) throw ParameterError("render.dark_band_width must be non-negative");
  if (!(render.dark_band_gain >= 0.0 && render.dark_band_gain <= 1.0))
    throw ParameterError("render.dark_band_gain must lie in [0, 1]");
}

void apply_setting(EffectiveConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(trim(key));
  if (it == table.end()) throw ParameterError("unknown config key '" + std::string(key) + "'");
  it->second(cfg, it->first, unquote(trim(value)));
}

void apply_override(EffectiveConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ParameterError("override '" + std::string(assignment) + "' is not of the form key=value");
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void parse_config_text(EffectiveConfig& cfg, std::string_view text, std::string_view origin) {
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ParameterError(where + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParameterError(where + "expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    try {
      apply_setting(cfg, key, line.substr(eq + 1));
    } catch (const ParameterError& e) {
      throw ParameterError(where + e.what());
    }
  }
}

void load_config_file(EffectiveConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  parse_config_text(cfg, ss.str(), path.string());
}

nlohmann::json to_json(const EffectiveConfig& cfg) {
  const FieldConfig& f = cfg.field;
  return {
      {"field",
       {{"p_r", f.spawn_probability},
        {"p_d", f.slip_probability},
        {"scale_min", f.scale_range.min},
        {"scale_max", f.scale_range.max},
        {"diameter_min_mm", f.diameter_range_mm.min},
        {"diameter_max_mm", f.diameter_range_mm.max},
        {"pixels_per_mm", f.pixels_per_mm},
        {"metaball_threshold", f.metaball_threshold},
        {"seed", f.seed},
        {"max_drops", f.max_drops},
        {"spawn_every_frame", f.spawn_every_frame}}},
      {"proto",
       {{"radius_px", cfg.proto.radius_px},
        {"cap_ratio", cfg.proto.cap_ratio},
        {"refraction_gain", cfg.proto.refraction_gain},
        {"resolution", cfg.proto.resolution}}},
      {"render",
       {{"defocus_sigma", cfg.render.defocus_sigma},
        {"dark_band", cfg.render.dark_band},
        {"dark_band_width", cfg.render.dark_band_width},
        {"dark_band_gain", cfg.render.dark_band_gain}}},
  };
}

EffectiveConfig config_from_json(const nlohmann::json& j) {
  EffectiveConfig c;
  try {
    const auto& f = j.at("field");
    c.field.spawn_probability = f.at("p_r").get<double>();
    c.field.slip_probability = f.at("p_d").get<double>();
    c.field.scale_range = {f.at("scale_min").get<double>(), f.at("scale_max").get<double>()};
    c.field.diameter_range_mm = {f.at("diameter_min_mm").get<double>(), f.at("diameter_max_mm").get<double>()};
    c.field.pixels_per_mm = f.at("pixels_per_mm").get<double>();
    c.field.metaball_threshold = f.at("metaball_threshold").get<double>();
    c.field.seed = f.at("seed").get<std::uint64_t>();
    c.field.max_drops = f.at("max_drops").get<int>();
    c.field.spawn_every_frame = f.at("spawn_every_frame").get<bool>();
    const auto& p = j.at("proto");
    c.proto.radius_px = p.at("radius_px").get<double>();
    c.proto.cap_ratio = p.at("cap_ratio").get<double>();
    c.proto.refraction_gain = p.at("refraction_gain").get<double>();
    c.proto.resolution = p.at("resolution").get<int>();
    const auto& r = j.at("render");
    c.render.defocus_sigma = r.at("defocus_sigma").get<double>();
    c.render.dark_band = r.at("dark_band").get<bool>();
    c.render.dark_band_width = r.at("dark_band_width").get<double>();
    c.render.dark_band_gain = r.at("dark_band_gain").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed config record: ") + e.what());
  }
  return c;
}

std::string to_config_text(const EffectiveConfig& cfg) {
  const nlohmann::json j = to_json(cfg);
  std::ostringstream out;
  bool first = true;
  for (const char* section : {"field", "proto", "render"}) {
    if (!first) out << '\n';
    first = false;
    out << '[' << section << "]\n";
    for (const auto& [key, value] : j.at(section).items()) out << key << " = " << value.dump() << '\n';
  }
  return out.str();
}

}  // namespace rainfx
