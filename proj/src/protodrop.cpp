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

#include "rainfx/protodrop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rainfx/errors.hpp"
#include "rainfx/png_io.hpp"

namespace rainfx {
namespace {

constexpr int kOffsetMid = 32768;
constexpr double kOffsetSpan = 32767.0;
constexpr double kUnitSpan = 65535.0;
constexpr int kMinStepLog2 = -40;

std::uint16_t encode_unit(double v) {
  return static_cast<std::uint16_t>(std::llround(std::clamp(v, 0.0, 1.0) * kUnitSpan));
}

double decode_unit(std::uint16_t q) { return q / kUnitSpan; }

}  // namespace

void ProtoDropParams::validate() const {
  if (!(radius_px > 0.0) || !std::isfinite(radius_px))
    throw ParameterError("radius_px must be positive");
  if (!(cap_ratio > 0.0 && cap_ratio <= 1.0))
    throw ParameterError("cap_ratio must lie in (0, 1]");
  if (!std::isfinite(refraction_gain)) throw ParameterError("refraction_gain must be finite");
  if (resolution < 2.0 * radius_px)
    throw ParameterError("resolution must be at least 2 * radius_px");
}

double cap_sphere_radius(double footprint_radius, double cap_ratio) {
  const double h0 = cap_ratio * footprint_radius;
  return (footprint_radius * footprint_radius + h0 * h0) / (2.0 * h0);
}

TextureSample ProtoDropTexture::sample(double x, double y) const {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double tx = x - fx;
  const double ty = y - fy;
  TextureSample s;
  const auto tap = [&](int xi, int yi, double w) {
    if (w == 0.0 || xi < 0 || yi < 0 || xi >= width || yi >= height) return;
    const std::size_t i = index(xi, yi);
    s.r += w * r[i];
    s.g += w * g[i];
    s.b += w * b[i];
    s.alpha += w * alpha[i];
  };
  tap(x0, y0, (1.0 - tx) * (1.0 - ty));
  tap(x0 + 1, y0, tx * (1.0 - ty));
  tap(x0, y0 + 1, (1.0 - tx) * ty);
  tap(x0 + 1, y0 + 1, tx * ty);
  return s;
}

ProtoDropTexture generate_protodrop(const ProtoDropParams& params) {
  params.validate();
  ProtoDropTexture tex;
  tex.width = tex.height = params.resolution;
  tex.params = params;
  const std::size_t n = static_cast<std::size_t>(tex.width) * tex.height;
  tex.r.assign(n, 0.0);
  tex.g.assign(n, 0.0);
  tex.b.assign(n, 0.0);
  tex.alpha.assign(n, 0.0);

  const double a = params.radius_px;
  const double h0 = params.cap_ratio * a;
  const double rs = cap_sphere_radius(a, params.cap_ratio);
  const double cx = tex.center_x();
  const double cy = tex.center_y();

  // Height field h(rho) = sqrt(rs^2 - rho^2) - (rs - h0); the unnormalized
  // normal is (-dh/dx, -dh/dy, 1) = (x / q, y / q, 1) with q = sqrt(rs^2 - rho^2).
  double b_max = 0.0;
  for (int py = 0; py < tex.height; ++py) {
    for (int px = 0; px < tex.width; ++px) {
      const double x = px - cx;
      const double y = py - cy;
      const double rho = std::sqrt(x * x + y * y);
      if (rho >= a) continue;
      const double q = std::sqrt(rs * rs - rho * rho);
      const double nz = 1.0 / std::sqrt(1.0 + (x * x + y * y) / (q * q));
      const double nx = (x / q) * nz;
      const double ny = (y / q) * nz;
      const std::size_t i = tex.index(px, py);
      tex.r[i] = params.refraction_gain * nx / nz;
      tex.g[i] = params.refraction_gain * ny / nz;
      tex.b[i] = std::max(0.0, q - (rs - h0)) / h0;
      tex.alpha[i] = std::min(1.0, a - rho);
      b_max = std::max(b_max, tex.b[i]);
    }
  }
  // Lattice may miss the apex by half a pixel; rescale so the peak reads 1.
  if (b_max > 0.0) {
    for (double& v : tex.b) v /= b_max;
  }
  return tex;
}

int offset_step_log2(const ProtoDropTexture& tex) {
  double max_abs = 0.0;
  for (double v : tex.r) max_abs = std::max(max_abs, std::abs(v));
  for (double v : tex.g) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) return kMinStepLog2;
  int k = static_cast<int>(std::ceil(std::log2(max_abs / kOffsetSpan)));
  // log2 rounding can land one below the true bound.
  while (std::ldexp(kOffsetSpan, k) < max_abs) ++k;
  return std::max(k, kMinStepLog2);
}

namespace {

Raster16 encode_texture(const ProtoDropTexture& tex, int step_log2) {
  Raster16 raster{tex.width, tex.height, 4, {}};
  raster.samples.resize(static_cast<std::size_t>(tex.width) * tex.height * 4);
  const auto encode_offset = [step_log2](double v) {
    const long long q = kOffsetMid + std::llround(std::ldexp(v, -step_log2));
    return static_cast<std::uint16_t>(std::clamp<long long>(q, 1, 65535));
  };
  for (std::size_t i = 0; i < tex.r.size(); ++i) {
    raster.samples[4 * i + 0] = encode_offset(tex.r[i]);
    raster.samples[4 * i + 1] = encode_offset(tex.g[i]);
    raster.samples[4 * i + 2] = encode_unit(tex.b[i]);
    raster.samples[4 * i + 3] = encode_unit(tex.alpha[i]);
  }
  return raster;
}

ProtoDropTexture decode_texture(const Raster16& raster, int step_log2, const ProtoDropParams& params) {
  ProtoDropTexture tex;
  tex.width = raster.width;
  tex.height = raster.height;
  tex.params = params;
  const std::size_t n = static_cast<std::size_t>(tex.width) * tex.height;
  tex.r.resize(n);
  tex.g.resize(n);
  tex.b.resize(n);
  tex.alpha.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tex.r[i] = std::ldexp(static_cast<double>(raster.samples[4 * i + 0] - kOffsetMid), step_log2);
    tex.g[i] = std::ldexp(static_cast<double>(raster.samples[4 * i + 1] - kOffsetMid), step_log2);
    tex.b[i] = decode_unit(raster.samples[4 * i + 2]);
    tex.alpha[i] = decode_unit(raster.samples[4 * i + 3]);
  }
  return tex;
}

}  // namespace

ProtoDropTexture quantize_texture(const ProtoDropTexture& tex) {
  const int k = offset_step_log2(tex);
  return decode_texture(encode_texture(tex, k), k, tex.params);
}

ImageBuffer visualize_texture(const ProtoDropTexture& tex) {
  const double range = std::ldexp(kOffsetSpan, offset_step_log2(tex));
  ImageBuffer vis(2 * tex.width, tex.height, 3);
  for (int y = 0; y < tex.height; ++y) {
    for (int x = 0; x < tex.width; ++x) {
      const std::size_t i = tex.index(x, y);
      vis.at(x, y, 0) = static_cast<float>(0.5 + tex.r[i] / (2.0 * range));
      vis.at(x, y, 1) = static_cast<float>(0.5 + tex.g[i] / (2.0 * range));
      vis.at(x, y, 2) = static_cast<float>(tex.b[i]);
      for (int c = 0; c < 3; ++c) vis.at(tex.width + x, y, c) = static_cast<float>(tex.alpha[i]);
    }
  }
  return vis;
}

std::filesystem::path sidecar_path(const std::filesystem::path& texture_path) {
  std::filesystem::path p = texture_path;
  p += ".json";
  return p;
}

void save_texture(const ProtoDropTexture& tex, const std::filesystem::path& path) {
  if (tex.width <= 0 || tex.height <= 0 || tex.r.size() != static_cast<std::size_t>(tex.width) * tex.height)
    throw ParameterError("texture is empty or inconsistent");
  const int k = offset_step_log2(tex);
  write_png16(path, encode_texture(tex, k));

  const nlohmann::json meta = {
      {"format", "rainfx-protodrop"},
      {"version", 1},
      {"width", tex.width},
      {"height", tex.height},
      {"channels", {"r", "g", "b", "alpha"}},
      {"radius_px", tex.params.radius_px},
      {"cap_ratio", tex.params.cap_ratio},
      {"refraction_gain", tex.params.refraction_gain},
      {"resolution", tex.params.resolution},
      {"offset_midpoint", kOffsetMid},
      {"offset_step_log2", k},
  };
  std::ofstream out(sidecar_path(path), std::ios::trunc);
  if (!out) throw IoError("cannot write " + sidecar_path(path).string());
  out << meta.dump(2) << '\n';
}

ProtoDropTexture load_texture(const std::filesystem::path& path) {
  const Raster16 raster = read_png16(path);
  if (raster.channels != 4)
    throw FormatError(path.string() + ": expected 4 channels, found " +
                      std::to_string(raster.channels));

  const auto meta_path = sidecar_path(path);
  std::ifstream in(meta_path);
  if (!in) throw IoError("missing texture sidecar " + meta_path.string());
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }
  try {
    if (meta.at("format") != "rainfx-protodrop")
      throw FormatError(meta_path.string() + ": not a protodrop sidecar");
    if (meta.at("width").get<int>() != raster.width || meta.at("height").get<int>() != raster.height)
      throw FormatError(meta_path.string() + ": dimensions disagree with texture");
    ProtoDropParams params;
    params.radius_px = meta.at("radius_px").get<double>();
    params.cap_ratio = meta.at("cap_ratio").get<double>();
    params.refraction_gain = meta.at("refraction_gain").get<double>();
    params.resolution = meta.at("resolution").get<int>();
    return decode_texture(raster, meta.at("offset_step_log2").get<int>(), params);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }
}

}  // namespace rainfx
