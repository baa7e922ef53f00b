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
#include <vector>

#include "rainfx/image.hpp"

namespace rainfx {

/// Shape and optics of the canonical droplet.
struct ProtoDropParams {
  /// Footprint radius of the canonical droplet, texture pixels.
  double radius_px = 32.0;
  /// Cap height over footprint radius; 1 is a hemisphere.
  double cap_ratio = 0.7;
  /// Offset magnitude per unit of surface tilt (n_x / n_z), pixels.
  double refraction_gain = 48.0;
  /// Texture side length, pixels.
  int resolution = 65;

  void validate() const;
  bool operator==(const ProtoDropParams&) const = default;
};

struct TextureSample {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  double alpha = 0.0;
};

/// Four-channel lookup texture for one droplet.
///
/// r/g hold signed sampling offsets (pixels per unit thickness), b the
/// normalized thickness and alpha the coverage. Outside the footprint every
/// channel is zero, which leaves the background sampled in place.
struct ProtoDropTexture {
  int width = 0;
  int height = 0;
  ProtoDropParams params;
  std::vector<double> r;
  std::vector<double> g;
  std::vector<double> b;
  std::vector<double> alpha;

  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  [[nodiscard]] double center_x() const { return (width - 1) * 0.5; }
  [[nodiscard]] double center_y() const { return (height - 1) * 0.5; }

  /// Bilinear lookup at texture coordinates; taps outside the texture read zero.
  [[nodiscard]] TextureSample sample(double x, double y) const;
};

/// Radius of the sphere whose cap has the given footprint radius and height ratio.
double cap_sphere_radius(double footprint_radius, double cap_ratio);

ProtoDropTexture generate_protodrop(const ProtoDropParams& params);

/// Texture as it reads back from disk: offsets on a power-of-two grid of
/// 16-bit steps around the 32768 midpoint, b/alpha as v * 65535.
ProtoDropTexture quantize_texture(const ProtoDropTexture& tex);

/// Power-of-two exponent of the offset quantization step for this texture.
int offset_step_log2(const ProtoDropTexture& tex);

/// Writes a 16-bit RGBA PNG at `path` plus a JSON sidecar at `path + ".json"`.
void save_texture(const ProtoDropTexture& tex, const std::filesystem::path& path);
ProtoDropTexture load_texture(const std::filesystem::path& path);

/// Human-viewable rendering, twice the texture width: the left half maps
/// (r, g) to 0.5 + offset / (2 * offset range) and b to blue, the right half
/// shows alpha as gray. The offset range is the 16-bit quantization range.
ImageBuffer visualize_texture(const ProtoDropTexture& tex);

std::filesystem::path sidecar_path(const std::filesystem::path& texture_path);

}  // namespace rainfx
