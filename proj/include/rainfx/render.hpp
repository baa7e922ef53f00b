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

#include <span>
#include <vector>

#include "rainfx/dropfield.hpp"
#include "rainfx/image.hpp"
#include "rainfx/protodrop.hpp"

namespace rainfx {

/// Full-image lookup texture assembled from every droplet.
///
/// Outside droplets all channels are zero, i.e. the background is sampled
/// in place. `edge` is the approximate distance to the merged droplet rim in
/// units of the local footprint radius and is only meaningful where alpha > 0.
struct CompositeMap {
  int width = 0;
  int height = 0;
  std::vector<double> r;
  std::vector<double> g;
  std::vector<double> b;
  std::vector<double> alpha;
  std::vector<double> edge;

  static CompositeMap zeros(Dims dims);
  /// Resizes to `dims` and zeroes every channel, keeping allocated storage.
  void reset(Dims dims);

  [[nodiscard]] Dims dims() const { return {width, height}; }
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
};

struct RenderOptions {
  /// Gaussian blur applied to the refracted layer only; 0 disables it.
  double defocus_sigma = 0.0;
  /// Darkened rim near droplet borders.
  bool dark_band = false;
  double dark_band_width = 0.1;
  double dark_band_gain = 0.6;

  bool operator==(const RenderOptions&) const = default;
};

double smoothstep(double edge0, double edge1, double x);

/// Warps the proto texture onto every droplet and merges overlaps through the
/// metaball field: offsets are field-weighted averages, thickness is a sum
/// clamped to 1, alpha is nonzero exactly where the field reaches the threshold.
CompositeMap composite(std::span<const Droplet> droplets, const FieldConfig& config,
                       const ProtoDropTexture& proto, Dims dims);
CompositeMap composite(const DropField& field, const ProtoDropTexture& proto, Dims dims);
/// As composite(), writing into `out` and reusing its storage across frames.
void composite_into(std::span<const Droplet> droplets, const FieldConfig& config,
                    const ProtoDropTexture& proto, Dims dims, CompositeMap& out);

/// Refracts the image through the composite: inside droplets the source is
/// sampled at (u + R*B, v + G*B), bilinear with clamp-to-edge, and blended by
/// alpha. Pixels with alpha = 0 are copied unchanged.
ImageBuffer apply_rain(const ImageBuffer& img, const CompositeMap& comp,
                       const RenderOptions& options = {});
/// As apply_rain(), writing into `out` and reusing its storage.
void apply_rain_into(const ImageBuffer& img, const CompositeMap& comp, const RenderOptions& options,
                     ImageBuffer& out);

/// 1 where alpha > 0, else 0.
ImageBuffer droplet_mask(const CompositeMap& comp);

/// Bilinear sample with coordinates clamped to the image.
double sample_clamped(const ImageBuffer& img, double x, double y, int channel);

}  // namespace rainfx
