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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rainfx/image.hpp"

namespace rainfx {

struct Range {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const Range&) const = default;
};

/// Parameters of the droplet population.
struct FieldConfig {
  /// Per-pixel, per-spawn probability of seeding a droplet center.
  double spawn_probability = 5.0e-4;
  /// Probability that a large droplet slips 5 px down in one timestep.
  double slip_probability = 0.3;
  Range scale_range{0.6, 1.4};
  Range diameter_range_mm{1.0, 8.0};
  double pixels_per_mm = 10.0;
  double metaball_threshold = 0.4;
  std::uint64_t seed = 0;
  int max_drops = 5000;
  bool spawn_every_frame = false;

  void validate() const;
  bool operator==(const FieldConfig&) const = default;
};

struct Droplet {
  std::uint64_t id = 0;
  double u = 0.0;
  double v = 0.0;
  double diameter_mm = 0.0;
  double scale_x = 1.0;
  double scale_y = 1.0;
  int age = 0;

  /// Footprint semi-axes in pixels: diameter * pixels_per_mm / 2, scaled per axis.
  [[nodiscard]] double radius_x(double pixels_per_mm) const {
    return diameter_mm * pixels_per_mm * 0.5 * scale_x;
  }
  [[nodiscard]] double radius_y(double pixels_per_mm) const {
    return diameter_mm * pixels_per_mm * 0.5 * scale_y;
  }

  bool operator==(const Droplet&) const = default;
};

/// Diameters above this slip; at or below it droplets stay put.
inline constexpr double kSlipDiameterMm = 4.0;
inline constexpr double kSlipStepPx = 5.0;
inline constexpr double kLateralSlipSigmaPx = 3.0;
/// Metaball support radius as a multiple of the footprint radius.
inline constexpr double kKernelSupport = 1.5;

/// Metaball contribution of one droplet: (1 - r^2)^2 inside its support,
/// r being the distance normalized by 1.5x the footprint semi-axes.
double metaball_kernel(const Droplet& d, double pixels_per_mm, double u, double v);

/// Seeded droplet population on an image plane.
///
/// Three independent generator streams are kept: `spawn` (counts and
/// positions), `scale` (diameters and scales) and `slip` (motion). Replaying
/// the same seed, config and call sequence reproduces every droplet exactly.
class DropField {
 public:
  DropField(FieldConfig config, Dims dims);

  /// Seeds K ~ Binomial(W*H, p_r) droplets at uniformly chosen pixels, capped at max_drops.
  void spawn();

  /// One timestep of slip; drops that leave through the bottom edge are removed.
  void step();

  /// Summed metaball field at a sub-pixel position.
  [[nodiscard]] double field_function(double u, double v) const;

  void add_droplet(Droplet d);
  /// Replaces the population wholesale (manifest replay).
  void set_droplets(std::vector<Droplet> droplets);

  [[nodiscard]] const std::vector<Droplet>& droplets() const { return droplets_; }
  [[nodiscard]] const FieldConfig& config() const { return config_; }
  [[nodiscard]] Dims dims() const { return dims_; }
  [[nodiscard]] std::int64_t frame() const { return frame_; }

 private:
  FieldConfig config_;
  Dims dims_;
  std::mt19937_64 spawn_rng_;
  std::mt19937_64 scale_rng_;
  std::mt19937_64 slip_rng_;
  std::vector<Droplet> droplets_;
  std::uint64_t next_id_ = 0;
  std::int64_t frame_ = 0;
};

}  // namespace rainfx
