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

#include "rainfx/dropfield.hpp"

#include <algorithm>
#include <cmath>

#include "rainfx/errors.hpp"
#include "rainfx/hash.hpp"

namespace rainfx {
namespace {

enum class Stream : std::uint64_t { kSpawn = 1, kScale = 2, kSlip = 3 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream s) {
  return std::mt19937_64(mix_seed(seed, static_cast<std::uint64_t>(s)));
}

bool valid_range(const Range& r) {
  return std::isfinite(r.min) && std::isfinite(r.max) && r.min <= r.max;
}

double draw(std::mt19937_64& rng, const Range& r) {
  if (r.min == r.max) return r.min;
  return std::uniform_real_distribution<double>(r.min, r.max)(rng);
}

}  // namespace

void FieldConfig::validate() const {
  if (!(spawn_probability >= 0.0 && spawn_probability <= 1.0))
    throw ParameterError("spawn probability p_r must lie in [0, 1]");
  if (!(slip_probability >= 0.0 && slip_probability <= 1.0))
    throw ParameterError("slip probability p_d must lie in [0, 1]");
  if (!valid_range(scale_range) || !(scale_range.min > 0.0))
    throw ParameterError("scale range must be nonempty and positive");
  if (!valid_range(diameter_range_mm) || !(diameter_range_mm.min > 0.0))
    throw ParameterError("diameter range must be nonempty and positive");
  if (!(pixels_per_mm > 0.0)) throw ParameterError("pixels_per_mm must be positive");
  if (!(metaball_threshold > 0.0)) throw ParameterError("metaball threshold must be positive");
  if (max_drops < 0) throw ParameterError("max_drops must be non-negative");
}

double metaball_kernel(const Droplet& d, double pixels_per_mm, double u, double v) {
  const double nx = (u - d.u) / (kKernelSupport * d.radius_x(pixels_per_mm));
  const double ny = (v - d.v) / (kKernelSupport * d.radius_y(pixels_per_mm));
  const double r2 = nx * nx + ny * ny;
  if (r2 >= 1.0) return 0.0;
  const double t = 1.0 - r2;
  return t * t;
}

DropField::DropField(FieldConfig config, Dims dims)
    : config_(config),
      dims_(dims),
      spawn_rng_(make_stream(config.seed, Stream::kSpawn)),
      scale_rng_(make_stream(config.seed, Stream::kScale)),
      slip_rng_(make_stream(config.seed, Stream::kSlip)) {
  config_.validate();
  if (dims.width <= 0 || dims.height <= 0) throw ParameterError("image dimensions must be positive");
}

void DropField::spawn() {
  const auto room = static_cast<std::int64_t>(config_.max_drops) -
                    static_cast<std::int64_t>(droplets_.size());
  if (room <= 0 || config_.spawn_probability == 0.0) return;

  const auto pixels = static_cast<std::int64_t>(dims_.area());
  std::binomial_distribution<std::int64_t> count(pixels, config_.spawn_probability);
  const std::int64_t k = std::min(count(spawn_rng_), room);

  std::uniform_int_distribution<std::int64_t> pick(0, pixels - 1);
  for (std::int64_t i = 0; i < k; ++i) {
    const std::int64_t p = pick(spawn_rng_);
    Droplet d;
    d.id = next_id_++;
    d.u = static_cast<double>(p % dims_.width);
    d.v = static_cast<double>(p / dims_.width);
    d.diameter_mm = draw(scale_rng_, config_.diameter_range_mm);
    d.scale_x = draw(scale_rng_, config_.scale_range);
    d.scale_y = draw(scale_rng_, config_.scale_range);
    droplets_.push_back(d);
  }
}

void DropField::step() {
  std::normal_distribution<double> lateral(0.0, kLateralSlipSigmaPx);
  std::bernoulli_distribution slips(config_.slip_probability);
  for (Droplet& d : droplets_) {
    ++d.age;
    if (d.diameter_mm <= kSlipDiameterMm) continue;
    // Draw order is fixed: lateral deviation first, then the slip event.
    const double dx = lateral(slip_rng_);
    const bool slipped = slips(slip_rng_);
    d.u += dx;
    if (slipped) d.v += kSlipStepPx;
  }
  const double ppm = config_.pixels_per_mm;
  const double bottom = dims_.height;
  std::erase_if(droplets_, [&](const Droplet& d) { return d.v - d.radius_y(ppm) >= bottom; });
  if (config_.spawn_every_frame) spawn();
  ++frame_;
}

double DropField::field_function(double u, double v) const {
  double f = 0.0;
  for (const Droplet& d : droplets_) f += metaball_kernel(d, config_.pixels_per_mm, u, v);
  return f;
}

void DropField::add_droplet(Droplet d) {
  d.id = next_id_++;
  droplets_.push_back(d);
}

void DropField::set_droplets(std::vector<Droplet> droplets) {
  droplets_ = std::move(droplets);
  next_id_ = 0;
  for (const Droplet& d : droplets_) next_id_ = std::max(next_id_, d.id + 1);
}

}  // namespace rainfx
