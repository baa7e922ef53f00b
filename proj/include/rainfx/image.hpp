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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rainfx {

struct Dims {
  int width = 0;
  int height = 0;

  [[nodiscard]] std::size_t area() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool operator==(const Dims&) const = default;
};

/// Interleaved raster with intensities normalized to [0,1].
///
/// 8-bit data maps as value = byte / 255 and quantizes back with
/// round(value * 255), so an untouched buffer round-trips bit-exactly.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, float fill = 0.0f);

  static ImageBuffer from_bytes(int width, int height, int channels,
                                std::span<const std::uint8_t> bytes);
  [[nodiscard]] std::vector<std::uint8_t> to_bytes() const;

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int channels() const { return channels_; }
  [[nodiscard]] Dims dims() const { return {width_, height_}; }
  [[nodiscard]] bool empty() const { return values_.empty(); }

  float& at(int x, int y, int c = 0) {
    return values_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  [[nodiscard]] float at(int x, int y, int c = 0) const {
    return values_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<float> values() { return values_; }
  [[nodiscard]] std::span<const float> values() const { return values_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> values_;
};

inline std::uint8_t quantize_byte(float v) {
  const float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  return static_cast<std::uint8_t>(c * 255.0f + 0.5f);
}

/// Integer class-id raster used by the multiclass metrics.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;

  std::int32_t& at(int x, int y) {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  [[nodiscard]] std::int32_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

}  // namespace rainfx
