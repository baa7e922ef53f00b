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

#include "rainfx/image.hpp"

#include "rainfx/errors.hpp"

namespace rainfx {

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0) throw ParameterError("image dimensions must be positive");
  if (channels != 1 && channels != 3) throw ParameterError("image must have 1 or 3 channels");
  values_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

ImageBuffer ImageBuffer::from_bytes(int width, int height, int channels,
                                    std::span<const std::uint8_t> bytes) {
  ImageBuffer img(width, height, channels);
  if (bytes.size() != img.values_.size()) throw ParameterError("byte buffer size mismatch");
  for (std::size_t i = 0; i < bytes.size(); ++i) img.values_[i] = bytes[i] / 255.0f;
  return img;
}

std::vector<std::uint8_t> ImageBuffer::to_bytes() const {
  std::vector<std::uint8_t> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = quantize_byte(values_[i]);
  return out;
}

}  // namespace rainfx
