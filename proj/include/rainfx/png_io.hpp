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
#include <filesystem>
#include <vector>

#include "rainfx/image.hpp"

namespace rainfx {

/// Reads an 8- or 16-bit PNG as a 1- or 3-channel normalized buffer.
/// Palette images expand to RGB, alpha is dropped, 16-bit is truncated to 8.
ImageBuffer read_png(const std::filesystem::path& path);

/// Writes 8-bit gray or RGB, quantized with round(v * 255).
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

/// Encodes to an in-memory PNG (same bytes write_png would produce).
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);

/// 8-bit grayscale PNG read as integer class ids.
LabelMap read_label_png(const std::filesystem::path& path);
void write_label_png(const std::filesystem::path& path, const LabelMap& labels);

/// Raw 16-bit raster, no transforms applied.
struct Raster16 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint16_t> samples;
};

Raster16 read_png16(const std::filesystem::path& path);
void write_png16(const std::filesystem::path& path, const Raster16& raster);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace rainfx
