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

#include "rainfx/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "rainfx/errors.hpp"

namespace rainfx {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  return f;
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> data;  // big-endian samples when bit_depth == 16
};

// libpng reports errors through longjmp; only trivially destructible locals
// live between setjmp and the jump, the buffers are owned by the caller.
bool decode_raw(std::FILE* fp, bool to_8bit, DecodedPng& out, char* err, std::size_t err_len) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) {
    std::snprintf(err, err_len, "out of memory");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    std::snprintf(err, err_len, "out of memory");
    return false;
  }
  std::vector<png_bytep>* rows = new std::vector<png_bytep>();
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    delete rows;
    std::snprintf(err, err_len, "corrupt or unsupported PNG data");
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  if (to_8bit) {
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.data.resize(stride * static_cast<std::size_t>(out.height));
  rows->resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) (*rows)[y] = out.data.data() + stride * y;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  delete rows;
  return true;
}

DecodedPng decode_file(const std::filesystem::path& path, bool to_8bit) {
  FilePtr f = open_file(path, "rb");
  unsigned char sig[8] = {};
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError(path.string() + ": not a PNG file");
  std::rewind(f.get());
  DecodedPng out;
  char err[256] = {};
  if (!decode_raw(f.get(), to_8bit, out, err, sizeof err))
    throw FormatError(path.string() + ": " + err);
  return out;
}

struct WriteSink {
  std::vector<std::uint8_t>* bytes;
};

void sink_write(png_structp png, png_bytep data, png_size_t len) {
  auto* sink = static_cast<WriteSink*>(png_get_io_ptr(png));
  sink->bytes->insert(sink->bytes->end(), data, data + len);
}
void sink_flush(png_structp) {}

bool encode_raw(const std::uint8_t* pixels, int width, int height, int channels, int bit_depth,
                std::vector<std::uint8_t>& out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  std::vector<png_const_bytep>* rows = new std::vector<png_const_bytep>();
  WriteSink sink{&out};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    delete rows;
    return false;
  }
  int color = PNG_COLOR_TYPE_GRAY;
  if (channels == 3) color = PNG_COLOR_TYPE_RGB;
  if (channels == 4) color = PNG_COLOR_TYPE_RGB_ALPHA;
  png_set_write_fn(png, &sink, sink_write, sink_flush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t stride =
      static_cast<std::size_t>(width) * channels * static_cast<std::size_t>(bit_depth / 8);
  rows->resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) (*rows)[y] = pixels + stride * y;
  png_write_rows(png, const_cast<png_bytepp>(rows->data()), static_cast<png_uint_32>(height));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  delete rows;
  return true;
}

std::vector<std::uint8_t> encode_or_throw(const std::uint8_t* pixels, int width, int height,
                                          int channels, int bit_depth) {
  std::vector<std::uint8_t> out;
  if (!encode_raw(pixels, width, height, channels, bit_depth, out))
    throw IoError("PNG encoding failed");
  return out;
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

ImageBuffer read_png(const std::filesystem::path& path) {
  const DecodedPng d = decode_file(path, true);
  if (d.channels != 1 && d.channels != 3)
    throw FormatError(path.string() + ": unsupported channel count " + std::to_string(d.channels));
  return ImageBuffer::from_bytes(d.width, d.height, d.channels, d.data);
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
  const std::vector<std::uint8_t> bytes = img.to_bytes();
  return encode_or_throw(bytes.data(), img.width(), img.height(), img.channels(), 8);
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
  write_file_bytes(path, encode_png(img));
}

LabelMap read_label_png(const std::filesystem::path& path) {
  const DecodedPng d = decode_file(path, true);
  if (d.channels != 1)
    throw FormatError(path.string() + ": label maps must be single-channel");
  LabelMap m{d.width, d.height, {}};
  m.labels.assign(d.data.begin(), d.data.end());
  return m;
}

void write_label_png(const std::filesystem::path& path, const LabelMap& labels) {
  std::vector<std::uint8_t> bytes(labels.labels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (labels.labels[i] < 0 || labels.labels[i] > 255)
      throw ParameterError("label id out of 8-bit range");
    bytes[i] = static_cast<std::uint8_t>(labels.labels[i]);
  }
  write_file_bytes(path, encode_or_throw(bytes.data(), labels.width, labels.height, 1, 8));
}

Raster16 read_png16(const std::filesystem::path& path) {
  const DecodedPng d = decode_file(path, false);
  if (d.bit_depth != 16)
    throw FormatError(path.string() + ": expected 16-bit samples, found " +
                      std::to_string(d.bit_depth) + "-bit");
  Raster16 r{d.width, d.height, d.channels, {}};
  r.samples.resize(d.data.size() / 2);
  for (std::size_t i = 0; i < r.samples.size(); ++i)
    r.samples[i] = static_cast<std::uint16_t>((d.data[2 * i] << 8) | d.data[2 * i + 1]);
  return r;
}

void write_png16(const std::filesystem::path& path, const Raster16& raster) {
  if (raster.channels < 1 || raster.channels > 4 || raster.channels == 2)
    throw ParameterError("16-bit raster must have 1, 3 or 4 channels");
  std::vector<std::uint8_t> be(raster.samples.size() * 2);
  for (std::size_t i = 0; i < raster.samples.size(); ++i) {
    be[2 * i] = static_cast<std::uint8_t>(raster.samples[i] >> 8);
    be[2 * i + 1] = static_cast<std::uint8_t>(raster.samples[i] & 0xff);
  }
  write_file_bytes(path, encode_or_throw(be.data(), raster.width, raster.height, raster.channels, 16));
}

}  // namespace rainfx
