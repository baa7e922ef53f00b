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

#include <doctest.h>

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "rainfx/errors.hpp"
#include "rainfx/png_io.hpp"
#include "rainfx/protodrop.hpp"
#include "test_util.hpp"

using namespace rainfx;

namespace {

ProtoDropParams hemisphere(double radius = 32.0, int resolution = 65) {
  ProtoDropParams p;
  p.radius_px = radius;
  p.cap_ratio = 1.0;
  p.refraction_gain = 10.0;
  p.resolution = resolution;
  return p;
}

}  // namespace

TEST_CASE("apex of a symmetric cap has zero offset and unit thickness") {
  for (double cap : {0.3, 0.7, 1.0}) {
    ProtoDropParams p = hemisphere();
    p.cap_ratio = cap;
    const auto tex = generate_protodrop(p);
    const std::size_t c = tex.index(32, 32);
    CHECK(tex.r[c] == 0.0);
    CHECK(tex.g[c] == 0.0);
    CHECK(tex.b[c] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tex.alpha[c] == 1.0);
  }
}

TEST_CASE("hemisphere tilts outward on the +x axis") {
  const auto tex = generate_protodrop(hemisphere());
  // rho = radius / 2 on the +x axis.
  const std::size_t i = tex.index(32 + 16, 32);
  CHECK(tex.g[i] == 0.0);
  CHECK(tex.r[i] > 0.0);
}

TEST_CASE("r channel matches the height-field gradient pixel by pixel") {
  for (double cap : {0.4, 1.0}) {
    ProtoDropParams p = hemisphere(32.0, 64);
    p.cap_ratio = cap;
    p.refraction_gain = 7.5;
    const auto tex = generate_protodrop(p);
    const double c = (tex.width - 1) / 2.0;
    double worst = 0.0;
    for (int y = 0; y < tex.height; ++y)
      for (int x = 0; x < tex.width; ++x) {
        const double expect = oracle::cap_offset_x(x - c, y - c, 32.0, cap, 7.5);
        worst = std::max(worst, std::abs(tex.r[tex.index(x, y)] - expect));
      }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("thickness follows the cap profile and is radially non-increasing") {
  ProtoDropParams p = hemisphere();
  p.cap_ratio = 0.5;
  const auto tex = generate_protodrop(p);
  const double h0 = oracle::cap_height(0, 0, 32.0, 0.5);
  for (int x = 32; x < 64; ++x) {
    const double expect = oracle::cap_height(x - 32.0, 0, 32.0, 0.5) / h0;
    CHECK(tex.b[tex.index(x, 32)] == doctest::Approx(expect).epsilon(1e-12));
    if (x > 32) CHECK(tex.b[tex.index(x, 32)] <= tex.b[tex.index(x - 1, 32)]);
  }
  // Along a diagonal as well.
  for (int k = 1; k < 23; ++k) CHECK(tex.b[tex.index(32 + k, 32 + k)] <= tex.b[tex.index(31 + k, 31 + k)]);
}

TEST_CASE("coverage is exactly the footprint disk and zero coverage means identity") {
  const auto tex = generate_protodrop(hemisphere(20.5, 48));
  const double c = tex.center_x();
  for (int y = 0; y < tex.height; ++y)
    for (int x = 0; x < tex.width; ++x) {
      const std::size_t i = tex.index(x, y);
      const bool inside = std::hypot(x - c, y - c) < 20.5;
      CHECK((tex.alpha[i] > 0.0) == inside);
      if (tex.alpha[i] == 0.0) {
        CHECK(tex.r[i] == 0.0);
        CHECK(tex.g[i] == 0.0);
        CHECK(tex.b[i] == 0.0);
      }
    }
}

TEST_CASE("offsets are antisymmetric about the center lines") {
  for (int res : {64, 65}) {
    ProtoDropParams p = hemisphere(30.0, res);
    p.cap_ratio = 0.6;
    const auto tex = generate_protodrop(p);
    const auto q = quantize_texture(tex);
    const double step = std::ldexp(1.0, offset_step_log2(tex));
    const int w = tex.width, h = tex.height;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        CHECK(tex.r[tex.index(x, y)] == -tex.r[tex.index(w - 1 - x, y)]);
        CHECK(tex.g[tex.index(x, y)] == -tex.g[tex.index(x, h - 1 - y)]);
        CHECK(std::abs(q.r[q.index(x, y)] + q.r[q.index(w - 1 - x, y)]) <= step);
      }
  }
}

TEST_CASE("invalid parameters are rejected") {
  ProtoDropParams p = hemisphere();
  p.radius_px = 0.0;
  CHECK_THROWS_AS(generate_protodrop(p), ParameterError);
  p = hemisphere();
  p.radius_px = -3.0;
  CHECK_THROWS_AS(generate_protodrop(p), ParameterError);
  p = hemisphere(32.0, 63);
  CHECK_THROWS_AS(generate_protodrop(p), ParameterError);
  p = hemisphere();
  p.cap_ratio = 0.0;
  CHECK_THROWS_AS(generate_protodrop(p), ParameterError);
  p.cap_ratio = 1.5;
  CHECK_THROWS_AS(generate_protodrop(p), ParameterError);
}

TEST_CASE("save/load reproduces the texture at the declared precision") {
  testing::TempDir dir("protodrop");
  for (double gain : {1.0, 48.0, -12.0}) {
    ProtoDropParams p = hemisphere();
    p.cap_ratio = 0.7;
    p.refraction_gain = gain;
    const auto tex = generate_protodrop(p);
    const auto path = dir / "drop.png";
    save_texture(tex, path);
    const auto loaded = load_texture(path);
    REQUIRE(loaded.width == tex.width);
    CHECK(loaded.params == tex.params);

    const double half_step = std::ldexp(0.5, offset_step_log2(tex));
    for (std::size_t i = 0; i < tex.r.size(); ++i) {
      CHECK(std::abs(loaded.r[i] - tex.r[i]) <= half_step);
      CHECK(std::abs(loaded.g[i] - tex.g[i]) <= half_step);
      CHECK(std::abs(loaded.b[i] - tex.b[i]) <= 0.5 / 65535.0 + 1e-15);
      CHECK(std::abs(loaded.alpha[i] - tex.alpha[i]) <= 0.5 / 65535.0 + 1e-15);
    }
    // What comes back equals the documented quantization, and is a fixed point.
    const auto q = quantize_texture(tex);
    CHECK(loaded.r == q.r);
    CHECK(loaded.g == q.g);
    CHECK(loaded.b == q.b);
    CHECK(loaded.alpha == q.alpha);
    save_texture(loaded, dir / "again.png");
    CHECK(read_file_bytes(dir / "again.png") == read_file_bytes(path));
  }
}

TEST_CASE("offset midpoint encodes zero") {
  testing::TempDir dir("protodrop_mid");
  const auto tex = generate_protodrop(hemisphere());
  save_texture(tex, dir / "t.png");
  const Raster16 raw = read_png16(dir / "t.png");
  REQUIRE(raw.channels == 4);
  const std::size_t corner = 0;
  CHECK(raw.samples[corner * 4 + 0] == 32768);
  CHECK(raw.samples[corner * 4 + 1] == 32768);
  CHECK(raw.samples[corner * 4 + 2] == 0);
  CHECK(raw.samples[corner * 4 + 3] == 0);
  const std::size_t apex = tex.index(32, 32);
  CHECK(raw.samples[apex * 4 + 0] == 32768);
  CHECK(raw.samples[apex * 4 + 2] == 65535);
}

TEST_CASE("zero-coverage texture round-trips to all zeros") {
  testing::TempDir dir("protodrop_zero");
  ProtoDropTexture tex;
  tex.width = tex.height = 16;
  tex.params = hemisphere(8.0, 16);
  tex.r.assign(256, 0.0);
  tex.g.assign(256, 0.0);
  tex.b.assign(256, 0.0);
  tex.alpha.assign(256, 0.0);
  save_texture(tex, dir / "z.png");
  const auto loaded = load_texture(dir / "z.png");
  for (std::size_t i = 0; i < 256; ++i) {
    CHECK(loaded.r[i] == 0.0);
    CHECK(loaded.g[i] == 0.0);
    CHECK(loaded.b[i] == 0.0);
    CHECK(loaded.alpha[i] == 0.0);
  }
}

TEST_CASE("loading rejects wrong channel counts and broken files") {
  testing::TempDir dir("protodrop_bad");
  Raster16 rgb{8, 8, 3, std::vector<std::uint16_t>(8 * 8 * 3, 100)};
  write_png16(dir / "rgb.png", rgb);
  {
    std::ofstream meta(sidecar_path(dir / "rgb.png"));
    meta << R"({"format":"rainfx-protodrop"})";
  }
  CHECK_THROWS_AS(load_texture(dir / "rgb.png"), FormatError);

  // 8-bit RGBA is not a texture file either.
  ImageBuffer img(8, 8, 3, 0.5f);
  write_png(dir / "eight.png", img);
  CHECK_THROWS_AS(load_texture(dir / "eight.png"), FormatError);

  {
    std::ofstream junk(dir / "junk.png", std::ios::binary);
    junk << "not a png at all";
  }
  CHECK_THROWS_AS(load_texture(dir / "junk.png"), FormatError);
  CHECK_THROWS_AS(load_texture(dir / "missing.png"), IoError);

  const auto tex = generate_protodrop(hemisphere());
  save_texture(tex, dir / "ok.png");
  std::filesystem::remove(sidecar_path(dir / "ok.png"));
  CHECK_THROWS_AS(load_texture(dir / "ok.png"), IoError);
}

TEST_CASE("sidecar records the optical parameters") {
  testing::TempDir dir("protodrop_meta");
  ProtoDropParams p = hemisphere();
  p.cap_ratio = 0.55;
  p.refraction_gain = 21.0;
  save_texture(generate_protodrop(p), dir / "t.png");
  std::ifstream in(sidecar_path(dir / "t.png"));
  const auto j = nlohmann::json::parse(in);
  CHECK(j.at("cap_ratio").get<double>() == 0.55);
  CHECK(j.at("refraction_gain").get<double>() == 21.0);
  CHECK(j.at("offset_midpoint").get<int>() == 32768);
}

TEST_CASE("bilinear texture lookup is exact on pixel centers and zero outside") {
  const auto tex = generate_protodrop(hemisphere());
  const auto s = tex.sample(40.0, 30.0);
  CHECK(s.r == tex.r[tex.index(40, 30)]);
  CHECK(s.b == tex.b[tex.index(40, 30)]);
  const auto far = tex.sample(-5.0, 100.0);
  CHECK(far.r == 0.0);
  CHECK(far.alpha == 0.0);
  const auto mid = tex.sample(40.5, 30.0);
  CHECK(mid.r == doctest::Approx(0.5 * (tex.r[tex.index(40, 30)] + tex.r[tex.index(41, 30)])));
}
