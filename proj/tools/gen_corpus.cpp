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

// Writes the bundled clean corpus: procedural road scenes (sky, facades,
// road with lane markings, poles, foliage and sensor noise).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "rainfx/image.hpp"
#include "rainfx/png_io.hpp"

namespace {

using rainfx::ImageBuffer;

struct Rgb {
  float r, g, b;
};

void put(ImageBuffer& img, int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
  img.at(x, y, 0) = c.r;
  img.at(x, y, 1) = c.g;
  img.at(x, y, 2) = c.b;
}

void fill_rect(ImageBuffer& img, int x0, int y0, int x1, int y1, Rgb c) {
  for (int y = std::max(0, y0); y < std::min(img.height(), y1); ++y)
    for (int x = std::max(0, x0); x < std::min(img.width(), x1); ++x) put(img, x, y, c);
}

// Smooth value noise on a coarse lattice.
class ValueNoise {
 public:
  ValueNoise(std::mt19937_64& rng, int cells) : cells_(cells), grid_((cells + 2) * (cells + 2)) {
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (auto& v : grid_) v = u(rng);
  }
  float at(float x, float y) const {
    x *= cells_;
    y *= cells_;
    const int x0 = std::clamp(static_cast<int>(x), 0, cells_);
    const int y0 = std::clamp(static_cast<int>(y), 0, cells_);
    float tx = x - x0, ty = y - y0;
    tx = tx * tx * (3 - 2 * tx);
    ty = ty * ty * (3 - 2 * ty);
    const auto g = [&](int i, int j) { return grid_[j * (cells_ + 2) + i]; };
    const float top = g(x0, y0) * (1 - tx) + g(x0 + 1, y0) * tx;
    const float bot = g(x0, y0 + 1) * (1 - tx) + g(x0 + 1, y0 + 1) * tx;
    return top * (1 - ty) + bot * ty;
  }

 private:
  int cells_;
  std::vector<float> grid_;
};

ImageBuffer make_scene(std::uint64_t seed, int w, int h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  ImageBuffer img(w, h, 3);
  const int horizon = static_cast<int>(h * (0.38f + 0.12f * u(rng)));

  ValueNoise clouds(rng, 6), grain(rng, 40), leaves(rng, 24);
  const Rgb sky_top{0.25f + 0.2f * u(rng), 0.45f + 0.2f * u(rng), 0.75f + 0.2f * u(rng)};
  for (int y = 0; y < horizon; ++y)
    for (int x = 0; x < w; ++x) {
      const float t = static_cast<float>(y) / horizon;
      const float c = 0.35f * clouds.at(static_cast<float>(x) / w, static_cast<float>(y) / h);
      put(img, x, y, {sky_top.r + (0.85f - sky_top.r) * t + c, sky_top.g + (0.88f - sky_top.g) * t + c,
                      sky_top.b + (0.9f - sky_top.b) * t + c * 0.8f});
    }

  // Facades along the horizon.
  int x = -static_cast<int>(20 * u(rng));
  while (x < w) {
    const int bw = 40 + static_cast<int>(90 * u(rng));
    const int bh = static_cast<int>(horizon * (0.3f + 0.65f * u(rng)));
    const float tone = 0.25f + 0.5f * u(rng);
    const Rgb wall{tone * (0.8f + 0.4f * u(rng)), tone * (0.8f + 0.3f * u(rng)), tone * (0.8f + 0.3f * u(rng))};
    fill_rect(img, x, horizon - bh, x + bw, horizon + 6, wall);
    const int win = 6 + static_cast<int>(6 * u(rng));
    for (int wy = horizon - bh + 6; wy < horizon - win; wy += win * 2)
      for (int wx = x + 5; wx < x + bw - win; wx += win * 2) {
        const float lit = u(rng) < 0.3f ? 0.85f : 0.12f;
        fill_rect(img, wx, wy, wx + win, wy + win, {lit, lit * 0.95f, lit * 0.7f});
      }
    x += bw + static_cast<int>(8 * u(rng));
  }

  // Road with perspective lane markings.
  const float vanish_x = w * (0.4f + 0.2f * u(rng));
  for (int y = horizon; y < h; ++y) {
    const float t = static_cast<float>(y - horizon) / (h - horizon);
    const float half = 0.05f * w + t * 0.75f * w;
    for (int xx = 0; xx < w; ++xx) {
      const float dx = xx - vanish_x;
      const float n = grain.at(static_cast<float>(xx) / w, static_cast<float>(y) / h);
      Rgb c;
      if (std::abs(dx) < half) {
        const float asphalt = 0.22f + 0.12f * n;
        c = {asphalt, asphalt, asphalt * 1.05f};
        const float lane = std::abs(std::abs(dx) / half - 0.5f);
        const bool dash = std::fmod((1.0f / (t + 0.05f)) * 3.0f, 2.0f) < 1.0f;
        if (lane < 0.02f + 0.01f * t && dash) c = {0.92f, 0.92f, 0.88f};
        if (std::abs(dx) / half > 0.96f) c = {0.9f, 0.85f, 0.3f};
      } else {
        const float l = leaves.at(static_cast<float>(xx) / w, static_cast<float>(y) / h);
        c = {0.18f + 0.2f * l, 0.35f + 0.3f * l, 0.12f + 0.1f * l};
      }
      put(img, xx, y, c);
    }
  }

  // Poles and a few vehicles as dark blobs.
  const int poles = 2 + static_cast<int>(4 * u(rng));
  for (int i = 0; i < poles; ++i) {
    const int px = static_cast<int>(w * u(rng));
    const int top = static_cast<int>(horizon * 0.3f * u(rng));
    fill_rect(img, px, top, px + 3 + static_cast<int>(3 * u(rng)), horizon + static_cast<int>((h - horizon) * 0.5f),
              {0.1f, 0.1f, 0.12f});
  }
  const int cars = 1 + static_cast<int>(3 * u(rng));
  for (int i = 0; i < cars; ++i) {
    const int cy = horizon + static_cast<int>((h - horizon) * (0.2f + 0.5f * u(rng)));
    const int cw = 30 + static_cast<int>(50 * u(rng));
    const int cx = static_cast<int>(vanish_x + (u(rng) - 0.5f) * w * 0.6f);
    const Rgb body{u(rng), u(rng), u(rng)};
    fill_rect(img, cx, cy, cx + cw, cy + cw / 2, body);
    fill_rect(img, cx + cw / 5, cy - cw / 4, cx + cw * 4 / 5, cy, {body.r * 0.5f, body.g * 0.5f, body.b * 0.6f});
  }

  std::normal_distribution<float> noise(0.0f, 0.015f);
  for (float& v : img.values()) v = std::clamp(v + noise(rng), 0.0f, 1.0f);
  return img;
}

}  // namespace

int main(int argc, char* argv[]) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "data/corpus";
  const int count = argc > 2 ? std::stoi(argv[2]) : 20;
  std::filesystem::create_directories(out);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scene_%02d.png", i);
    rainfx::write_png(out / name, make_scene(0x5eed0000ULL + i, 480, 360));
  }
  std::cout << "wrote " << count << " images to " << out.string() << '\n';
  return 0;
}
