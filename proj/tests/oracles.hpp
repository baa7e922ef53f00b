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

// Brute-force reference computations. These deliberately avoid the library's
// code paths (no separable filters, no tiling, no shared helpers) so they can
// check the implementation independently.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rainfx/dropfield.hpp"
#include "rainfx/image.hpp"
#include "rainfx/protodrop.hpp"

namespace rainfx::oracle {

/// Horizontal offset of a spherical cap texture straight from the height
/// field gradient: R = gain * (-dh/dx) = gain * x / sqrt(Rs^2 - rho^2).
inline double cap_offset_x(double x, double y, double radius, double cap_ratio, double gain) {
  const double h0 = cap_ratio * radius;
  // Rs from sqrt(Rs^2 - a^2) = Rs - h0.
  const double rs = (radius * radius + h0 * h0) / (2.0 * h0);
  const double rho2 = x * x + y * y;
  if (rho2 >= radius * radius) return 0.0;
  return gain * x / std::sqrt(rs * rs - rho2);
}

inline double cap_height(double x, double y, double radius, double cap_ratio) {
  const double h0 = cap_ratio * radius;
  const double rs = (radius * radius + h0 * h0) / (2.0 * h0);
  const double rho2 = x * x + y * y;
  if (rho2 >= radius * radius) return 0.0;
  return std::sqrt(rs * rs - rho2) - (rs - h0);
}

inline double kernel(const Droplet& d, double ppm, double u, double v) {
  const double ax = 1.5 * d.diameter_mm * ppm / 2.0 * d.scale_x;
  const double ay = 1.5 * d.diameter_mm * ppm / 2.0 * d.scale_y;
  const double r2 = ((u - d.u) / ax) * ((u - d.u) / ax) + ((v - d.v) / ay) * ((v - d.v) / ay);
  return r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) : 0.0;
}

inline double field(const std::vector<Droplet>& drops, double ppm, double u, double v) {
  double f = 0.0;
  for (const auto& d : drops) f += kernel(d, ppm, u, v);
  return f;
}

/// Texture channel lookup with zero outside, written out tap by tap.
inline double tex_lookup(const std::vector<double>& chan, int w, int h, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  double acc = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      const int xi = x0 + i, yi = y0 + j;
      if (xi < 0 || yi < 0 || xi >= w || yi >= h) continue;
      const double wgt = (i ? fx : 1.0 - fx) * (j ? fy : 1.0 - fy);
      acc += wgt * chan[static_cast<std::size_t>(yi) * w + xi];
    }
  return acc;
}

struct CompositePixel {
  double r = 0, g = 0, b = 0;
  bool covered = false;
};

/// Per-pixel composite straight from the definition: weights are kernel
/// values, offsets are weight-averaged and scaled per axis, thickness is a
/// clamped sum, coverage is field >= threshold.
inline std::vector<CompositePixel> composite(const std::vector<Droplet>& drops, const FieldConfig& cfg,
                                             const ProtoDropTexture& tex, int w, int h) {
  std::vector<CompositePixel> out(static_cast<std::size_t>(w) * h);
  const double ppm = cfg.pixels_per_mm;
  const double tc_x = (tex.width - 1) / 2.0, tc_y = (tex.height - 1) / 2.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double f = 0, wr = 0, wg = 0, bs = 0;
      for (const auto& d : drops) {
        const double k = kernel(d, ppm, x, y);
        if (k == 0.0) continue;
        const double sx = d.diameter_mm * ppm / 2.0 * d.scale_x / tex.params.radius_px;
        const double sy = d.diameter_mm * ppm / 2.0 * d.scale_y / tex.params.radius_px;
        const double tx = tc_x + (x - d.u) / sx;
        const double ty = tc_y + (y - d.v) / sy;
        f += k;
        wr += k * tex_lookup(tex.r, tex.width, tex.height, tx, ty) * sx;
        wg += k * tex_lookup(tex.g, tex.width, tex.height, tx, ty) * sy;
        bs += tex_lookup(tex.b, tex.width, tex.height, tx, ty);
      }
      CompositePixel& p = out[static_cast<std::size_t>(y) * w + x];
      if (f >= cfg.metaball_threshold) {
        p.covered = true;
        p.r = wr / f;
        p.g = wg / f;
        p.b = bs > 1.0 ? 1.0 : bs;
      }
    }
  return out;
}

inline double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  double se = 0.0;
  long n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      for (int c = 0; c < a.channels(); ++c) {
        const double d = static_cast<double>(a.at(x, y, c)) - static_cast<double>(b.at(x, y, c));
        se += d * d;
        ++n;
      }
  if (se == 0.0) return INFINITY;
  return 10.0 * std::log10(1.0 / (se / n));
}

inline double luma_at(const ImageBuffer& img, int x, int y) {
  if (img.channels() == 1) return img.at(x, y, 0);
  return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

/// Windowed SSIM evaluated window by window with an explicit 2-D Gaussian.
inline double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  const int n = 11;
  const double sigma = 1.5;
  double wsum = 0.0;
  std::vector<double> w(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double dx = i - 5, dy = j - 5;
      w[j * n + i] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      wsum += w[j * n + i];
    }
  for (double& v : w) v /= wsum;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  int windows = 0;
  for (int oy = 0; oy + n <= a.height(); ++oy)
    for (int ox = 0; ox + n <= a.width(); ++ox) {
      double mx = 0, my = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          mx += w[j * n + i] * luma_at(a, ox + i, oy + j);
          my += w[j * n + i] * luma_at(b, ox + i, oy + j);
        }
      double vx = 0, vy = 0, cov = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double dx = luma_at(a, ox + i, oy + j) - mx;
          const double dy = luma_at(b, ox + i, oy + j) - my;
          vx += w[j * n + i] * dx * dx;
          vy += w[j * n + i] * dy * dy;
          cov += w[j * n + i] * dx * dy;
        }
      total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  return total / windows;
}

struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Confusion confusion(const ImageBuffer& pred, const ImageBuffer& gt) {
  Confusion c;
  for (int y = 0; y < gt.height(); ++y)
    for (int x = 0; x < gt.width(); ++x) {
      const int p = pred.at(x, y) >= 0.5f, g = gt.at(x, y) >= 0.5f;
      c.tp += p & g;
      c.fp += p & !g;
      c.fn += !p & g;
      c.tn += !p & !g;
    }
  return c;
}

/// mIOU by scanning the maps once per class.
inline double miou(const LabelMap& pred, const LabelMap& gt, int n_classes, int ignore) {
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < n_classes; ++c) {
    long inter = 0, uni = 0, in_gt = 0;
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
      if (gt.labels[i] == ignore) continue;
      const bool g = gt.labels[i] == c, p = pred.labels[i] == c;
      in_gt += g;
      inter += g && p;
      uni += g || p;
    }
    if (in_gt == 0) continue;
    sum += static_cast<double>(inter) / uni;
    ++present;
  }
  return present ? sum / present : 0.0;
}

}  // namespace rainfx::oracle
