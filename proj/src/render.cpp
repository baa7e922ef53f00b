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

#include "rainfx/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>

#include "rainfx/errors.hpp"

namespace rainfx {
namespace {

constexpr int kTile = 32;

struct Footprint {
  double rx;
  double ry;
  double sx;  // image pixels per texture pixel
  double sy;
  double inv_sx;
  double inv_sy;
  double inv_support_x;
  double inv_support_y;
  double mean_radius;
  int x0, x1, y0, y1;  // clipped kernel support, inclusive
};

// Per-tile accumulators, one slot per pixel.
struct TileAccum {
  std::array<double, kTile * kTile> f, gx, gy, wr, wg, b, wrad;

  // Zeroes the tile-local rectangle [x0, x1) x [y0, y1).
  void clear(int x0, int x1, int y0, int y1) {
    for (auto* a : {&f, &gx, &gy, &wr, &wg, &b, &wrad})
      for (int y = y0; y < y1; ++y) std::fill_n(a->data() + y * kTile + x0, x1 - x0, 0.0);
  }
};

// Texture copy with a one-texel zero border, r/g/b interleaved, so bilinear
// taps need no bounds checks.
class PaddedTexture {
 public:
  explicit PaddedTexture(const ProtoDropTexture& tex) : w_(tex.width + 2), h_(tex.height + 2) {
    texels_.assign(static_cast<std::size_t>(w_) * h_ * 3, 0.0);
    for (int y = 0; y < tex.height; ++y)
      for (int x = 0; x < tex.width; ++x) {
        const std::size_t i = tex.index(x, y);
        double* t = &texels_[(static_cast<std::size_t>(y + 1) * w_ + x + 1) * 3];
        t[0] = tex.r[i];
        t[1] = tex.g[i];
        t[2] = tex.b[i];
      }
  }

  // Bilinear r/g/b lookup in unpadded texture coordinates, zero outside.
  void sample(double x, double y, double& r, double& g, double& b) const {
    // Every tap of a lookup outside [-1, size) lands on zero.
    if (!(x >= -1.0 && y >= -1.0 && x < w_ - 2 && y < h_ - 2)) {
      r = g = b = 0.0;
      return;
    }
    // floor() for x >= -1 without the libm call.
    const int ix = static_cast<int>(x) - (x < 0.0 && x != static_cast<int>(x));
    const int iy = static_cast<int>(y) - (y < 0.0 && y != static_cast<int>(y));
    const int x0 = ix + 1;
    const int y0 = iy + 1;
    const double tx = x - ix;
    const double ty = y - iy;
    const double w00 = (1.0 - tx) * (1.0 - ty), w10 = tx * (1.0 - ty);
    const double w01 = (1.0 - tx) * ty, w11 = tx * ty;
    const double* t00 = &texels_[(static_cast<std::size_t>(y0) * w_ + x0) * 3];
    const double* t01 = t00 + static_cast<std::size_t>(w_) * 3;
    r = w00 * t00[0] + w10 * t00[3] + w01 * t01[0] + w11 * t01[3];
    g = w00 * t00[1] + w10 * t00[4] + w01 * t01[1] + w11 * t01[4];
    b = w00 * t00[2] + w10 * t00[5] + w01 * t01[2] + w11 * t01[5];
  }

 private:
  int w_;
  int h_;
  std::vector<double> texels_;
};

void gaussian_blur_normalized(std::vector<float>& layer, const std::vector<float>& weight,
                              int width, int height, int channels, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));

  // Normalized convolution: blur(layer * w) / blur(w), so content outside
  // droplets never bleeds into the refracted layer.
  const int planes = channels + 1;
  std::vector<double> src(static_cast<std::size_t>(width) * height * planes);
  for (std::size_t p = 0; p < static_cast<std::size_t>(width) * height; ++p) {
    for (int c = 0; c < channels; ++c) src[p * planes + c] = layer[p * channels + c] * weight[p];
    src[p * planes + channels] = weight[p];
  }
  std::vector<double> tmp(src.size(), 0.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int i = -radius; i <= radius; ++i) {
        const int xi = std::clamp(x + i, 0, width - 1);
        const double w = k[i + radius];
        for (int c = 0; c < planes; ++c)
          tmp[(static_cast<std::size_t>(y) * width + x) * planes + c] +=
              w * src[(static_cast<std::size_t>(y) * width + xi) * planes + c];
      }
  std::fill(src.begin(), src.end(), 0.0);
  for (int y = 0; y < height; ++y)
    for (int i = -radius; i <= radius; ++i) {
      const int yi = std::clamp(y + i, 0, height - 1);
      const double w = k[i + radius];
      for (int x = 0; x < width; ++x)
        for (int c = 0; c < planes; ++c)
          src[(static_cast<std::size_t>(y) * width + x) * planes + c] +=
              w * tmp[(static_cast<std::size_t>(yi) * width + x) * planes + c];
    }
  for (std::size_t p = 0; p < static_cast<std::size_t>(width) * height; ++p) {
    if (weight[p] == 0.0f) continue;
    const double norm = src[p * planes + channels];
    for (int c = 0; c < channels; ++c)
      layer[p * channels + c] = static_cast<float>(src[p * planes + c] / norm);
  }
}

}  // namespace

CompositeMap CompositeMap::zeros(Dims dims) {
  if (dims.width <= 0 || dims.height <= 0) throw ParameterError("composite dimensions must be positive");
  CompositeMap m;
  m.width = dims.width;
  m.height = dims.height;
  const std::size_t n = dims.area();
  for (auto* c : {&m.r, &m.g, &m.b, &m.alpha, &m.edge}) *c = std::vector<double>(n);
  return m;
}

void CompositeMap::reset(Dims dims) {
  if (dims.width <= 0 || dims.height <= 0) throw ParameterError("composite dimensions must be positive");
  width = dims.width;
  height = dims.height;
  for (auto* c : {&r, &g, &b, &alpha, &edge}) c->assign(dims.area(), 0.0);
}

double smoothstep(double edge0, double edge1, double x) {
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

CompositeMap composite(std::span<const Droplet> droplets, const FieldConfig& config,
                       const ProtoDropTexture& proto, Dims dims) {
  CompositeMap out;
  composite_into(droplets, config, proto, dims, out);
  return out;
}

void composite_into(std::span<const Droplet> droplets, const FieldConfig& config,
                    const ProtoDropTexture& proto, Dims dims, CompositeMap& out) {
  out.reset(dims);
  if (droplets.empty()) return;

  const double ppm = config.pixels_per_mm;
  const double threshold = config.metaball_threshold;
  const double proto_radius = proto.params.radius_px;
  const double pcx = proto.center_x();
  const double pcy = proto.center_y();
  const PaddedTexture texture(proto);

  std::vector<Footprint> fp(droplets.size());
  const int tiles_x = (dims.width + kTile - 1) / kTile;
  const int tiles_y = (dims.height + kTile - 1) / kTile;
  std::vector<std::vector<std::uint32_t>> bins(static_cast<std::size_t>(tiles_x) * tiles_y);

  for (std::size_t i = 0; i < droplets.size(); ++i) {
    const Droplet& d = droplets[i];
    Footprint& p = fp[i];
    p.rx = d.radius_x(ppm);
    p.ry = d.radius_y(ppm);
    p.sx = p.rx / proto_radius;
    p.sy = p.ry / proto_radius;
    p.inv_sx = 1.0 / p.sx;
    p.inv_sy = 1.0 / p.sy;
    const double support_x = kKernelSupport * p.rx;
    const double support_y = kKernelSupport * p.ry;
    p.inv_support_x = 1.0 / support_x;
    p.inv_support_y = 1.0 / support_y;
    p.mean_radius = std::sqrt(p.rx * p.ry);
    const double x0 = std::max(0.0, std::ceil(d.u - support_x));
    const double x1 = std::min(dims.width - 1.0, std::floor(d.u + support_x));
    const double y0 = std::max(0.0, std::ceil(d.v - support_y));
    const double y1 = std::min(dims.height - 1.0, std::floor(d.v + support_y));
    if (x0 > x1 || y0 > y1) continue;
    p.x0 = static_cast<int>(x0);
    p.x1 = static_cast<int>(x1);
    p.y0 = static_cast<int>(y0);
    p.y1 = static_cast<int>(y1);
    for (int ty = p.y0 / kTile; ty <= p.y1 / kTile; ++ty)
      for (int tx = p.x0 / kTile; tx <= p.x1 / kTile; ++tx)
        bins[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(static_cast<std::uint32_t>(i));
  }

  auto acc = std::make_unique<TileAccum>();
  for (int ty = 0; ty < tiles_y; ++ty) {
    for (int tx = 0; tx < tiles_x; ++tx) {
      const auto& bin = bins[static_cast<std::size_t>(ty) * tiles_x + tx];
      if (bin.empty()) continue;
      const int bx = tx * kTile;
      const int by = ty * kTile;
      const int xe = std::min(dims.width, bx + kTile);
      const int ye = std::min(dims.height, by + kTile);
      // Only the union of the droplet boxes in this tile can be nonzero.
      int ux0 = xe, ux1 = bx, uy0 = ye, uy1 = by;
      for (const std::uint32_t i : bin) {
        ux0 = std::min(ux0, std::max(bx, fp[i].x0));
        ux1 = std::max(ux1, std::min(xe, fp[i].x1 + 1));
        uy0 = std::min(uy0, std::max(by, fp[i].y0));
        uy1 = std::max(uy1, std::min(ye, fp[i].y1 + 1));
      }
      acc->clear(ux0 - bx, ux1 - bx, uy0 - by, uy1 - by);
      // Droplets in index order, so every pixel sums its terms in the same
      // order as a plain per-pixel loop would.
      for (const std::uint32_t i : bin) {
        const Droplet& d = droplets[i];
        const Footprint& p = fp[i];
        const int ya = std::max(by, p.y0), yb = std::min(ye - 1, p.y1);
        const int xa = std::max(bx, p.x0), xb = std::min(xe - 1, p.x1);
        for (int y = ya; y <= yb; ++y) {
          const double ny = (y - d.v) * p.inv_support_y;
          const double ny2 = ny * ny;
          if (ny2 >= 1.0) continue;
          const double tex_y = pcy + (y - d.v) * p.inv_sy;
          const double gy_scale = -4.0 * ny * p.inv_support_y;
          for (int x = xa; x <= xb; ++x) {
            const double nx = (x - d.u) * p.inv_support_x;
            const double r2 = nx * nx + ny2;
            if (r2 >= 1.0) continue;
            const double t = 1.0 - r2;
            const double w = t * t;
            double sr, sg, sb;
            texture.sample(pcx + (x - d.u) * p.inv_sx, tex_y, sr, sg, sb);
            const std::size_t k = static_cast<std::size_t>(y - by) * kTile + (x - bx);
            acc->f[k] += w;
            acc->gx[k] += -4.0 * t * nx * p.inv_support_x;
            acc->gy[k] += t * gy_scale;
            // Offsets scale with the instance so larger drops displace further.
            acc->wr[k] += w * sr * p.sx;
            acc->wg[k] += w * sg * p.sy;
            acc->b[k] += sb;
            acc->wrad[k] += w * p.mean_radius;
          }
        }
      }
      for (int y = uy0; y < uy1; ++y) {
        for (int x = ux0; x < ux1; ++x) {
          const std::size_t k = static_cast<std::size_t>(y - by) * kTile + (x - bx);
          const double f = acc->f[k];
          if (!(f >= threshold)) continue;
          const double grad = std::sqrt(acc->gx[k] * acc->gx[k] + acc->gy[k] * acc->gy[k]);
          const double inside = grad > 0.0 ? (f - threshold) / grad
                                           : std::numeric_limits<double>::infinity();
          const std::size_t idx = out.index(x, y);
          out.alpha[idx] = smoothstep(-0.5, 0.5, inside);
          out.r[idx] = acc->wr[k] / f;
          out.g[idx] = acc->wg[k] / f;
          out.b[idx] = std::min(1.0, acc->b[k]);
          out.edge[idx] = inside / (acc->wrad[k] / f);
        }
      }
    }
  }
}

CompositeMap composite(const DropField& field, const ProtoDropTexture& proto, Dims dims) {
  return composite(field.droplets(), field.config(), proto, dims);
}

double sample_clamped(const ImageBuffer& img, double x, double y, int channel) {
  const double cx = std::clamp(x, 0.0, img.width() - 1.0);
  const double cy = std::clamp(y, 0.0, img.height() - 1.0);
  const int x0 = static_cast<int>(cx);
  const int y0 = static_cast<int>(cy);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double tx = cx - x0;
  const double ty = cy - y0;
  const double top = (1.0 - tx) * img.at(x0, y0, channel) + tx * img.at(x1, y0, channel);
  const double bot = (1.0 - tx) * img.at(x0, y1, channel) + tx * img.at(x1, y1, channel);
  return (1.0 - ty) * top + ty * bot;
}

ImageBuffer apply_rain(const ImageBuffer& img, const CompositeMap& comp, const RenderOptions& options) {
  ImageBuffer out;
  apply_rain_into(img, comp, options, out);
  return out;
}

void apply_rain_into(const ImageBuffer& img, const CompositeMap& comp, const RenderOptions& options,
                     ImageBuffer& out) {
  if (img.dims() != comp.dims()) throw ParameterError("composite and image dimensions differ");
  if (!(options.defocus_sigma >= 0.0)) throw ParameterError("defocus sigma must be non-negative");
  if (&out == &img) throw ParameterError("apply_rain_into cannot render in place");

  out = img;
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();

  std::vector<float> layer;
  std::vector<float> covered;
  const bool defocus = options.defocus_sigma > 0.0;
  if (defocus) {
    layer.assign(static_cast<std::size_t>(w) * h * ch, 0.0f);
    covered.assign(static_cast<std::size_t>(w) * h, 0.0f);
  }

  // Bilinear clamp-to-edge lookup of all channels at the refracted position.
  const auto refract = [&](int x, int y, std::size_t idx, double* px) {
    const double xr = std::clamp(x + comp.r[idx] * comp.b[idx], 0.0, w - 1.0);
    const double yr = std::clamp(y + comp.g[idx] * comp.b[idx], 0.0, h - 1.0);
    const int x0 = static_cast<int>(xr);
    const int y0 = static_cast<int>(yr);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double tx = xr - x0;
    const double ty = yr - y0;
    for (int c = 0; c < ch; ++c) {
      const double top = (1.0 - tx) * img.at(x0, y0, c) + tx * img.at(x1, y0, c);
      const double bot = (1.0 - tx) * img.at(x0, y1, c) + tx * img.at(x1, y1, c);
      px[c] = (1.0 - ty) * top + ty * bot;
    }
  };

  if (defocus) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t idx = comp.index(x, y);
        if (comp.alpha[idx] <= 0.0) continue;
        covered[idx] = 1.0f;
        double px[3];
        refract(x, y, idx, px);
        for (int c = 0; c < ch; ++c) layer[idx * ch + c] = static_cast<float>(px[c]);
      }
    gaussian_blur_normalized(layer, covered, w, h, ch, options.defocus_sigma);
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = comp.index(x, y);
      const double a = comp.alpha[idx];
      if (a <= 0.0) continue;
      const double shade =
          options.dark_band && comp.edge[idx] < options.dark_band_width ? options.dark_band_gain : 1.0;
      double px[3];
      if (defocus) {
        for (int c = 0; c < ch; ++c) px[c] = layer[idx * ch + c];
      } else {
        refract(x, y, idx, px);
      }
      for (int c = 0; c < ch; ++c) {
        const double src = px[c];
        const double v = a * shade * src + (1.0 - a) * img.at(x, y, c);
        out.at(x, y, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
}

ImageBuffer droplet_mask(const CompositeMap& comp) {
  ImageBuffer mask(comp.width, comp.height, 1);
  for (std::size_t i = 0; i < comp.alpha.size(); ++i)
    if (comp.alpha[i] > 0.0) mask.values()[i] = 1.0f;
  return mask;
}

}  // namespace rainfx
