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

#include "rainfx/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rainfx/errors.hpp"

namespace rainfx {
namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels())
    throw ParameterError("image dimensions or channel counts differ");
}

std::vector<double> luma_plane(const ImageBuffer& img) {
  const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<double> out(n);
  const auto v = img.values();
  if (img.channels() == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = v[i];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = 0.299 * v[3 * i] + 0.587 * v[3 * i + 1] + 0.114 * v[3 * i + 2];
  }
  return out;
}

// Valid-mode separable filter of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

SegStats SegStats::from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t tn) {
  SegStats s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.tn = tn;
  s.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  s.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  s.f1 = safe_ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  s.iou = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp + fn));
  return s;
}

double mse(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  const auto va = a.values();
  const auto vb = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = static_cast<double>(va[i]) - vb[i];
    sum += d * d;
  }
  return sum / static_cast<double>(va.size());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b, double peak) {
  if (!(peak > 0.0)) throw ParameterError("PSNR peak must be positive");
  const double e = mse(a, b);
  if (e == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(peak * peak / e);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params) {
  require_same_shape(a, b);
  const int w = a.width();
  const int h = a.height();
  if (w < params.window || h < params.window)
    throw ParameterError("image smaller than the " + std::to_string(params.window) + "px SSIM window");

  std::vector<double> k(params.window);
  const int half = params.window / 2;
  double ksum = 0.0;
  for (int i = 0; i < params.window; ++i) {
    const double d = i - half;
    k[i] = std::exp(-d * d / (2.0 * params.sigma * params.sigma));
    ksum += k[i];
  }
  for (double& v : k) v /= ksum;

  const std::vector<double> x = luma_plane(a);
  const std::vector<double> y = luma_plane(b);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, w, h, k);
  const auto my = filter_valid(y, w, h, k);
  const auto sxx = filter_valid(xx, w, h, k);
  const auto syy = filter_valid(yy, w, h, k);
  const auto sxy = filter_valid(xy, w, h, k);

  const double c1 = (params.k1 * params.range) * (params.k1 * params.range);
  const double c2 = (params.k2 * params.range) * (params.k2 * params.range);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

MetricsReport image_quality(const ImageBuffer& a, const ImageBuffer& b) {
  return {psnr(a, b), ssim(a, b)};
}

SegStats binary_seg_stats(const ImageBuffer& pred, const ImageBuffer& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw ParameterError("mask dimensions differ");
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (int y = 0; y < gt.height(); ++y)
    for (int x = 0; x < gt.width(); ++x) {
      const bool p = pred.at(x, y, 0) >= 0.5f;
      const bool g = gt.at(x, y, 0) >= 0.5f;
      if (p && g) ++tp;
      else if (p) ++fp;
      else if (g) ++fn;
      else ++tn;
    }
  return SegStats::from_counts(tp, fp, fn, tn);
}

ClassCounts multiclass_counts(const LabelMap& pred, const LabelMap& gt, int n_classes, int ignore_label) {
  if (pred.width != gt.width || pred.height != gt.height || pred.labels.size() != gt.labels.size())
    throw ParameterError("label map dimensions differ");
  if (n_classes <= 0) throw ParameterError("n_classes must be positive");
  const auto n = static_cast<std::size_t>(n_classes);
  ClassCounts cc{std::vector<std::int64_t>(n, 0), std::vector<std::int64_t>(n, 0),
                 std::vector<std::int64_t>(n, 0), std::vector<std::int64_t>(n, 0)};
  const auto check = [&](std::int32_t l) {
    if (l != ignore_label && (l < 0 || l >= n_classes))
      throw ParameterError("label " + std::to_string(l) + " outside [0, " + std::to_string(n_classes) + ")");
  };
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const std::int32_t g = gt.labels[i];
    const std::int32_t p = pred.labels[i];
    check(g);
    check(p);
    if (g == ignore_label) continue;
    ++cc.present[g];
    if (p == g) {
      ++cc.tp[g];
    } else {
      ++cc.fn[g];
      if (p != ignore_label) ++cc.fp[p];
    }
  }
  return cc;
}

void ClassCounts::add(const ClassCounts& other) {
  if (tp.empty()) {
    *this = other;
    return;
  }
  if (other.tp.size() != tp.size()) throw ParameterError("class counts of different sizes");
  for (std::size_t c = 0; c < tp.size(); ++c) {
    tp[c] += other.tp[c];
    fp[c] += other.fp[c];
    fn[c] += other.fn[c];
    present[c] += other.present[c];
  }
}

double ClassCounts::miou() const {
  double sum = 0.0;
  int counted = 0;
  for (std::size_t c = 0; c < tp.size(); ++c) {
    if (present[c] == 0) continue;
    sum += static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c] + fn[c]);
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / counted;
}

double multiclass_miou(const LabelMap& pred, const LabelMap& gt, int n_classes, int ignore_label) {
  return multiclass_counts(pred, gt, n_classes, ignore_label).miou();
}

}  // namespace rainfx
