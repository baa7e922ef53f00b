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
#include <limits>
#include <vector>

#include "rainfx/image.hpp"

namespace rainfx {

struct MetricsReport {
  /// +infinity when the images are identical.
  double psnr_db = 0.0;
  double ssim = 0.0;
};

/// Confusion counts of a binary segmentation and the ratios derived from them.
/// Every ratio whose denominator is zero is reported as 0.
struct SegStats {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou = 0.0;

  static SegStats from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t tn);
};

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  /// Dynamic range of the normalized data.
  double range = 1.0;
};

double mse(const ImageBuffer& a, const ImageBuffer& b);
double psnr(const ImageBuffer& a, const ImageBuffer& b, double peak = 1.0);

/// Mean single-scale SSIM over all window placements fully inside the image.
/// 3-channel inputs are compared on luma.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params = {});

MetricsReport image_quality(const ImageBuffer& a, const ImageBuffer& b);

/// Masks count a pixel as positive when its first channel is >= 0.5.
SegStats binary_seg_stats(const ImageBuffer& pred, const ImageBuffer& gt);

/// Per-class confusion counts, poolable across images.
struct ClassCounts {
  std::vector<std::int64_t> tp;
  std::vector<std::int64_t> fp;
  std::vector<std::int64_t> fn;
  /// Non-ignored ground-truth pixels of each class.
  std::vector<std::int64_t> present;

  void add(const ClassCounts& other);
  [[nodiscard]] double miou() const;
};

/// A prediction of `ignore_label` on a valid pixel counts as a miss only.
ClassCounts multiclass_counts(const LabelMap& pred, const LabelMap& gt, int n_classes, int ignore_label);

/// Mean IOU over the classes that occur in `gt`; pixels labelled
/// `ignore_label` in gt are excluded from every count.
double multiclass_miou(const LabelMap& pred, const LabelMap& gt, int n_classes, int ignore_label);

}  // namespace rainfx
