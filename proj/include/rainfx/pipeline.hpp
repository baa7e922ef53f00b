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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rainfx/config.hpp"
#include "rainfx/dropfield.hpp"
#include "rainfx/metrics.hpp"

namespace rainfx {

namespace fs = std::filesystem;

inline constexpr int kManifestFormatVersion = 1;
inline constexpr const char* kToolkitVersion = RAINFX_VERSION;

/// Where the inputs live and how they are grouped.
///
/// Globs are matched against paths relative to `root` (`*` also crosses
/// directory separators). Label files pair with images by stem:
/// label stem == image stem + label_suffix. In sequence mode the frames of
/// each directory, in lexical order, share one evolving droplet field.
struct DatasetLayout {
  fs::path root;
  std::string image_glob = "*.png";
  std::optional<std::string> label_glob;
  std::string label_suffix;
  bool sequence = false;
};

struct FrameRecord {
  std::size_t index = 0;
  /// Sequence id (directory order) in sequence mode, else -1.
  int sequence = -1;
  /// Timestep within the sequence; 0 outside sequence mode.
  std::int64_t frame = 0;
  std::string input;
  std::string output;
  std::string mask;
  std::optional<std::string> label_input;
  std::optional<std::string> label_output;
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  std::vector<Droplet> droplets;
  std::string output_sha256;
  std::string mask_sha256;
  std::optional<std::string> error;
};

struct Manifest {
  std::string toolkit_version = kToolkitVersion;
  int format_version = kManifestFormatVersion;
  EffectiveConfig config;
  DatasetLayout layout;
  std::string config_hash;
  std::vector<FrameRecord> frames;

  [[nodiscard]] std::size_t error_count() const;
};

struct RunOptions {
  /// Worker threads; 0 reads RAINFX_THREADS, then falls back to the core count.
  int threads = 0;
};

int resolve_thread_count(int requested);

/// SHA-256 over the canonical JSON of everything that affects output bytes
/// (config plus layout grouping, not the root path).
std::string config_hash(const EffectiveConfig& cfg, const DatasetLayout& layout);

/// Seed of image `index` (or sequence `index`) derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct DatasetListing {
  std::vector<std::string> images;
  /// Parallel to `images` when labels are configured.
  std::vector<std::optional<std::string>> labels;
};

/// Lists and pairs the inputs. Throws DatasetError on unpaired labels or
/// duplicate stems, before anything is written.
DatasetListing discover_dataset(const DatasetLayout& layout, const fs::path& exclude = {});

/// Renders every image into out_root/{rainy,mask,labels} and writes
/// out_root/manifest.json last. Unreadable images are recorded per frame.
Manifest augment_dataset(const DatasetLayout& layout, const EffectiveConfig& cfg,
                         const fs::path& out_root, const RunOptions& options = {});

struct ReplayReport {
  bool config_hash_matched = true;
  std::size_t frames = 0;
  std::size_t verified = 0;
  std::vector<std::string> mismatched;
  std::vector<std::string> errors;
  /// Frames whose re-simulated droplets disagreed with the record and were
  /// rendered from the recorded states instead.
  std::size_t recorded_state_fallbacks = 0;

  [[nodiscard]] bool ok() const { return mismatched.empty() && errors.empty(); }
};

/// Regenerates every output of a manifest under out_root and checks the
/// recorded checksums. If the stored config no longer matches its hash the
/// edited config is rendered and checksums are not enforced.
ReplayReport replay(const Manifest& manifest, const fs::path& out_root, const RunOptions& options = {});

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const Manifest& m, const fs::path& path);
Manifest load_manifest(const fs::path& path);

struct CompareOptions {
  std::optional<fs::path> pred_masks;
  std::optional<fs::path> gt_masks;
  std::optional<fs::path> pred_labels;
  std::optional<fs::path> gt_labels;
  int n_classes = 0;
  int ignore_label = 255;
  RunOptions run;
};

struct PairMetrics {
  std::string key;
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::optional<SegStats> seg;
  std::optional<double> miou;
  std::optional<std::string> error;
};

struct CompareResult {
  std::vector<PairMetrics> pairs;
  /// PSNR/SSIM are means over pairs; segmentation and mIOU pool the
  /// confusion counts of all pairs.
  PairMetrics aggregate;
  std::vector<std::string> unpaired;

  [[nodiscard]] bool ok() const;
};

/// Pairs PNG files of two trees by relative path without extension.
CompareResult compare_datasets(const fs::path& dir_a, const fs::path& dir_b,
                               const CompareOptions& options = {});

std::string to_csv(const CompareResult& result);
nlohmann::json to_json(const CompareResult& result);

}  // namespace rainfx
