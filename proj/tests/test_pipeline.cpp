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
#include <random>

#include "rainfx/errors.hpp"
#include "rainfx/hash.hpp"
#include "rainfx/pipeline.hpp"
#include "rainfx/png_io.hpp"
#include "test_util.hpp"

using namespace rainfx;
using rainfx::testing::TempDir;

namespace {

void write_images(const fs::path& dir, int count, std::uint64_t seed, int w = 96, int h = 72,
                  const std::string& prefix = "img_") {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%s%03d.png", prefix.c_str(), i);
    write_png(dir / name, testing::random_scene(rng, w, h, 3));
  }
}

EffectiveConfig busy_config(std::uint64_t seed = 42) {
  EffectiveConfig cfg;
  cfg.field.seed = seed;
  cfg.field.spawn_probability = 2e-3;
  cfg.field.pixels_per_mm = 3.0;
  return cfg;
}

std::map<std::string, std::vector<std::uint8_t>> tree_bytes(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      out[e.path().lexically_relative(root).generic_string()] = read_file_bytes(e.path());
  return out;
}

}  // namespace

TEST_CASE("zero spawn probability is an identity pipeline") {
  TempDir tmp("pipe_identity");
  write_images(tmp / "in", 6, 1);
  EffectiveConfig cfg;
  cfg.field.spawn_probability = 0.0;
  const Manifest m = augment_dataset({tmp / "in"}, cfg, tmp / "out", {2});
  REQUIRE(m.frames.size() == 6);
  CHECK(m.error_count() == 0);
  for (const FrameRecord& f : m.frames) {
    CHECK(f.droplets.empty());
    // Inputs were written by the same encoder, so the bytes match too.
    CHECK(read_file_bytes(tmp / "out" / "rainy" / f.output) == read_file_bytes(tmp / "in" / f.input));
    const ImageBuffer mask = read_png(tmp / "out" / "mask" / f.mask);
    for (float v : mask.values()) CHECK(v == 0.0f);
  }
  CHECK(fs::exists(tmp / "out" / "manifest.json"));
}

TEST_CASE("augmentation is deterministic and independent of thread count") {
  TempDir tmp("pipe_det");
  write_images(tmp / "in", 8, 2);
  const EffectiveConfig cfg = busy_config();
  const Manifest a = augment_dataset({tmp / "in"}, cfg, tmp / "a", {1});
  const Manifest b = augment_dataset({tmp / "in"}, cfg, tmp / "b", {4});
  CHECK(a.config_hash == b.config_hash);
  CHECK(tree_bytes(tmp / "a") == tree_bytes(tmp / "b"));
  CHECK(read_file_bytes(tmp / "a" / "manifest.json") == read_file_bytes(tmp / "b" / "manifest.json"));
  std::size_t drops = 0;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    CHECK(a.frames[i].seed == derive_seed(cfg.field.seed, i));
    CHECK(a.frames[i].output_sha256 == b.frames[i].output_sha256);
    drops += a.frames[i].droplets.size();
  }
  CHECK(drops > 0);

  EffectiveConfig other = cfg;
  other.field.seed = 43;
  const Manifest c = augment_dataset({tmp / "in"}, other, tmp / "c", {2});
  CHECK(c.config_hash != a.config_hash);
  CHECK(c.frames[0].output_sha256 != a.frames[0].output_sha256);
}

TEST_CASE("outputs keep dimensions and channels, pixels outside the mask are untouched") {
  TempDir tmp("pipe_dims");
  fs::create_directories(tmp / "in");
  std::mt19937_64 rng(5);
  write_png(tmp / "in" / "gray.png", testing::random_image(rng, 50, 40, 1));
  write_png(tmp / "in" / "rgb.png", testing::random_image(rng, 33, 61, 3));
  const Manifest m = augment_dataset({tmp / "in"}, busy_config(), tmp / "out", {1});
  for (const FrameRecord& f : m.frames) {
    const ImageBuffer in = read_png(tmp / "in" / f.input);
    const ImageBuffer out = read_png(tmp / "out" / "rainy" / f.output);
    const ImageBuffer mask = read_png(tmp / "out" / "mask" / f.mask);
    REQUIRE(out.dims() == in.dims());
    REQUIRE(out.channels() == in.channels());
    CHECK(f.width == in.width());
    CHECK(f.height == in.height());
    for (int y = 0; y < in.height(); ++y)
      for (int x = 0; x < in.width(); ++x)
        if (mask.at(x, y) == 0.0f)
          for (int c = 0; c < in.channels(); ++c) CHECK(out.at(x, y, c) == in.at(x, y, c));
  }
}

TEST_CASE("sequence mode carries one droplet down five pixels per frame") {
  // One 5 mm droplet, always slipping. The seed is chosen by simulating the
  // same field so the droplet stays clear of the image border for all frames.
  const int w = 160, h = 160, frames = 10;
  EffectiveConfig cfg;
  cfg.field.spawn_probability = 1.0;
  cfg.field.max_drops = 1;
  cfg.field.slip_probability = 1.0;
  cfg.field.diameter_range_mm = {5.0, 5.0};
  cfg.field.scale_range = {1.0, 1.0};
  cfg.field.pixels_per_mm = 3.0;  // footprint radius 7.5 px, kernel support 11.25 px
  const double margin = 13.0;
  std::uint64_t master = 0;
  for (;; ++master) {
    FieldConfig fc = cfg.field;
    fc.seed = derive_seed(master, 0);
    DropField f(fc, {w, h});
    f.spawn();
    bool clear = true;
    for (int k = 0; k < frames && clear; ++k) {
      if (k) f.step();
      const Droplet& d = f.droplets().at(0);
      clear = d.u > margin && d.u < w - 1 - margin && d.v > margin && d.v < h - 1 - margin;
    }
    if (clear) break;
    REQUIRE(master < 10000);
  }
  cfg.field.seed = master;

  TempDir tmp("pipe_seq");
  write_images(tmp / "in" / "seq", frames, 6, w, h, "frame_");
  DatasetLayout layout{tmp / "in"};
  layout.sequence = true;
  const Manifest m = augment_dataset(layout, cfg, tmp / "out", {1});
  REQUIRE(m.frames.size() == frames);
  double prev = -1.0;
  for (int k = 0; k < frames; ++k) {
    const FrameRecord& f = m.frames[k];
    CHECK(f.sequence == 0);
    CHECK(f.frame == k);
    CHECK(f.seed == derive_seed(master, 0));
    const ImageBuffer mask = read_png(tmp / "out" / "mask" / f.mask);
    double sy = 0.0, n = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (mask.at(x, y) > 0.0f) {
          sy += y;
          n += 1.0;
        }
    REQUIRE(n > 0.0);
    const double cy = sy / n;
    CHECK(cy == doctest::Approx(f.droplets.at(0).v).epsilon(1e-9));
    if (k) CHECK(cy - prev == doctest::Approx(5.0).epsilon(1e-9));
    prev = cy;
  }
}

TEST_CASE("sequences are grouped by directory with independent seeds") {
  TempDir tmp("pipe_seq2");
  write_images(tmp / "in" / "a", 3, 7);
  write_images(tmp / "in" / "b", 2, 8);
  DatasetLayout layout{tmp / "in"};
  layout.sequence = true;
  const Manifest m = augment_dataset(layout, busy_config(9), tmp / "out", {2});
  REQUIRE(m.frames.size() == 5);
  CHECK(m.frames[0].sequence == 0);
  CHECK(m.frames[2].frame == 2);
  CHECK(m.frames[3].sequence == 1);
  CHECK(m.frames[3].frame == 0);
  CHECK(m.frames[3].seed == derive_seed(9, 1));
  const ReplayReport r = replay(load_manifest(tmp / "out" / "manifest.json"), tmp / "again", {3});
  CHECK(r.ok());
  CHECK(r.verified == 5);
  CHECK(r.recorded_state_fallbacks == 0);
}

TEST_CASE("replay reproduces recorded checksums") {
  TempDir tmp("pipe_replay");
  write_images(tmp / "in", 3, 10);
  const Manifest m = augment_dataset({tmp / "in"}, busy_config(), tmp / "out", {2});
  for (const FrameRecord& f : m.frames) {
    CHECK(sha256_file(tmp / "out" / "rainy" / f.output) == f.output_sha256);
    CHECK(sha256_file(tmp / "out" / "mask" / f.mask) == f.mask_sha256);
  }
  const Manifest loaded = load_manifest(tmp / "out" / "manifest.json");
  CHECK(to_json(loaded) == to_json(m));
  const ReplayReport r = replay(loaded, tmp / "again");
  CHECK(r.config_hash_matched);
  CHECK(r.ok());
  CHECK(r.verified == 3);
  CHECK(tree_bytes(tmp / "out") == tree_bytes(tmp / "again"));
  // Replaying in place is also a fixed point.
  const ReplayReport in_place = replay(loaded, tmp / "out");
  CHECK(in_place.ok());
  CHECK(read_file_bytes(tmp / "out" / "manifest.json") == read_file_bytes(tmp / "again" / "manifest.json"));
}

TEST_CASE("replay falls back to recorded droplet states") {
  TempDir tmp("pipe_fallback");
  write_images(tmp / "in", 2, 11);
  Manifest m = augment_dataset({tmp / "in"}, busy_config(), tmp / "out");
  // Pretend the simulator changed: the recorded states are authoritative.
  Droplet extra;
  extra.id = 999;
  extra.u = 40;
  extra.v = 30;
  extra.diameter_mm = 6.0;
  m.frames[0].droplets.push_back(extra);
  const ReplayReport r = replay(m, tmp / "again");
  CHECK(r.recorded_state_fallbacks == 1);
  CHECK(r.mismatched.size() == 1);
  CHECK(r.verified == 1);
  const Manifest re = load_manifest(tmp / "again" / "manifest.json");
  CHECK(re.frames[0].droplets == m.frames[0].droplets);
}

TEST_CASE("edited seed triggers a config hash mismatch") {
  TempDir tmp("pipe_hash");
  write_images(tmp / "in", 2, 12);
  Manifest m = augment_dataset({tmp / "in"}, busy_config(), tmp / "out");
  m.config.field.seed += 1;
  const ReplayReport r = replay(m, tmp / "again");
  CHECK_FALSE(r.config_hash_matched);
  CHECK(r.verified == 0);
  CHECK(r.errors.empty());
  const Manifest re = load_manifest(tmp / "again" / "manifest.json");
  CHECK(re.frames[0].output_sha256 != m.frames[0].output_sha256);
}

TEST_CASE("manifest version checks") {
  TempDir tmp("pipe_version");
  write_images(tmp / "in", 1, 13);
  Manifest m = augment_dataset({tmp / "in"}, busy_config(), tmp / "out");
  Manifest bad = m;
  bad.format_version = 2;
  CHECK_THROWS_AS(replay(bad, tmp / "x"), VersionError);
  bad = m;
  bad.toolkit_version = "9.0.0";
  CHECK_THROWS_AS(replay(bad, tmp / "x"), VersionError);
  nlohmann::json j = to_json(m);
  j["format"] = "something-else";
  CHECK_THROWS_AS(manifest_from_json(j), FormatError);
  std::ofstream(tmp / "broken.json") << "{ not json";
  CHECK_THROWS_AS(load_manifest(tmp / "broken.json"), FormatError);
  CHECK_THROWS_AS(load_manifest(tmp / "missing.json"), IoError);
}

TEST_CASE("labels pass through untouched and must pair with images") {
  TempDir tmp("pipe_labels");
  write_images(tmp / "in", 3, 14);
  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%03d_label.png", i);
    LabelMap lm{96, 72, std::vector<std::int32_t>(96 * 72, i)};
    lm.labels[5] = 255;
    write_label_png(tmp / "in" / name, lm);
  }
  DatasetLayout layout{tmp / "in"};
  layout.label_glob = "*_label.png";
  layout.label_suffix = "_label";
  const Manifest m = augment_dataset(layout, busy_config(), tmp / "out");
  REQUIRE(m.frames.size() == 3);
  for (const FrameRecord& f : m.frames) {
    REQUIRE(f.label_input.has_value());
    CHECK(read_file_bytes(tmp / "out" / "labels" / *f.label_output) == read_file_bytes(tmp / "in" / *f.label_input));
  }
  CHECK(replay(m, tmp / "again").ok());

  std::mt19937_64 rng(1);
  write_png(tmp / "in" / "orphan_label.png", testing::random_mask(rng, 4, 4, 0.5));
  CHECK_THROWS_AS(augment_dataset(layout, busy_config(), tmp / "fresh"), DatasetError);
  CHECK_FALSE(fs::exists(tmp / "fresh"));
  fs::remove(tmp / "in" / "orphan_label.png");
  fs::remove(tmp / "in" / "img_001_label.png");
  CHECK_THROWS_AS(augment_dataset(layout, busy_config(), tmp / "fresh"), DatasetError);
  CHECK_FALSE(fs::exists(tmp / "fresh"));
}

TEST_CASE("a corrupt input only affects its own record") {
  TempDir tmp("pipe_corrupt");
  write_images(tmp / "in", 4, 15);
  write_images(tmp / "ref", 4, 15);
  std::ofstream(tmp / "in" / "img_002.png", std::ios::binary | std::ios::trunc) << "not a png at all";
  const EffectiveConfig cfg = busy_config();
  const Manifest bad = augment_dataset({tmp / "in"}, cfg, tmp / "bad", {2});
  const Manifest good = augment_dataset({tmp / "ref"}, cfg, tmp / "good", {2});
  CHECK(bad.error_count() == 1);
  REQUIRE(bad.frames[2].error.has_value());
  CHECK_FALSE(fs::exists(tmp / "bad" / "rainy" / "img_002.png"));
  for (std::size_t i : {0u, 1u, 3u}) {
    CHECK_FALSE(bad.frames[i].error.has_value());
    CHECK(bad.frames[i].output_sha256 == good.frames[i].output_sha256);
    CHECK(bad.frames[i].mask_sha256 == good.frames[i].mask_sha256);
  }
  const ReplayReport r = replay(bad, tmp / "again");
  CHECK(r.ok());
  CHECK(r.verified == 3);
}

TEST_CASE("output directory inside the input tree is excluded from discovery") {
  TempDir tmp("pipe_nested");
  write_images(tmp.path(), 2, 16);
  const Manifest first = augment_dataset({tmp.path()}, busy_config(), tmp / "out");
  const Manifest second = augment_dataset({tmp.path()}, busy_config(), tmp / "out");
  CHECK(first.frames.size() == 2);
  CHECK(second.frames.size() == 2);
  CHECK(to_json(first) == to_json(second));
}

TEST_CASE("missing input root is a dataset error") {
  TempDir tmp("pipe_missing");
  CHECK_THROWS_AS(augment_dataset({tmp / "nope"}, EffectiveConfig{}, tmp / "out"), DatasetError);
}

TEST_CASE("compare_datasets") {
  TempDir tmp("pipe_compare");
  SUBCASE("a tree against itself") {
    write_images(tmp / "a", 3, 17);
    const CompareResult r = compare_datasets(tmp / "a", tmp / "a");
    CHECK(r.ok());
    REQUIRE(r.pairs.size() == 3);
    CHECK(std::isinf(*r.aggregate.psnr));
    CHECK(*r.aggregate.ssim == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(to_csv(r).find("mean,inf,1.000000") != std::string::npos);
    CHECK(to_json(r)["mean"]["PSNR"] == "inf");
  }
  SUBCASE("constant offsets give the hand-computed mean") {
    write_png(tmp / "a" / "one.png", ImageBuffer(16, 16, 3, 100 / 255.0f));
    write_png(tmp / "b" / "one.png", ImageBuffer(16, 16, 3, 116 / 255.0f));
    write_png(tmp / "a" / "two.png", ImageBuffer(16, 16, 1, 50 / 255.0f));
    write_png(tmp / "b" / "two.png", ImageBuffer(16, 16, 1, 58 / 255.0f));
    const CompareResult r = compare_datasets(tmp / "a", tmp / "b");
    const double p1 = 20.0 * std::log10(255.0 / 16.0);
    const double p2 = 20.0 * std::log10(255.0 / 8.0);
    CHECK(*r.aggregate.psnr == doctest::Approx((p1 + p2) / 2.0).epsilon(1e-6));
    CHECK(*r.pairs[0].psnr == doctest::Approx(p1).epsilon(1e-6));
    CHECK(r.pairs[0].key == "one");
  }
  SUBCASE("unpaired files are listed and excluded") {
    write_images(tmp / "a", 2, 18);
    write_images(tmp / "b", 3, 18);
    const CompareResult r = compare_datasets(tmp / "a", tmp / "b");
    CHECK_FALSE(r.ok());
    CHECK(r.pairs.size() == 2);
    REQUIRE(r.unpaired.size() == 1);
    CHECK(r.unpaired[0].find("img_002") != std::string::npos);
  }
  SUBCASE("pooled segmentation and label scores") {
    write_images(tmp / "a", 2, 19, 16, 16);
    write_images(tmp / "b", 2, 19, 16, 16);
    std::mt19937_64 rng(20);
    for (const char* n : {"img_000.png", "img_001.png"}) {
      write_png(tmp / "pm" / n, testing::random_mask(rng, 16, 16, 0.5));
      write_png(tmp / "gm" / n, testing::random_mask(rng, 16, 16, 0.5));
      LabelMap l{16, 16, std::vector<std::int32_t>(256)};
      std::uniform_int_distribution<int> cls(0, 2);
      for (auto& v : l.labels) v = cls(rng);
      write_label_png(tmp / "pl" / n, l);
      for (auto& v : l.labels) v = cls(rng);
      write_label_png(tmp / "gl" / n, l);
    }
    CompareOptions opts;
    opts.pred_masks = tmp / "pm";
    opts.gt_masks = tmp / "gm";
    opts.pred_labels = tmp / "pl";
    opts.gt_labels = tmp / "gl";
    opts.n_classes = 3;
    const CompareResult r = compare_datasets(tmp / "a", tmp / "b", opts);
    REQUIRE(r.ok());
    const SegStats& s0 = *r.pairs[0].seg;
    const SegStats& s1 = *r.pairs[1].seg;
    CHECK(r.aggregate.seg->tp == s0.tp + s1.tp);
    CHECK(r.aggregate.seg->fp == s0.fp + s1.fp);
    CHECK(r.aggregate.miou.has_value());
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("pair,PSNR,SSIM,Prec,Rec,F1,IOU,mIOU,error\n", 0) == 0);
  }
  SUBCASE("option errors") {
    fs::create_directories(tmp / "a");
    CompareOptions opts;
    opts.pred_masks = tmp / "a";
    CHECK_THROWS_AS(compare_datasets(tmp / "a", tmp / "a", opts), ParameterError);
    CHECK_THROWS_AS(compare_datasets(tmp / "a", tmp / "zzz"), IoError);
  }
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_thread_count(3) == 3);
  ::setenv("RAINFX_THREADS", "5", 1);
  CHECK(resolve_thread_count(0) == 5);
  ::setenv("RAINFX_THREADS", "junk", 1);
  CHECK(resolve_thread_count(0) >= 1);
  ::unsetenv("RAINFX_THREADS");
  CHECK(resolve_thread_count(0) >= 1);
}
