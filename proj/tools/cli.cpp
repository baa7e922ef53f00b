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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "rainfx/dropfield.hpp"
#include "rainfx/errors.hpp"
#include "rainfx/metrics.hpp"
#include "rainfx/pipeline.hpp"
#include "rainfx/png_io.hpp"
#include "rainfx/protodrop.hpp"
#include "rainfx/render.hpp"

namespace rainfx::cli {
namespace {

void add_config_options(CLI::App& cmd, RunConfig& rc, std::optional<std::uint64_t>& seed) {
  cmd.add_option("-c,--config", rc.config_path, "Key-value config file ([field], [proto], [render] sections)")
      ->check(CLI::ExistingFile);
  cmd.add_option("-s,--set", rc.overrides, "Override a config key, e.g. --set field.p_r=0.001 (repeatable)");
  cmd.add_option("--seed", seed, "Master seed (same as --set field.seed=N)");
}

EffectiveConfig resolve_with_seed(const RunConfig& rc, const std::optional<std::uint64_t>& seed) {
  EffectiveConfig cfg = rc.resolve();
  if (seed) cfg.field.seed = *seed;
  cfg.validate();
  return cfg;
}

void echo_run(std::ostream& out, const RunConfig& rc, const EffectiveConfig& cfg, const std::string& hash) {
  if (rc.verbosity < 1) return;
  out << "seed: " << cfg.field.seed << "\nconfig hash: " << hash << '\n';
  if (rc.verbosity > 1) out << to_config_text(cfg);
}

int cmd_protodrop(const RunConfig& rc, const std::optional<std::uint64_t>& seed, const ProtoDropParams& flags,
                  const std::vector<std::string>& given, const std::filesystem::path& output, std::ostream& out) {
  EffectiveConfig cfg = rc.resolve();
  if (seed) cfg.field.seed = *seed;
  // Explicit flags win over config file and --set values.
  for (const auto& name : given) {
    if (name == "radius") cfg.proto.radius_px = flags.radius_px;
    if (name == "cap-ratio") cfg.proto.cap_ratio = flags.cap_ratio;
    if (name == "gain") cfg.proto.refraction_gain = flags.refraction_gain;
    if (name == "resolution") cfg.proto.resolution = flags.resolution;
  }
  if (std::find(given.begin(), given.end(), "radius") != given.end() && !(flags.radius_px > 0.0))
    throw ParameterError("--radius must be positive");
  cfg.proto.validate();
  echo_run(out, rc, cfg, config_hash(cfg, DatasetLayout{}));

  const ProtoDropTexture tex = generate_protodrop(cfg.proto);
  save_texture(tex, output);
  std::filesystem::path vis = output;
  vis.replace_filename(output.stem().string() + "_vis.png");
  write_png(vis, visualize_texture(quantize_texture(tex)));
  if (rc.verbosity >= 1)
    out << "wrote " << output.string() << ", " << sidecar_path(output).string() << ", " << vis.string() << '\n';
  return kOk;
}

int cmd_preview(const RunConfig& rc, const std::optional<std::uint64_t>& seed, const std::filesystem::path& input,
                const std::filesystem::path& output, const std::filesystem::path& mask_path, std::ostream& out) {
  const EffectiveConfig cfg = resolve_with_seed(rc, seed);
  echo_run(out, rc, cfg, config_hash(cfg, DatasetLayout{}));
  const ImageBuffer img = read_png(input);
  // Same seed derivation as image 0 of a non-sequence augment run.
  FieldConfig fc = cfg.field;
  fc.seed = derive_seed(cfg.field.seed, 0);
  DropField field(fc, img.dims());
  field.spawn();
  const CompositeMap comp = composite(field, generate_protodrop(cfg.proto), img.dims());
  write_png(output, apply_rain(img, comp, cfg.render));
  if (!mask_path.empty()) write_png(mask_path, droplet_mask(comp));
  if (rc.verbosity >= 1) out << "droplets: " << field.droplets().size() << '\n';
  return kOk;
}

int cmd_augment(const RunConfig& rc, const std::optional<std::uint64_t>& seed, const DatasetLayout& layout,
                const std::filesystem::path& out_root, int threads, bool keep_going, std::ostream& out,
                std::ostream& err) {
  const EffectiveConfig cfg = resolve_with_seed(rc, seed);
  echo_run(out, rc, cfg, config_hash(cfg, layout));
  const Manifest m = augment_dataset(layout, cfg, out_root, RunOptions{threads});
  for (const auto& f : m.frames)
    if (f.error) err << "error: " << f.input << ": " << *f.error << '\n';
  if (rc.verbosity >= 1)
    out << "frames: " << m.frames.size() << ", errors: " << m.error_count() << "\nmanifest: "
        << (out_root / "manifest.json").string() << '\n';
  return m.error_count() > 0 && !keep_going ? kRuntimeFailure : kOk;
}

int cmd_replay(const RunConfig& rc, const std::filesystem::path& manifest_path, const std::filesystem::path& out_root,
               int threads, std::ostream& out, std::ostream& err) {
  const Manifest m = load_manifest(manifest_path);
  echo_run(out, rc, m.config, m.config_hash);
  const ReplayReport report = replay(m, out_root, RunOptions{threads});
  if (!report.config_hash_matched)
    err << "warning: config hash mismatch; the manifest config was edited, outputs will differ from the "
           "recorded checksums\n";
  for (const auto& e : report.errors) err << "error: " << e << '\n';
  for (const auto& f : report.mismatched) err << "checksum mismatch: " << f << '\n';
  if (rc.verbosity >= 1) {
    out << "frames: " << report.frames << ", verified: " << report.verified
        << ", mismatched: " << report.mismatched.size() << '\n';
    if (report.recorded_state_fallbacks > 0)
      out << "rendered " << report.recorded_state_fallbacks << " frame(s) from recorded droplet states\n";
  }
  return report.ok() ? kOk : kRuntimeFailure;
}

int cmd_metrics(const RunConfig& rc, const std::filesystem::path& a, const std::filesystem::path& b,
                const CompareOptions& options, const std::filesystem::path& csv_path,
                const std::filesystem::path& json_path, std::ostream& out, std::ostream& err) {
  const CompareResult result = compare_datasets(a, b, options);
  for (const auto& u : result.unpaired) err << "unpaired: " << u << '\n';
  for (const auto& p : result.pairs)
    if (p.error) err << "error: " << p.key << ": " << *p.error << '\n';
  const std::string csv = to_csv(result);
  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw IoError("cannot write " + csv_path.string());
    f << csv;
  }
  if (!json_path.empty()) {
    std::ofstream f(json_path);
    if (!f) throw IoError("cannot write " + json_path.string());
    f << to_json(result).dump(2) << '\n';
  }
  if (rc.verbosity >= 1) out << csv;
  return result.ok() ? kOk : kRuntimeFailure;
}

}  // namespace

EffectiveConfig RunConfig::resolve() const {
  EffectiveConfig cfg;
  if (!config_path.empty()) load_config_file(cfg, config_path);
  for (const auto& o : overrides) apply_override(cfg, o);
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rainfx: synthetic adherent raindrops and image-quality metrics"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolkitVersion));

  RunConfig rc;
  bool quiet = false;
  int verbose = 0;
  app.add_flag("-v,--verbose", verbose, "Print the full effective config");
  app.add_flag("-q,--quiet", quiet, "Only print errors");

  std::optional<std::uint64_t> seed;
  int threads = 0;

  auto* protodrop = app.add_subcommand("protodrop", "Generate the proto-droplet texture, sidecar and visualization");
  ProtoDropParams flags;
  std::filesystem::path texture_out = "protodrop.png";
  add_config_options(*protodrop, rc, seed);
  protodrop->add_option("--radius", flags.radius_px, "Footprint radius, texture pixels");
  protodrop->add_option("--cap-ratio", flags.cap_ratio, "Cap height / footprint radius, in (0, 1]");
  protodrop->add_option("--gain", flags.refraction_gain, "Refraction gain, pixels per unit tilt");
  protodrop->add_option("--resolution", flags.resolution, "Texture side, pixels (>= 2 * radius)");
  protodrop->add_option("-o,--output", texture_out, "16-bit RGBA texture path");

  auto* preview = app.add_subcommand("preview", "Render rain onto one image");
  std::filesystem::path preview_in, preview_out, preview_mask;
  add_config_options(*preview, rc, seed);
  preview->add_option("-i,--input", preview_in, "Input PNG")->required()->check(CLI::ExistingFile);
  preview->add_option("-o,--output", preview_out, "Rainy output PNG")->required();
  preview->add_option("-m,--mask", preview_mask, "Droplet mask output PNG");

  auto* augment = app.add_subcommand("augment", "Add rain to a dataset tree and write a replayable manifest");
  DatasetLayout layout;
  std::filesystem::path out_root;
  bool keep_going = false;
  std::string label_glob;
  add_config_options(*augment, rc, seed);
  augment->add_option("-r,--input-root", layout.root, "Dataset root")->required()->check(CLI::ExistingDirectory);
  augment->add_option("--images", layout.image_glob, "Image glob relative to the root")->capture_default_str();
  augment->add_option("--labels", label_glob, "Label glob relative to the root; labels are copied untouched");
  augment->add_option("--label-suffix", layout.label_suffix, "Label stem = image stem + suffix");
  augment->add_flag("--sequence", layout.sequence, "Frames of each directory share one evolving droplet field");
  augment->add_option("-o,--output-root", out_root, "Output root (rainy/, mask/, labels/, manifest.json)")
      ->required();
  augment->add_option("-j,--threads", threads, "Worker threads (default: RAINFX_THREADS or core count)");
  augment->add_flag("--keep-going", keep_going, "Exit 0 even if some inputs failed");

  auto* replay_cmd = app.add_subcommand("replay", "Regenerate the outputs of a manifest and verify checksums");
  std::filesystem::path manifest_path, replay_out;
  replay_cmd->add_option("-m,--manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("-o,--output-root", replay_out, "Output root")->required();
  replay_cmd->add_option("-j,--threads", threads, "Worker threads");

  auto* metrics = app.add_subcommand("metrics", "Compare two image trees (PSNR, SSIM, segmentation statistics)");
  std::filesystem::path dir_a, dir_b, csv_path, json_path, pred_masks, gt_masks, pred_labels, gt_labels;
  CompareOptions compare;
  metrics->add_option("a", dir_a, "Reference tree")->required()->check(CLI::ExistingDirectory);
  metrics->add_option("b", dir_b, "Compared tree")->required()->check(CLI::ExistingDirectory);
  metrics->add_option("--pred-masks", pred_masks, "Predicted binary masks (paired by stem)");
  metrics->add_option("--gt-masks", gt_masks, "Ground-truth binary masks");
  metrics->add_option("--pred-labels", pred_labels, "Predicted 8-bit class-id maps");
  metrics->add_option("--gt-labels", gt_labels, "Ground-truth 8-bit class-id maps");
  metrics->add_option("--classes", compare.n_classes, "Number of classes for mIOU");
  metrics->add_option("--ignore-label", compare.ignore_label, "Class id excluded from mIOU")->capture_default_str();
  metrics->add_option("--csv", csv_path, "Write the table as CSV");
  metrics->add_option("--json", json_path, "Write the table as JSON");
  metrics->add_option("-j,--threads", threads, "Worker threads");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("rainfx");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  rc.verbosity = quiet ? 0 : 1 + verbose;

  try {
    if (*protodrop) {
      rc.subcommand = "protodrop";
      std::vector<std::string> given;
      for (const char* name : {"radius", "cap-ratio", "gain", "resolution"})
        if (protodrop->count(std::string("--") + name) > 0) given.emplace_back(name);
      return cmd_protodrop(rc, seed, flags, given, texture_out, out);
    }
    if (*preview) {
      rc.subcommand = "preview";
      return cmd_preview(rc, seed, preview_in, preview_out, preview_mask, out);
    }
    if (*augment) {
      rc.subcommand = "augment";
      if (!label_glob.empty()) layout.label_glob = label_glob;
      return cmd_augment(rc, seed, layout, out_root, threads, keep_going, out, err);
    }
    if (*replay_cmd) {
      rc.subcommand = "replay";
      return cmd_replay(rc, manifest_path, replay_out, threads, out, err);
    }
    if (*metrics) {
      rc.subcommand = "metrics";
      if (!pred_masks.empty() || !gt_masks.empty()) {
        compare.pred_masks = pred_masks;
        compare.gt_masks = gt_masks;
      }
      if (!pred_labels.empty() || !gt_labels.empty()) {
        compare.pred_labels = pred_labels;
        compare.gt_labels = gt_labels;
      }
      compare.run.threads = threads;
      return cmd_metrics(rc, dir_a, dir_b, compare, csv_path, json_path, out, err);
    }
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace rainfx::cli
