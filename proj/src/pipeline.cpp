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

#include "rainfx/pipeline.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "rainfx/errors.hpp"
#include "rainfx/hash.hpp"
#include "rainfx/png_io.hpp"
#include "rainfx/protodrop.hpp"
#include "rainfx/render.hpp"

namespace rainfx {
namespace {

constexpr const char* kManifestFormat = "rainfx-manifest";

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

std::string png_rel(const std::string& rel) {
  fs::path p(rel);
  p.replace_extension(".png");
  return p.generic_string();
}

std::string key_of(const fs::path& rel) {
  fs::path p = rel;
  p.replace_extension();
  return p.generic_string();
}

bool is_within(const fs::path& path, const fs::path& dir) {
  const auto rel = path.lexically_relative(dir);
  return !rel.empty() && *rel.begin() != "..";
}

struct FrameJob {
  std::size_t index = 0;
  int sequence = -1;
  std::string input;
  std::optional<std::string> label;
};

using RecordedStates = std::function<const std::vector<Droplet>*(std::size_t index)>;

struct RenderContext {
  const EffectiveConfig& cfg;
  const ProtoDropTexture& proto;
  fs::path input_root;
  fs::path out_root;
};

// Per-worker scratch reused across the frames of a group.
struct FrameBuffers {
  CompositeMap comp;
  ImageBuffer rainy;
};

void render_frame(const RenderContext& ctx, const ImageBuffer& img, FrameRecord& rec, FrameBuffers& buf) {
  composite_into(rec.droplets, ctx.cfg.field, ctx.proto, img.dims(), buf.comp);
  apply_rain_into(img, buf.comp, ctx.cfg.render, buf.rainy);
  const auto rainy = encode_png(buf.rainy);
  const auto mask = encode_png(droplet_mask(buf.comp));
  write_file_bytes(ctx.out_root / "rainy" / rec.output, rainy);
  write_file_bytes(ctx.out_root / "mask" / rec.mask, mask);
  rec.output_sha256 = sha256_hex(rainy);
  rec.mask_sha256 = sha256_hex(mask);
  if (rec.label_input) {
    const fs::path dst = ctx.out_root / "labels" / *rec.label_output;
    fs::create_directories(dst.parent_path());
    fs::copy_file(ctx.input_root / *rec.label_input, dst, fs::copy_options::overwrite_existing);
  }
}

// Frames of one group share a field: a single image outside sequence mode,
// a whole directory in sequence mode.
void run_group(const RenderContext& ctx, std::span<const FrameJob> jobs, std::uint64_t seed,
               const RecordedStates& recorded, std::vector<FrameRecord>& records,
               std::atomic<std::size_t>& fallbacks) {
  FieldConfig fc = ctx.cfg.field;
  fc.seed = seed;
  std::optional<DropField> field;
  FrameBuffers buffers;
  for (const FrameJob& job : jobs) {
    FrameRecord& rec = records[job.index];
    rec = FrameRecord{};
    rec.index = job.index;
    rec.sequence = job.sequence;
    rec.input = job.input;
    rec.output = png_rel(job.input);
    rec.mask = png_rel(job.input);
    rec.label_input = job.label;
    if (job.label) rec.label_output = *job.label;
    rec.seed = seed;

    std::optional<ImageBuffer> img;
    try {
      img = read_png(ctx.input_root / job.input);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    // A sequence keeps stepping through unreadable frames so later frames
    // see the same droplet state regardless of which inputs failed.
    if (field) {
      field->step();
    } else if (img) {
      field.emplace(fc, img->dims());
      field->spawn();
    }
    if (field) rec.frame = field->frame();
    if (!img) continue;
    if (img->dims() != field->dims()) {
      rec.error = "frame dimensions differ from the first frame of its sequence";
      continue;
    }
    rec.width = img->width();
    rec.height = img->height();
    rec.droplets = field->droplets();
    if (recorded) {
      if (const auto* states = recorded(job.index); states && *states != rec.droplets) {
        rec.droplets = *states;
        ++fallbacks;
      }
    }
    try {
      render_frame(ctx, *img, rec, buffers);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  }
}

std::size_t run_jobs(const RenderContext& ctx, const std::vector<FrameJob>& jobs, bool sequence,
                     std::uint64_t master_seed, int threads, const RecordedStates& recorded,
                     std::vector<FrameRecord>& records) {
  std::vector<std::vector<FrameJob>> groups;
  std::vector<std::uint64_t> seeds;
  if (sequence) {
    std::map<int, std::size_t> slot;
    for (const FrameJob& job : jobs) {
      auto [it, inserted] = slot.try_emplace(job.sequence, groups.size());
      if (inserted) {
        groups.emplace_back();
        seeds.push_back(derive_seed(master_seed, static_cast<std::uint64_t>(job.sequence)));
      }
      groups[it->second].push_back(job);
    }
  } else {
    for (const FrameJob& job : jobs) {
      groups.push_back({job});
      seeds.push_back(derive_seed(master_seed, job.index));
    }
  }
  std::atomic<std::size_t> fallbacks{0};
  parallel_for(groups.size(), threads, [&](std::size_t g) {
    run_group(ctx, groups[g], seeds[g], recorded, records, fallbacks);
  });
  return fallbacks.load();
}

nlohmann::json layout_json(const DatasetLayout& layout, bool with_root) {
  nlohmann::json j = {
      {"image_glob", layout.image_glob},
      {"label_glob", layout.label_glob ? nlohmann::json(*layout.label_glob) : nlohmann::json(nullptr)},
      {"label_suffix", layout.label_suffix},
      {"sequence", layout.sequence},
  };
  if (with_root) j["root"] = layout.root.generic_string();
  return j;
}

std::vector<std::pair<std::string, fs::path>> list_pngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::pair<std::string, fs::path>> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".png") continue;
    out.emplace_back(key_of(entry.path().lexically_relative(dir)), entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

nlohmann::json metric_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::size_t Manifest::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(frames.begin(), frames.end(), [](const FrameRecord& f) { return f.error.has_value(); }));
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RAINFX_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string config_hash(const EffectiveConfig& cfg, const DatasetLayout& layout) {
  const nlohmann::json j = {{"config", to_json(cfg)}, {"layout", layout_json(layout, false)}};
  return sha256_hex(j.dump());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) { return mix_seed(master, index); }

DatasetListing discover_dataset(const DatasetLayout& layout, const fs::path& exclude) {
  if (!fs::is_directory(layout.root)) throw DatasetError("input root is not a directory: " + layout.root.string());
  const fs::path excluded = exclude.empty() ? fs::path{} : fs::weakly_canonical(exclude);
  std::vector<std::string> images;
  std::vector<std::string> labels;
  for (const auto& entry : fs::recursive_directory_iterator(layout.root)) {
    if (!entry.is_regular_file()) continue;
    if (!excluded.empty() && is_within(fs::weakly_canonical(entry.path()), excluded)) continue;
    const std::string rel = entry.path().lexically_relative(layout.root).generic_string();
    if (layout.label_glob && fnmatch(layout.label_glob->c_str(), rel.c_str(), 0) == 0) {
      labels.push_back(rel);
    } else if (fnmatch(layout.image_glob.c_str(), rel.c_str(), 0) == 0) {
      images.push_back(rel);
    }
  }
  std::sort(images.begin(), images.end());
  std::sort(labels.begin(), labels.end());

  DatasetListing listing;
  listing.images = images;
  listing.labels.assign(images.size(), std::nullopt);
  if (!layout.label_glob) return listing;

  std::vector<std::string> problems;
  std::map<std::string, std::string> by_stem;
  for (const auto& l : labels) {
    const std::string stem = fs::path(l).stem().string();
    if (!by_stem.emplace(stem, l).second) problems.push_back("duplicate label stem: " + l);
  }
  std::set<std::string> image_stems;
  std::set<std::string> used;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string stem = fs::path(images[i]).stem().string();
    if (!image_stems.insert(stem).second) problems.push_back("duplicate image stem: " + images[i]);
    const auto it = by_stem.find(stem + layout.label_suffix);
    if (it == by_stem.end()) {
      problems.push_back("no label for image: " + images[i]);
      continue;
    }
    listing.labels[i] = it->second;
    used.insert(it->first);
  }
  for (const auto& [stem, path] : by_stem)
    if (!used.count(stem)) problems.push_back("no image for label: " + path);
  if (!problems.empty()) {
    std::string msg = "label/image pairing failed:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DatasetError(msg);
  }
  return listing;
}

Manifest augment_dataset(const DatasetLayout& layout, const EffectiveConfig& cfg, const fs::path& out_root,
                         const RunOptions& options) {
  cfg.validate();
  DatasetLayout resolved = layout;
  resolved.root = fs::absolute(layout.root).lexically_normal();
  const DatasetListing listing = discover_dataset(resolved, out_root);

  std::vector<FrameJob> jobs(listing.images.size());
  std::map<std::string, int> sequence_ids;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    jobs[i].index = i;
    jobs[i].input = listing.images[i];
    jobs[i].label = listing.labels[i];
    if (resolved.sequence) {
      const std::string dir = fs::path(listing.images[i]).parent_path().generic_string();
      jobs[i].sequence = sequence_ids.try_emplace(dir, static_cast<int>(sequence_ids.size())).first->second;
    }
  }

  const ProtoDropTexture proto = generate_protodrop(cfg.proto);
  fs::create_directories(out_root);
  const RenderContext ctx{cfg, proto, resolved.root, out_root};
  Manifest m;
  m.config = cfg;
  m.layout = resolved;
  m.config_hash = config_hash(cfg, resolved);
  m.frames.resize(jobs.size());
  run_jobs(ctx, jobs, resolved.sequence, cfg.field.seed, resolve_thread_count(options.threads), {}, m.frames);
  save_manifest(m, out_root / "manifest.json");
  return m;
}

ReplayReport replay(const Manifest& manifest, const fs::path& out_root, const RunOptions& options) {
  if (manifest.format_version != kManifestFormatVersion)
    throw VersionError("manifest format version " + std::to_string(manifest.format_version) +
                       " is not supported (expected " + std::to_string(kManifestFormatVersion) + ")");
  const auto major = [](const std::string& v) { return v.substr(0, v.find('.')); };
  if (major(manifest.toolkit_version) != major(kToolkitVersion))
    throw VersionError("manifest written by toolkit " + manifest.toolkit_version + ", this is " +
                       kToolkitVersion);
  manifest.config.validate();

  ReplayReport report;
  report.config_hash_matched = config_hash(manifest.config, manifest.layout) == manifest.config_hash;
  report.frames = manifest.frames.size();

  std::vector<FrameJob> jobs(manifest.frames.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const FrameRecord& f = manifest.frames[i];
    if (f.index != i) throw FormatError("manifest frame indices are not contiguous");
    jobs[i] = FrameJob{i, f.sequence, f.input, f.label_input};
  }

  RecordedStates recorded;
  if (report.config_hash_matched) {
    recorded = [&](std::size_t index) -> const std::vector<Droplet>* {
      const FrameRecord& f = manifest.frames[index];
      return f.error ? nullptr : &f.droplets;
    };
  }

  const ProtoDropTexture proto = generate_protodrop(manifest.config.proto);
  fs::create_directories(out_root);
  const RenderContext ctx{manifest.config, proto, manifest.layout.root, out_root};
  Manifest regenerated = manifest;
  report.recorded_state_fallbacks =
      run_jobs(ctx, jobs, manifest.layout.sequence, manifest.config.field.seed,
               resolve_thread_count(options.threads), recorded, regenerated.frames);
  regenerated.config_hash = config_hash(manifest.config, manifest.layout);

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const FrameRecord& before = manifest.frames[i];
    const FrameRecord& after = regenerated.frames[i];
    if (before.error) continue;
    if (after.error) {
      report.errors.push_back(after.input + ": " + *after.error);
      continue;
    }
    if (!report.config_hash_matched) continue;
    if (before.output_sha256 == after.output_sha256 && before.mask_sha256 == after.mask_sha256)
      ++report.verified;
    else
      report.mismatched.push_back(after.input);
  }
  save_manifest(regenerated, out_root / "manifest.json");
  return report;
}

nlohmann::json to_json(const Manifest& m) {
  nlohmann::json frames = nlohmann::json::array();
  for (const FrameRecord& f : m.frames) {
    nlohmann::json drops = nlohmann::json::array();
    for (const Droplet& d : f.droplets)
      drops.push_back({{"id", d.id},
                       {"u", d.u},
                       {"v", d.v},
                       {"diameter_mm", d.diameter_mm},
                       {"S_x", d.scale_x},
                       {"S_y", d.scale_y},
                       {"age", d.age}});
    nlohmann::json jf = {
        {"index", f.index},   {"sequence", f.sequence},      {"frame", f.frame},
        {"input", f.input},   {"output", f.output},          {"mask", f.mask},
        {"seed", f.seed},     {"width", f.width},            {"height", f.height},
        {"droplets", drops},  {"output_sha256", f.output_sha256}, {"mask_sha256", f.mask_sha256},
    };
    if (f.label_input) {
      jf["label_input"] = *f.label_input;
      jf["label_output"] = *f.label_output;
    }
    if (f.error) jf["error"] = *f.error;
    frames.push_back(std::move(jf));
  }
  return {
      {"format", kManifestFormat},
      {"format_version", m.format_version},
      {"toolkit_version", m.toolkit_version},
      {"config", to_json(m.config)},
      {"config_hash", m.config_hash},
      {"layout", layout_json(m.layout, true)},
      {"frames", frames},
  };
}

Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    if (j.at("format") != kManifestFormat) throw FormatError("not a rainfx manifest");
    m.format_version = j.at("format_version").get<int>();
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    if (m.format_version != kManifestFormatVersion)
      throw VersionError("manifest format version " + std::to_string(m.format_version) + " is not supported");
    m.config = config_from_json(j.at("config"));
    m.config_hash = j.at("config_hash").get<std::string>();
    const auto& l = j.at("layout");
    m.layout.root = l.at("root").get<std::string>();
    m.layout.image_glob = l.at("image_glob").get<std::string>();
    if (!l.at("label_glob").is_null()) m.layout.label_glob = l.at("label_glob").get<std::string>();
    m.layout.label_suffix = l.at("label_suffix").get<std::string>();
    m.layout.sequence = l.at("sequence").get<bool>();
    for (const auto& jf : j.at("frames")) {
      FrameRecord f;
      f.index = jf.at("index").get<std::size_t>();
      f.sequence = jf.at("sequence").get<int>();
      f.frame = jf.at("frame").get<std::int64_t>();
      f.input = jf.at("input").get<std::string>();
      f.output = jf.at("output").get<std::string>();
      f.mask = jf.at("mask").get<std::string>();
      f.seed = jf.at("seed").get<std::uint64_t>();
      f.width = jf.at("width").get<int>();
      f.height = jf.at("height").get<int>();
      f.output_sha256 = jf.at("output_sha256").get<std::string>();
      f.mask_sha256 = jf.at("mask_sha256").get<std::string>();
      if (jf.contains("label_input")) {
        f.label_input = jf.at("label_input").get<std::string>();
        f.label_output = jf.at("label_output").get<std::string>();
      }
      if (jf.contains("error")) f.error = jf.at("error").get<std::string>();
      for (const auto& jd : jf.at("droplets")) {
        Droplet d;
        d.id = jd.at("id").get<std::uint64_t>();
        d.u = jd.at("u").get<double>();
        d.v = jd.at("v").get<double>();
        d.diameter_mm = jd.at("diameter_mm").get<double>();
        d.scale_x = jd.at("S_x").get<double>();
        d.scale_y = jd.at("S_y").get<double>();
        d.age = jd.at("age").get<int>();
        f.droplets.push_back(d);
      }
      m.frames.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void save_manifest(const Manifest& m, const fs::path& path) {
  const std::string text = to_json(m).dump(2) + "\n";
  write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

bool CompareResult::ok() const {
  return unpaired.empty() &&
         std::none_of(pairs.begin(), pairs.end(), [](const PairMetrics& p) { return p.error.has_value(); });
}

CompareResult compare_datasets(const fs::path& dir_a, const fs::path& dir_b, const CompareOptions& options) {
  if (options.pred_masks.has_value() != options.gt_masks.has_value())
    throw ParameterError("prediction and ground-truth mask directories must be given together");
  if (options.pred_labels.has_value() != options.gt_labels.has_value())
    throw ParameterError("prediction and ground-truth label directories must be given together");
  if (options.pred_labels && options.n_classes <= 0)
    throw ParameterError("label comparison needs a positive class count");

  const auto a = list_pngs(dir_a);
  const auto b = list_pngs(dir_b);
  const std::map<std::string, fs::path> b_map(b.begin(), b.end());
  std::map<std::string, fs::path> a_map(a.begin(), a.end());

  CompareResult result;
  std::vector<std::pair<std::string, fs::path>> pairs;
  for (const auto& [key, path] : a) {
    if (b_map.count(key)) pairs.emplace_back(key, path);
    else result.unpaired.push_back((dir_a / (key + ".png")).generic_string());
  }
  for (const auto& [key, path] : b)
    if (!a_map.count(key)) result.unpaired.push_back(path.generic_string());

  std::vector<ClassCounts> class_counts(pairs.size());
  result.pairs.resize(pairs.size());
  parallel_for(pairs.size(), resolve_thread_count(options.run.threads), [&](std::size_t i) {
    const std::string& key = pairs[i].first;
    PairMetrics& pm = result.pairs[i];
    pm.key = key;
    try {
      const ImageBuffer ia = read_png(pairs[i].second);
      const ImageBuffer ib = read_png(b_map.at(key));
      pm.psnr = psnr(ia, ib);
      pm.ssim = ssim(ia, ib);
      if (options.pred_masks) {
        pm.seg = binary_seg_stats(read_png(*options.pred_masks / (key + ".png")),
                                  read_png(*options.gt_masks / (key + ".png")));
      }
      if (options.pred_labels) {
        class_counts[i] = multiclass_counts(read_label_png(*options.pred_labels / (key + ".png")),
                                            read_label_png(*options.gt_labels / (key + ".png")),
                                            options.n_classes, options.ignore_label);
        pm.miou = class_counts[i].miou();
      }
    } catch (const std::exception& e) {
      pm.error = e.what();
    }
  });

  PairMetrics& agg = result.aggregate;
  agg.key = "mean";
  double psnr_sum = 0.0, ssim_sum = 0.0;
  std::size_t n_quality = 0;
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool any_seg = false;
  ClassCounts pooled;
  for (std::size_t i = 0; i < result.pairs.size(); ++i) {
    const PairMetrics& p = result.pairs[i];
    if (p.error) continue;
    if (p.psnr && p.ssim) {
      psnr_sum += *p.psnr;
      ssim_sum += *p.ssim;
      ++n_quality;
    }
    if (p.seg) {
      any_seg = true;
      tp += p.seg->tp;
      fp += p.seg->fp;
      fn += p.seg->fn;
      tn += p.seg->tn;
    }
    if (p.miou) pooled.add(class_counts[i]);
  }
  if (n_quality > 0) {
    agg.psnr = psnr_sum / static_cast<double>(n_quality);
    agg.ssim = ssim_sum / static_cast<double>(n_quality);
  }
  if (any_seg) agg.seg = SegStats::from_counts(tp, fp, fn, tn);
  if (!pooled.tp.empty()) agg.miou = pooled.miou();
  return result;
}

std::string to_csv(const CompareResult& result) {
  std::ostringstream out;
  out << "pair,PSNR,SSIM,Prec,Rec,F1,IOU,mIOU,error\n";
  const auto row = [&](const PairMetrics& p) {
    const auto opt = [](const std::optional<double>& v) { return v ? format_metric(*v) : std::string(); };
    out << p.key << ',' << opt(p.psnr) << ',' << opt(p.ssim) << ',';
    if (p.seg)
      out << format_metric(p.seg->precision) << ',' << format_metric(p.seg->recall) << ','
          << format_metric(p.seg->f1) << ',' << format_metric(p.seg->iou) << ',';
    else
      out << ",,,,";
    out << opt(p.miou) << ',';
    if (p.error) {
      std::string e = *p.error;
      std::replace(e.begin(), e.end(), ',', ';');
      std::replace(e.begin(), e.end(), '\n', ' ');
      out << e;
    }
    out << '\n';
  };
  for (const auto& p : result.pairs) row(p);
  row(result.aggregate);
  return out.str();
}

nlohmann::json to_json(const CompareResult& result) {
  const auto entry = [](const PairMetrics& p) {
    nlohmann::json j = {{"pair", p.key}};
    if (p.psnr) j["PSNR"] = metric_json(*p.psnr);
    if (p.ssim) j["SSIM"] = *p.ssim;
    if (p.seg) {
      j["Prec"] = p.seg->precision;
      j["Rec"] = p.seg->recall;
      j["F1"] = p.seg->f1;
      j["IOU"] = p.seg->iou;
      j["tp"] = p.seg->tp;
      j["fp"] = p.seg->fp;
      j["fn"] = p.seg->fn;
      j["tn"] = p.seg->tn;
    }
    if (p.miou) j["mIOU"] = *p.miou;
    if (p.error) j["error"] = *p.error;
    return j;
  };
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : result.pairs) pairs.push_back(entry(p));
  return {{"pairs", pairs}, {"mean", entry(result.aggregate)}, {"unpaired", result.unpaired}};
}

}  // namespace rainfx
