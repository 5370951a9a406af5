#pragma once

// Batch front end: postprocess, evaluate, synth, render.
// Exit status: 0 success, 1 usage error, 2 some inputs failed.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "panolayout/detect.hpp"
#include "panolayout/io.hpp"
#include "panolayout/metrics.hpp"
#include "panolayout/synth.hpp"

namespace panolayout::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPartial = 2;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("error reading " + path.string());
  return ss.str();
}

/// Writes next to the target and renames, so readers never see a partial file.
inline void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) throw InputError("error writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

/// Optional flag overrides applied on top of the config file.
struct Overrides {
  std::optional<std::string> mode;
  std::optional<double> camera_height;
  std::optional<std::string> regime;
  std::optional<std::string> matching;
  bool no_verticals = false;
  std::optional<double> peak_threshold;
  std::optional<int> peak_min_separation;
  std::optional<double> slope_threshold;
  std::optional<double> kink_threshold;
  std::optional<double> jump_ratio;
  std::optional<int> cluster_radius;
  std::optional<int> extrema_window;
  std::optional<int> wall_fit_columns;
};

inline RunConfig resolve_config(const std::string& config_path, const Overrides& o) {
  RunConfig c;
  std::string path = config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar)) path = env;
  }
  if (!path.empty()) c = parse_run_config(read_file(path));
  if (o.mode) c.mode = parse_mode(*o.mode);
  if (o.camera_height) c.camera.camera_height = *o.camera_height;
  if (o.regime) c.regime = parse_regime(*o.regime);
  if (o.matching) c.matching = parse_corner_matching(*o.matching);
  if (o.no_verticals) c.wireframe_verticals = false;
  if (o.peak_threshold) c.detect.peak_threshold = *o.peak_threshold;
  if (o.peak_min_separation) c.detect.peak_min_separation = *o.peak_min_separation;
  if (o.slope_threshold) c.detect.slope_threshold = *o.slope_threshold;
  if (o.kink_threshold) c.detect.kink_threshold = *o.kink_threshold;
  if (o.jump_ratio) c.detect.jump_ratio = *o.jump_ratio;
  if (o.cluster_radius) c.detect.cluster_radius = *o.cluster_radius;
  if (o.extrema_window) c.detect.extrema_window = *o.extrema_window;
  if (o.wall_fit_columns) c.detect.wall_fit_columns = *o.wall_fit_columns;
  c.detect.validate();
  c.camera.validate();
  return c;
}

/// Loads a layout from JSON, or from corner txt when the extension is .txt.
inline LayoutFile load_layout_file(const fs::path& path, const ImageGrid& grid) {
  const std::string text = read_file(path);
  return path.extension() == ".txt" ? parse_corner_txt(text, grid) : parse_layout_json(text);
}

inline GroundTruth to_ground_truth(const LayoutFile& f, const CameraModel& cam) {
  GroundTruth gt;
  gt.visible = to_visible_layout(f, cam);
  gt.full_polygon = f.full_polygon;
  return gt;
}

inline std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<std::string_view> exts) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension().string();
    if (std::find(exts.begin(), exts.end(), ext) != exts.end()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- subcommands ------------------------------------------------------------------------

inline int cmd_postprocess(const RunConfig& cfg, const std::vector<std::string>& inputs,
                           const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  std::size_t ok = 0, corners = 0, pairs = 0;
  for (const auto& in : inputs) {
    const fs::path path(in);
    try {
      const auto signal = parse_signal_file(read_file(path));
      const auto layout = postprocess(signal, cfg.detect, cfg.mode, cfg.camera);
      write_file_atomic(out_dir / (path.stem().string() + ".json"), emit_layout_json(layout));
      out << path.stem().string() << ": " << layout.corners.size() << " corners, "
          << layout.occlusion_pair_count() << " occlusion pairs\n";
      ++ok;
      corners += layout.corners.size();
      pairs += layout.occlusion_pair_count();
    } catch (const ParseError& e) {
      err << in << ": " << e.what() << " (at " << e.location() << ")\n";
    } catch (const std::exception& e) {
      err << in << ": " << e.what() << "\n";
    }
  }
  out << "postprocessed " << ok << " of " << inputs.size() << " inputs (" << corners
      << " corners, " << pairs << " occlusion pairs, mode " << to_string(cfg.mode) << ")\n";
  return ok == inputs.size() ? kExitOk : kExitPartial;
}

inline int cmd_evaluate(const RunConfig& cfg, const fs::path& pred_dir, const fs::path& gt_dir,
                        const std::string& csv_path, std::ostream& out, std::ostream& err) {
  for (const auto& d : {pred_dir, gt_dir}) {
    if (!fs::is_directory(d)) {
      err << "not a directory: " << d.string() << "\n";
      return kExitUsage;
    }
  }
  std::map<std::string, fs::path> preds, gts;
  for (const auto& p : list_files(pred_dir, {".json"})) preds.emplace(p.stem().string(), p);
  for (const auto& p : list_files(gt_dir, {".json", ".txt"})) gts.emplace(p.stem().string(), p);
  if (preds.empty() && gts.empty()) {
    err << "empty corpus: no .json predictions or ground-truth files found\n";
    return kExitUsage;
  }
  bool partial = false;
  std::vector<ReportRow> rows;
  for (const auto& [stem, path] : preds) {
    auto it = gts.find(stem);
    if (it == gts.end()) {
      err << "unpaired prediction: " << path.string() << "\n";
      partial = true;
      continue;
    }
    try {
      const auto pred_file = load_layout_file(path, ImageGrid{});
      const auto pred = to_visible_layout(pred_file, cfg.camera);
      const auto gt = to_ground_truth(load_layout_file(it->second, pred.grid), cfg.camera);
      rows.push_back({stem, evaluate(pred, gt, cfg.eval_options())});
    } catch (const std::exception& e) {
      err << stem << ": " << e.what() << "\n";
      partial = true;
    }
  }
  for (const auto& [stem, path] : gts) {
    if (!preds.count(stem)) {
      err << "unpaired ground truth: " << path.string() << "\n";
      partial = true;
    }
  }
  out << emit_report_table(rows);
  if (!csv_path.empty()) write_file_atomic(csv_path, emit_report_csv(rows));
  return partial ? kExitPartial : kExitOk;
}

inline int cmd_synth(const std::vector<std::string>& families, int count, std::uint64_t seed,
                     int width, double noise, const fs::path& out_dir, std::ostream& out) {
  const ImageGrid grid = ImageGrid::from_width(width);
  std::vector<RoomFamily> fams;
  for (const auto& f : families) fams.push_back(parse_family(f));
  std::size_t written = 0;
  for (auto fam : fams) {
    for (int k = 0; k < count; ++k) {
      const std::uint64_t s = seed + std::uint64_t(k);
      const auto room = make_fixture(fam, s);
      auto rendered = render_signal(room, grid);
      if (noise > 0.0) rendered.signal = perturb_signal(rendered.signal, noise, s);
      const std::string stem = std::string(to_string(fam)) + "_" + std::to_string(s);
      write_file_atomic(out_dir / "signals" / (stem + ".sig"), emit_signal_file(rendered.signal));
      write_file_atomic(out_dir / "truth" / (stem + ".json"),
                        emit_layout_json(rendered.truth, room.camera_frame_polygon()));
      ++written;
    }
  }
  out << "wrote " << written << " fixtures to " << out_dir.string() << "\n";
  return kExitOk;
}

inline int cmd_render(const RunConfig& cfg, const std::vector<std::string>& inputs,
                      const std::string& truth_path, const fs::path& out_dir, std::ostream& out,
                      std::ostream& err) {
  std::optional<VisibleLayout> truth;
  if (!truth_path.empty()) {
    try {
      truth = to_visible_layout(load_layout_file(truth_path, ImageGrid{}), cfg.camera);
    } catch (const std::exception& e) {
      err << truth_path << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  std::size_t ok = 0;
  for (const auto& in : inputs) {
    const fs::path path(in);
    try {
      const auto layout =
          to_visible_layout(load_layout_file(path, truth ? truth->grid : ImageGrid{}), cfg.camera);
      const std::string stem = path.stem().string();
      for (const auto& fmt : cfg.render_formats) {
        if (fmt == "svg") {
          write_file_atomic(out_dir / (stem + ".svg"),
                            truth ? emit_svg_topdown(layout, *truth) : emit_svg_topdown(layout));
        } else if (fmt == "ply") {
          write_file_atomic(out_dir / (stem + ".ply"), emit_ply(layout));
        }
      }
      ++ok;
    } catch (const std::exception& e) {
      err << in << ": " << e.what() << "\n";
    }
  }
  out << "rendered " << ok << " of " << inputs.size() << " layouts\n";
  return ok == inputs.size() ? kExitOk : kExitPartial;
}

// --- argument parsing ---------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Panoramic room-layout post-processing and evaluation"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides ov;
  app.add_option("--config", config_path,
                 std::string("JSON run config (default: $") + kConfigEnvVar + ")");

  auto add_detect_flags = [&ov](CLI::App* sub) {
    sub->add_option("--mode", ov.mode, "2d_only | 3d_only | ensemble");
    sub->add_option("--peak-threshold", ov.peak_threshold);
    sub->add_option("--peak-min-separation", ov.peak_min_separation, "columns; 0 = width/64");
    sub->add_option("--slope-threshold", ov.slope_threshold, "rad per column");
    sub->add_option("--kink-threshold", ov.kink_threshold, "rad per column^2");
    sub->add_option("--jump-ratio", ov.jump_ratio);
    sub->add_option("--cluster-radius", ov.cluster_radius);
    sub->add_option("--extrema-window", ov.extrema_window);
    sub->add_option("--wall-fit-columns", ov.wall_fit_columns);
  };

  auto* pp = app.add_subcommand("postprocess", "signal files -> layout JSON");
  std::vector<std::string> pp_inputs;
  std::string pp_out;
  pp->add_option("inputs", pp_inputs, "PANOSIG1 signal files")->required();
  pp->add_option("-o,--output", pp_out, "output directory")->required();
  pp->add_option("--camera-height", ov.camera_height, "metres");
  add_detect_flags(pp);

  auto* ev = app.add_subcommand("evaluate", "score predictions against ground truth by stem");
  std::string ev_pred, ev_gt, ev_csv;
  ev->add_option("--pred", ev_pred, "directory of predicted layout JSON")->required();
  ev->add_option("--gt", ev_gt, "directory of ground-truth layout JSON or corner txt")->required();
  ev->add_option("--csv", ev_csv, "also write the report as CSV");
  ev->add_option("--regime", ov.regime, "visible | non_visible");
  ev->add_option("--corner-matching", ov.matching, "hungarian | greedy");
  ev->add_flag("--no-verticals", ov.no_verticals, "exclude vertical edges from the wireframe");
  ev->add_option("--camera-height", ov.camera_height, "metres");

  auto* sy = app.add_subcommand("synth", "generate fixture signals and ground truth");
  std::vector<std::string> sy_families;
  int sy_count = 1, sy_width = 1024;
  std::uint64_t sy_seed = 0;
  double sy_noise = 0.0;
  std::string sy_out;
  sy->add_option("--family", sy_families, "square rectangle pentagon hexagon l_room t_room")->required();
  sy->add_option("--count", sy_count, "fixtures per family")->check(CLI::PositiveNumber);
  sy->add_option("--seed", sy_seed, "first seed");
  sy->add_option("--width", sy_width, "panorama width")->check(CLI::Range(4, 1 << 16));
  sy->add_option("--noise", sy_noise, "boundary noise sigma (rad)")->check(CLI::NonNegativeNumber);
  sy->add_option("-o,--output", sy_out, "output directory")->required();

  auto* re = app.add_subcommand("render", "layout files -> SVG floor plan / PLY mesh");
  std::vector<std::string> re_inputs;
  std::string re_truth, re_out;
  re->add_option("inputs", re_inputs, "layout JSON or corner txt files")->required();
  re->add_option("--truth", re_truth, "ground-truth layout drawn under a single input");
  re->add_option("-o,--output", re_out, "output directory")->required();
  re->add_option("--camera-height", ov.camera_height, "metres");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = resolve_config(config_path, ov);
  } catch (const std::exception& e) {
    err << "config: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*pp) return cmd_postprocess(cfg, pp_inputs, pp_out, out, err);
    if (*ev) return cmd_evaluate(cfg, ev_pred, ev_gt, ev_csv, out, err);
    if (*sy) {
      for (const auto& f : sy_families) parse_family(f);
      return cmd_synth(sy_families, sy_count, sy_seed, sy_width, sy_noise, sy_out, out);
    }
    if (*re) {
      if (!re_truth.empty() && re_inputs.size() != 1) {
        err << "--truth needs exactly one input layout\n";
        return kExitUsage;
      }
      return cmd_render(cfg, re_inputs, re_truth, re_out, out, err);
    }
  } catch (const InputError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitPartial;
  }
  return kExitUsage;
}

}  // namespace panolayout::cli
