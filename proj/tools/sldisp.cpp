// Command line front end. Every subcommand prints "error: <Name>: <message>"
// on failure and exits with the code of the error family.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sldisp/alignment.hpp"
#include "sldisp/config.hpp"
#include "sldisp/csv.hpp"
#include "sldisp/pipeline.hpp"
#include "sldisp/pose_calibration.hpp"
#include "sldisp/scale_factor.hpp"
#include "sldisp/scene_simulator.hpp"
#include "sldisp/spot_detection.hpp"

namespace fs = std::filesystem;
using namespace sldisp;

namespace {

void emit(const CsvTable& table, const std::string& out_path) {
  if (out_path.empty()) {
    table.write(std::cout);
  } else {
    table.write(fs::path(out_path));
  }
}

std::optional<PipelineConfig> maybe_config(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_config(path);
}

Rect parse_roi(const std::vector<int>& v) {
  if (v.size() != 4) throw Error(ErrorCode::ValidationError, "--roi takes x y width height");
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vision-based vertical displacement measurement with a four-laser jig"};
  app.require_subcommand(1);

  // simulate
  std::string scene_path, sim_out;
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic frame sequence");
  simulate->add_option("--scene", scene_path, "Scene JSON")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();

  // detect
  std::string detect_image, detect_out;
  int detect_min_area = 5;
  auto* detect = app.add_subcommand("detect", "Locate the four laser spots in a PGM frame");
  detect->add_option("--image", detect_image, "PGM frame")->required();
  detect->add_option("--min-blob-area", detect_min_area, "Smallest accepted blob, px")
      ->capture_default_str();
  detect->add_option("--out", detect_out, "CSV output (stdout when omitted)");

  // calibrate
  std::string cal_config, cal_image, cal_spots, cal_out;
  auto* calibrate = app.add_subcommand("calibrate", "Recover pitch and yaw from the laser spots");
  calibrate->add_option("--config", cal_config, "Pipeline config JSON")->required();
  auto* cal_image_opt = calibrate->add_option("--image", cal_image, "PGM frame");
  auto* cal_spots_opt = calibrate->add_option("--spots", cal_spots, "Spot CSV (index,u,v)");
  cal_image_opt->excludes(cal_spots_opt);
  calibrate->add_option("--out", cal_out, "CSV output (stdout when omitted)");

  // scale-study
  ScaleStudyOptions study;
  std::string study_config, study_out;
  auto* scale_study =
      app.add_subcommand("scale-study", "Monte-Carlo error of the tilt-corrected scale factor");
  scale_study->add_option("--seed", study.seed)->capture_default_str();
  scale_study->add_option("--sigma", study.noise_sigma, "Spot noise, px")->capture_default_str();
  scale_study->add_option("--trials", study.trials)->capture_default_str();
  scale_study->add_option("--pitches", study.pitches_deg, "Pitch grid, deg");
  scale_study->add_option("--yaws", study.yaws_deg, "Yaw grid, deg");
  scale_study->add_option("--config", study_config, "Take intrinsics and jig from a config");
  scale_study->add_option("--out", study_out, "CSV output (stdout when omitted)");

  // align-study
  double align_pitch = 10.0, align_yaw = 10.0, d_min = 0.5, d_max = 20.0, d_step = 0.5;
  std::string align_config, align_out;
  auto* align_study =
      app.add_subcommand("align-study", "Spot displacement caused by a tilted screen vs distance");
  align_study->add_option("--pitch", align_pitch, "Screen tilt pitch, deg")->capture_default_str();
  align_study->add_option("--yaw", align_yaw, "Screen tilt yaw, deg")->capture_default_str();
  align_study->add_option("--min-distance", d_min, "m")->capture_default_str();
  align_study->add_option("--max-distance", d_max, "m")->capture_default_str();
  align_study->add_option("--step", d_step, "m")->capture_default_str();
  align_study->add_option("--config", align_config, "Take intrinsics and jig from a config");
  align_study->add_option("--out", align_out, "CSV output (stdout when omitted)");

  // track
  std::string track_frames_dir, track_config, track_out;
  double track_scale = 0.0, track_fps = 30.0;
  std::vector<int> track_roi;
  auto* track = app.add_subcommand("track", "Track texture motion with a known scale factor");
  track->add_option("--frames", track_frames_dir, "Directory of PGM frames")->required();
  track->add_option("--scale", track_scale, "Scale factor, mm/px")->required();
  track->add_option("--roi", track_roi, "x y width height (default: central half of frame)")
      ->expected(4);
  track->add_option("--fps", track_fps)->capture_default_str();
  track->add_option("--config", track_config, "Tracker settings from a config");
  track->add_option("--out", track_out, "CSV output (stdout when omitted)");

  // pipeline
  std::string pipe_config, pipe_frames, pipe_out, pipe_report;
  auto* pipeline = app.add_subcommand("pipeline", "Detect, calibrate, scale and track");
  pipeline->add_option("--config", pipe_config, "Pipeline config JSON")->required();
  pipeline->add_option("--frames", pipe_frames, "Directory of PGM frames")->required();
  pipeline->add_option("--out", pipe_out, "Displacement CSV")->required();
  pipeline->add_option("--report", pipe_report, "Calibration report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) {
      const SceneSpec spec = load_scene(scene_path);
      render_sequence(spec, sim_out);
    } else if (*detect) {
      emit(spot_table(detect_spots(read_pgm(detect_image), detect_min_area)), detect_out);
    } else if (*calibrate) {
      const PipelineConfig cfg = load_config(cal_config);
      SpotQuad spots;
      if (!cal_spots.empty()) {
        spots = read_spot_table(cal_spots);
      } else if (!cal_image.empty()) {
        spots = detect_spots(read_pgm(cal_image), cfg.min_blob_area);
      } else {
        throw Error(ErrorCode::ValidationError, "calibrate needs --image or --spots");
      }
      const CalibrationResult r =
          calibrate_angles(spots, cfg.intrinsics, cfg.jig, cfg.initial_angles());
      CsvTable table({"pitch_deg", "yaw_deg", "rms_residual_px", "converged"});
      table.add_row({format_fixed(rad_to_deg(r.angles.pitch), 6),
                     format_fixed(rad_to_deg(r.angles.yaw), 6), format_fixed(r.rms_residual, 6),
                     r.converged ? "true" : "false"});
      emit(table, cal_out);
      if (!r.converged) {
        throw Error(ErrorCode::DidNotConverge,
                    "no convergence after " + std::to_string(r.iterations) + " iterations");
      }
    } else if (*scale_study) {
      const auto cfg = maybe_config(study_config);
      const ErrorGrid grid = scale_error_grid(cfg ? cfg->intrinsics : default_intrinsics(),
                                              cfg ? cfg->jig : default_jig(), study);
      std::vector<std::string> header{"yaw_deg"};
      for (double p : grid.pitches_deg) header.push_back(format_fixed(p, 1));
      CsvTable table(header);
      for (std::size_t r = 0; r < grid.yaws_deg.size(); ++r) {
        std::vector<std::string> row{format_fixed(grid.yaws_deg[r], 1)};
        for (std::size_t c = 0; c < grid.pitches_deg.size(); ++c) {
          row.push_back(format_fixed(
              grid.error_percent(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), 6));
        }
        table.add_row(row);
      }
      emit(table, study_out);
    } else if (*align_study) {
      const auto cfg = maybe_config(align_config);
      if (!(d_step > 0.0) || !(d_max >= d_min)) {
        throw Error(ErrorCode::ValidationError, "distance range must be ascending with step > 0");
      }
      std::vector<double> distances;
      const int n = static_cast<int>(std::floor((d_max - d_min) / d_step + 1e-9)) + 1;
      for (int i = 0; i < n; ++i) distances.push_back(d_min + i * d_step);
      const auto curve = alignment_error_curve(
          cfg ? cfg->intrinsics : default_intrinsics(), cfg ? cfg->jig.side_length : default_jig().side_length,
          deg_to_rad(align_pitch), deg_to_rad(align_yaw), distances);
      CsvTable table({"distance_m", "mean_error_px"});
      for (const auto& p : curve) {
        table.add_row({format_fixed(p.distance, 6), format_fixed(p.mean_positional_error, 6)});
      }
      emit(table, align_out);
    } else if (*track) {
      if (!(track_scale > 0.0)) throw Error(ErrorCode::ValidationError, "--scale must be positive");
      const auto cfg = maybe_config(track_config);
      const auto files = list_frames(track_frames_dir);
      if (files.size() < 2) {
        throw Error(ErrorCode::PreconditionFailed, "track needs at least 2 frames");
      }
      const GrayImage first = read_pgm(files.front());
      Rect roi{first.width() / 4, first.height() / 4, first.width() / 2, first.height() / 2};
      if (!track_roi.empty()) {
        roi = parse_roi(track_roi);
      } else if (cfg && cfg->roi) {
        roi = *cfg->roi;
      }
      ScaleFactor sf;
      sf.value = track_scale;
      const bool fps_given = track->get_option("--fps")->count() > 0;
      DisplacementTracker tracker(first, roi, sf, cfg && !fps_given ? cfg->fps : track_fps,
                                  cfg ? cfg->tracking : TrackingConfig{});
      for (std::size_t k = 1; k < files.size(); ++k) tracker.push(read_pgm(files[k]));
      emit(series_table(tracker.series()), track_out);
    } else if (*pipeline) {
      run_pipeline(load_config(pipe_config), pipe_frames, pipe_out, pipe_report);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
