#include "sldisp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

#include "json.hpp"
#include "sldisp/spot_detection.hpp"

namespace sldisp {

namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  }
}

}  // namespace

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") frames.push_back(entry.path());
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

Rect default_roi(const SpotQuad& quad, int width, int height) {
  const Eigen::Vector2d lo = quad.rowwise().minCoeff(), hi = quad.rowwise().maxCoeff();
  const Eigen::Vector2d center = 0.5 * (lo + hi);
  const Eigen::Vector2d half = 0.25 * (hi - lo);
  const int x0 = std::max(0, static_cast<int>(std::ceil(center.x() - half.x())));
  const int y0 = std::max(0, static_cast<int>(std::ceil(center.y() - half.y())));
  const int x1 = std::min(width - 1, static_cast<int>(std::floor(center.x() + half.x())));
  const int y1 = std::min(height - 1, static_cast<int>(std::floor(center.y() + half.y())));
  if (x1 < x0 || y1 < y0) {
    throw Error(ErrorCode::DegenerateQuad, "laser quad leaves no tracking region inside the image");
  }
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

CalibrationReport calibrate_from_frame(const PipelineConfig& config, const GrayImage& frame0) {
  config.validate();
  CalibrationReport report;
  report.spots = stage("detect", [&] { return detect_spots(frame0, config.min_blob_area); });
  report.calibration = stage("calibrate", [&] {
    CalibrationResult r =
        calibrate_angles(report.spots, config.intrinsics, config.jig, config.initial_angles());
    if (!r.converged) {
      throw Error(ErrorCode::DidNotConverge,
                  "no convergence after " + std::to_string(r.iterations) + " iterations");
    }
    return r;
  });
  report.scale = stage("scale", [&] {
    // Pixel distance of the model quad at the recovered attitude: the
    // least-squares fit averages detection noise over all eight coordinates.
    const SpotQuad model = project_points(config.jig, config.intrinsics,
                                          rotation_from_angles(report.calibration.angles));
    return scale_factor_tilted(config.jig, measure_pixel_distance(model),
                               report.calibration.angles.pitch);
  });
  report.roi = stage("track", [&] {
    if (config.roi) {
      if (!config.roi->inside(frame0.width(), frame0.height())) {
        throw Error(ErrorCode::ValidationError, "tracker.roi lies outside the frame");
      }
      return *config.roi;
    }
    return default_roi(report.spots, frame0.width(), frame0.height());
  });
  return report;
}

namespace {

PipelineResult track_frames(const PipelineConfig& config, int count,
                            const std::function<GrayImage(int)>& frame_at) {
  if (count < 2) {
    throw Error(ErrorCode::PreconditionFailed,
                "pipeline needs at least 2 frames, got " + std::to_string(count));
  }
  const GrayImage first = frame_at(0);
  PipelineResult result;
  result.report = calibrate_from_frame(config, first);
  result.report.frames = count;
  stage("track", [&] {
    DisplacementTracker tracker(first, result.report.roi, result.report.scale, config.fps,
                                config.tracking);
    result.report.features = static_cast<int>(tracker.features().size());
    for (int k = 1; k < count; ++k) tracker.push(frame_at(k));
    result.series = tracker.series();
    return 0;
  });
  return result;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, std::span<const GrayImage> frames) {
  return track_frames(config, static_cast<int>(frames.size()),
                      [&](int k) { return frames[static_cast<std::size_t>(k)]; });
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& frames_dir,
                            const std::filesystem::path& output_csv,
                            const std::filesystem::path& report_json) {
  const auto files = stage("load", [&] { return list_frames(frames_dir); });
  PipelineResult result = track_frames(config, static_cast<int>(files.size()), [&](int k) {
    return stage("load", [&] { return read_pgm(files[static_cast<std::size_t>(k)]); });
  });
  stage("write", [&] {
    series_table(result.series).write(output_csv);
    if (!report_json.empty()) {
      std::ofstream out(report_json, std::ios::binary);
      if (!out) throw Error(ErrorCode::IoError, "cannot write " + report_json.string());
      out << report_to_json(result.report);
    }
    return 0;
  });
  return result;
}

CsvTable series_table(const DisplacementSeries& series) {
  CsvTable table({"frame", "time_s", "mean_dv_px", "displacement_mm"});
  for (const DisplacementSample& s : series.samples) {
    table.add_row({std::to_string(s.frame), format_fixed(s.time, 6), format_fixed(s.mean_dv, 6),
                   format_fixed(s.displacement, 6)});
  }
  return table;
}

std::string report_to_json(const CalibrationReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json spots = nlohmann::ordered_json::array();
  for (int i = 0; i < 4; ++i) spots.push_back({report.spots(0, i), report.spots(1, i)});
  j["spots_px"] = spots;
  j["pitch_deg"] = rad_to_deg(report.calibration.angles.pitch);
  j["yaw_deg"] = rad_to_deg(report.calibration.angles.yaw);
  j["rms_residual_px"] = report.calibration.rms_residual;
  j["iterations"] = report.calibration.iterations;
  j["converged"] = report.calibration.converged;
  j["pixel_distance_px"] = report.scale.pixel_distance;
  j["scale_factor_mm_per_px"] = report.scale.value;
  j["roi"] = {report.roi.x, report.roi.y, report.roi.width, report.roi.height};
  j["frames"] = report.frames;
  j["features"] = report.features;
  return j.dump(2) + "\n";
}

}  // namespace sldisp
