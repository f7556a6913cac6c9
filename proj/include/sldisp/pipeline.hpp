#pragma once

// End-to-end measurement: laser spots in frame 0 -> camera attitude ->
// tilt-corrected scale factor -> tracked vertical displacement.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sldisp/config.hpp"
#include "sldisp/csv.hpp"
#include "sldisp/feature_tracking.hpp"
#include "sldisp/pose_calibration.hpp"

namespace sldisp {

struct CalibrationReport {
  SpotQuad spots;                  // detected in frame 0, laser order
  CalibrationResult calibration;
  ScaleFactor scale;
  Rect roi;
  int frames = 0;
  int features = 0;                // seeded in frame 0
};

struct PipelineResult {
  CalibrationReport report;
  DisplacementSeries series;
};

/// Sorted *.pgm files of a directory.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Central region of the laser quad, half its width and height, clipped to
/// the image. It stays clear of the spots themselves.
Rect default_roi(const SpotQuad& quad, int width, int height);

/// Angles, scale factor and tracking ROI from the first frame.
CalibrationReport calibrate_from_frame(const PipelineConfig& config, const GrayImage& frame0);

PipelineResult run_pipeline(const PipelineConfig& config, std::span<const GrayImage> frames);

/// Streams the frames of `frames_dir`; writes the series to `output_csv` and,
/// when `report_json` is non-empty, the calibration report.
PipelineResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& frames_dir,
                            const std::filesystem::path& output_csv,
                            const std::filesystem::path& report_json = {});

/// frame,time_s,mean_dv_px,displacement_mm
CsvTable series_table(const DisplacementSeries& series);

std::string report_to_json(const CalibrationReport& report);

}  // namespace sldisp
