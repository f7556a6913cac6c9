#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sldisp/camera_geometry.hpp"

namespace sldisp {

struct ScaleFactor {
  double value = 0.0;           // mm per pixel
  double pitch_used = 0.0;      // rad
  double pixel_distance = 0.0;  // px
};

/// Ts / pixel distance, for an image plane parallel to the structure.
ScaleFactor scale_factor_parallel(const JigGeometry& jig, double pixel_distance);

/// Ts / (pixel distance * cos(pitch)). Yaw does not enter: only vertical
/// displacement is scaled.
ScaleFactor scale_factor_tilted(const JigGeometry& jig, double pixel_distance, double pitch);

/// Mean vertical (v) separation of the two vertical laser pairs P1-P4 and
/// P2-P3. Throws DegenerateQuad for degenerate quads.
double measure_pixel_distance(const SpotQuad& quad);

/// Exact mm-per-pixel for vertical camera-frame motion of the plane point on
/// the optical axis of the jig: depth / fy.
double reference_scale_factor(const Intrinsics& K, const JigGeometry& jig,
                              const PoseAngles& angles);

/// 100 / N * sum |(target - proposed) / target|.
double mean_relative_error_percent(std::span<const double> target,
                                   std::span<const double> proposed);

struct ScaleStudyOptions {
  std::vector<double> pitches_deg{0, 10, 20, 30, 40, 50};
  std::vector<double> yaws_deg{0, 10, 20, 30, 40, 50};
  double noise_sigma = 0.5;  // px, i.i.d. on every detected coordinate
  int trials = 100;
  std::uint64_t seed = 0;
  /// Spread of the simulated inclinometer reading used as the initial guess.
  double initial_error_deg = 1.0;
};

struct ErrorGrid {
  std::vector<double> pitches_deg;
  std::vector<double> yaws_deg;
  Eigen::MatrixXd error_percent;  // rows: yaw, columns: pitch
  int trials = 0;

  double at(double pitch_deg, double yaw_deg) const;
};

/// Monte-Carlo comparison of the tilt-corrected scale factor against the
/// ground-truth scale factor. Every cell draws from its own random stream
/// (seed, cell index), so the grid does not depend on evaluation order.
ErrorGrid scale_error_grid(const Intrinsics& K, const JigGeometry& jig,
                           const ScaleStudyOptions& options = {});

}  // namespace sldisp
