#include "sldisp/scale_factor.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <random>

#include "sldisp/pose_calibration.hpp"

namespace sldisp {

ScaleFactor scale_factor_parallel(const JigGeometry& jig, double pixel_distance) {
  if (!(pixel_distance > 0.0) || !std::isfinite(pixel_distance)) {
    throw Error(ErrorCode::NonPositivePixelDistance, "pixel distance must be positive");
  }
  return {jig.side_length * 1000.0 / pixel_distance, 0.0, pixel_distance};
}

ScaleFactor scale_factor_tilted(const JigGeometry& jig, double pixel_distance, double pitch) {
  if (!(pixel_distance > 0.0) || !std::isfinite(pixel_distance)) {
    throw Error(ErrorCode::NonPositivePixelDistance, "pixel distance must be positive");
  }
  if (!(std::abs(pitch) < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::PitchOutOfRange, "pitch must lie in (-90, 90) degrees");
  }
  return {jig.side_length * 1000.0 / (pixel_distance * std::cos(pitch)), pitch, pixel_distance};
}

double measure_pixel_distance(const SpotQuad& quad) {
  if (is_degenerate(quad)) throw Error(ErrorCode::DegenerateQuad, "laser quad is degenerate");
  const double left = std::abs(quad(1, 0) - quad(1, 3));
  const double right = std::abs(quad(1, 1) - quad(1, 2));
  return 0.5 * (left + right);
}

double reference_scale_factor(const Intrinsics& K, const JigGeometry& jig,
                              const PoseAngles& angles) {
  const double depth = rotation_from_angles(angles)(2, 2) * jig.distance;
  if (!(depth > 0.0)) throw Error(ErrorCode::NonPositiveDepth, "plane center behind the camera");
  return depth * 1000.0 / K.fy;
}

double mean_relative_error_percent(std::span<const double> target,
                                   std::span<const double> proposed) {
  if (target.size() != proposed.size() || target.empty()) {
    throw Error(ErrorCode::InvalidArgument, "error aggregation needs equal, non-empty samples");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    sum += std::abs((target[i] - proposed[i]) / target[i]);
  }
  return 100.0 * sum / static_cast<double>(target.size());
}

double ErrorGrid::at(double pitch_deg, double yaw_deg) const {
  for (std::size_t r = 0; r < yaws_deg.size(); ++r) {
    for (std::size_t c = 0; c < pitches_deg.size(); ++c) {
      if (yaws_deg[r] == yaw_deg && pitches_deg[c] == pitch_deg) {
        return error_percent(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  throw Error(ErrorCode::InvalidArgument, "no such grid cell");
}

namespace {

double cell_error(const Intrinsics& K, const JigGeometry& jig, const PoseAngles& truth,
                  const ScaleStudyOptions& options, std::uint64_t cell_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                    static_cast<std::uint32_t>(options.seed >> 32),
                    static_cast<std::uint32_t>(cell_index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> pixel_noise(0.0, options.noise_sigma);
  std::normal_distribution<double> inclinometer(0.0, deg_to_rad(options.initial_error_deg));

  const SpotQuad clean = project_points(jig, K, rotation_from_angles(truth));
  const double target = reference_scale_factor(K, jig, truth);

  std::vector<double> targets(static_cast<std::size_t>(options.trials), target);
  std::vector<double> proposed;
  proposed.reserve(targets.size());
  for (int trial = 0; trial < options.trials; ++trial) {
    SpotQuad detected = clean;
    if (options.noise_sigma > 0.0) {
      for (Eigen::Index i = 0; i < detected.size(); ++i) detected.data()[i] += pixel_noise(rng);
    }
    PoseAngles initial = truth;
    if (options.initial_error_deg > 0.0) {
      initial.pitch += inclinometer(rng);
      initial.yaw += inclinometer(rng);
    }
    const CalibrationResult fit = calibrate_angles(detected, K, jig, initial);
    if (!fit.converged) {
      throw Error(ErrorCode::DidNotConverge, "calibration did not converge in scale study");
    }
    const SpotQuad model = project_points(jig, K, rotation_from_angles(fit.angles));
    proposed.push_back(
        scale_factor_tilted(jig, measure_pixel_distance(model), fit.angles.pitch).value);
  }
  return mean_relative_error_percent(targets, proposed);
}

}  // namespace

ErrorGrid scale_error_grid(const Intrinsics& K, const JigGeometry& jig,
                           const ScaleStudyOptions& options) {
  K.validate();
  jig.validate();
  if (options.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  if (!(options.noise_sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise sigma must be non-negative");
  }

  ErrorGrid grid;
  grid.pitches_deg = options.pitches_deg;
  grid.yaws_deg = options.yaws_deg;
  grid.trials = options.trials;
  const auto rows = static_cast<Eigen::Index>(options.yaws_deg.size());
  const auto cols = static_cast<Eigen::Index>(options.pitches_deg.size());
  grid.error_percent.resize(rows, cols);

  std::vector<std::future<double>> cells;
  cells.reserve(static_cast<std::size_t>(rows * cols));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const PoseAngles truth = PoseAngles::from_degrees(options.pitches_deg[c], options.yaws_deg[r]);
      const auto index = static_cast<std::uint64_t>(r * cols + c);
      cells.push_back(std::async(std::launch::async, [&, truth, index] {
        return cell_error(K, jig, truth, options, index);
      }));
    }
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      grid.error_percent(r, c) = cells[static_cast<std::size_t>(r * cols + c)].get();
    }
  }
  return grid;
}

}  // namespace sldisp
