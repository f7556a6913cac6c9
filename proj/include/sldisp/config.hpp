#pragma once

// Pipeline configuration (JSON). Angles are kept in degrees exactly as read so
// that save/load round-trips bit-for-bit.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sldisp/camera_geometry.hpp"
#include "sldisp/feature_tracking.hpp"
#include "sldisp/image.hpp"

namespace sldisp {

struct PipelineConfig {
  Intrinsics intrinsics;
  JigGeometry jig;
  double initial_pitch_deg = 0.0;  // inclinometer reading
  double initial_yaw_deg = 0.0;
  int min_blob_area = 5;
  TrackingConfig tracking;
  std::optional<Rect> roi;  // tracking region in frame 0; derived from the spots when absent
  double fps = 30.0;
  std::uint64_t seed = 0;

  PoseAngles initial_angles() const {
    return PoseAngles::from_degrees(initial_pitch_deg, initial_yaw_deg);
  }

  /// Throws ValidationError naming the offending field.
  void validate() const;

  bool operator==(const PipelineConfig& other) const;
};

PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const PipelineConfig& config);
void save_config(const std::filesystem::path& path, const PipelineConfig& config);

}  // namespace sldisp
