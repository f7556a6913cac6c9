#pragma once

// Synthetic stand-in for the jig looking at a moving structure: a textured
// plane seen through the exact plane-to-image homography, plus four Gaussian
// laser spots that ride with the camera.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sldisp/camera_geometry.hpp"
#include "sldisp/image.hpp"

namespace sldisp {

/// Periodic value-noise tile: random lattice values every `cell` texels,
/// smoothstep-interpolated, spanning mean +- contrast / 2. `size` must be a
/// multiple of `cell`.
GrayImage make_value_noise_texture(int size, int cell, double mean, double contrast,
                                   std::uint64_t seed);

struct SceneSpec {
  Intrinsics K = default_intrinsics();
  int width = 1920;
  int height = 1080;
  JigGeometry jig = default_jig();
  PoseAngles pose;

  GrayImage texture;             // tiled over the plane
  double mm_per_texel = 2.0;
  double texture_extent = 0.0;   // side of the textured square on the plane, m; <= 0 tiles everywhere

  double spot_sigma = 2.5;       // px
  double spot_peak = 220.0;      // added intensity at a spot center
  double background = 30.0;      // plane intensity outside the texture
  double noise_sigma = 0.0;      // i.i.d. pixel noise, gray levels

  std::vector<double> motion_mm;  // vertical offset per frame
  double fps = 30.0;
  std::uint64_t seed = 0;

  int frame_count() const { return static_cast<int>(motion_mm.size()); }
  void validate() const;
};

struct GroundTruth {
  int frame = 0;
  double time = 0.0;             // s
  double displacement_mm = 0.0;
  SpotQuad spots;                // exact projections of the laser points
  double roi_dv_px = 0.0;        // image motion of the plane center
};

struct RenderedFrame {
  GrayImage image;
  GroundTruth truth;
};

/// Renders one frame. The plane is shifted by the frame's offset along the
/// camera's vertical axis, so every plane point moves by fy * offset / depth
/// pixels while the spots stay put.
RenderedFrame render_frame(const SceneSpec& spec, int frame_index);

/// File name of a frame inside a sequence directory (1-based numbering).
std::string frame_file_name(int frame_index);

/// Writes frame_000001.pgm..., truth.csv and spots.csv into `out_dir`.
std::vector<GroundTruth> render_sequence(const SceneSpec& spec,
                                         const std::filesystem::path& out_dir);

// Motion profiles. Frame 0 is always at rest.
std::vector<double> sinusoid_motion(double amplitude_mm, double frequency_hz, double fps,
                                    int frames);
std::vector<double> ramp_motion(double step_mm, int frames);

/// Scene description from JSON text; unknown keys are rejected.
SceneSpec parse_scene(const std::string& json_text);
SceneSpec load_scene(const std::filesystem::path& path);

}  // namespace sldisp
