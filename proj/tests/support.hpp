#pragma once

// Scene builders and independent reference computations shared by the unit
// tests and the acceptance runner.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "sldisp/camera_geometry.hpp"
#include "sldisp/scene_simulator.hpp"
#include "sldisp/spot_detection.hpp"

namespace sldisp::testkit {

// Laser beams ride with the plane: each leaves the camera plane at
// R (+-a, +-a, 0) along R e_z and meets the plane n . X = D, n = R e_z.
inline SpotQuad ray_plane_quad(const Intrinsics& K, const JigGeometry& jig, double pitch,
                               double yaw) {
  const Eigen::Matrix3d R = rotation_from_angles<double>(pitch, yaw);
  const Eigen::Vector3d n = R.col(2);
  const double a = 0.5 * jig.side_length;
  const double offsets[4][2] = {{-a, a}, {a, a}, {a, -a}, {-a, -a}};
  SpotQuad quad;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d origin = R * Eigen::Vector3d(offsets[i][0], offsets[i][1], 0.0);
    const Eigen::Vector3d dir = R.col(2);
    const double t = (jig.distance - n.dot(origin)) / n.dot(dir);
    const Eigen::Vector3d X = origin + t * dir;
    quad(0, i) = K.cx + K.fx * X.x() / X.z();
    quad(1, i) = K.cy + K.fy * X.y() / X.z();
  }
  return quad;
}

// Exhaustive between-class variance scan in exact integer arithmetic
// (Otsu score scaled by N^2, compared as fractions). Ties keep the smaller t.
inline int otsu_oracle_exact(const Histogram& h) {
  using i128 = __int128;
  i128 N = 0, S = 0;
  for (int i = 0; i < 256; ++i) {
    N += h[i];
    S += static_cast<i128>(i) * h[i];
  }
  int best = 0;
  i128 best_num = 0, best_den = 1;
  i128 n = 0, s = 0;
  for (int t = 0; t < 256; ++t) {
    n += h[t];
    s += static_cast<i128>(t) * h[t];
    if (n == 0 || n == N) continue;
    const i128 d = N * s - n * S;
    const i128 num = d * d, den = n * (N - n);
    if (num * best_den > best_num * den) {
      best = t;
      best_num = num;
      best_den = den;
    }
  }
  return best;
}

// Same scan through class weights and means in long double; for images too
// large for the exact variant.
inline int otsu_oracle_means(const Histogram& h) {
  long double N = 0;
  for (auto c : h) N += c;
  int best = 0;
  long double best_var = 0;
  for (int t = 0; t < 256; ++t) {
    long double n0 = 0, m0 = 0, n1 = 0, m1 = 0;
    for (int i = 0; i <= t; ++i) {
      n0 += h[i];
      m0 += static_cast<long double>(i) * h[i];
    }
    for (int i = t + 1; i < 256; ++i) {
      n1 += h[i];
      m1 += static_cast<long double>(i) * h[i];
    }
    if (n0 == 0 || n1 == 0) continue;
    m0 /= n0;
    m1 /= n1;
    const long double var = (n0 / N) * (n1 / N) * (m0 - m1) * (m0 - m1);
    if (var > best_var * (1 + 1e-15L)) {
      best = t;
      best_var = var;
    }
  }
  return best;
}

inline GrayImage flat_tile(double level) { return make_value_noise_texture(4, 4, level, 0.0, 0); }

// Spots only, on a flat background.
inline SceneSpec spot_scene(const Intrinsics& K, const JigGeometry& jig, const PoseAngles& pose,
                            double sigma, int width = 1920, int height = 1080) {
  SceneSpec spec;
  spec.K = K;
  spec.jig = jig;
  spec.pose = pose;
  spec.width = width;
  spec.height = height;
  spec.background = 20.0;
  spec.texture = flat_tile(spec.background);
  spec.spot_sigma = sigma;
  spec.spot_peak = 210.0;
  spec.motion_mm = {0.0};
  return spec;
}

// spot_scene with the principal point moved so the quad centroid lands
// mid-canvas; large angles would otherwise throw spots off the sensor.
inline SceneSpec centered_spot_scene(const Intrinsics& K, const JigGeometry& jig,
                                     const PoseAngles& pose, double sigma, int width = 1920,
                                     int height = 1080) {
  const SpotQuad q = project_points(jig, K, rotation_from_angles(pose));
  Intrinsics shifted = K;
  shifted.cx += width / 2.0 - q.row(0).mean();
  shifted.cy += height / 2.0 - q.row(1).mean();
  return spot_scene(shifted, jig, pose, sigma, width, height);
}

// Plane facing the camera, textured everywhere, so a plane offset of
// s * D / fy is an exact image shift of s pixels.
inline SceneSpec texture_scene(int width, int height, std::uint64_t seed) {
  SceneSpec spec;
  spec.K = {800.0, 800.0, width / 2.0, height / 2.0};
  spec.jig = {0.2, 2.0};
  spec.width = width;
  spec.height = height;
  spec.background = 120.0;
  spec.texture = make_value_noise_texture(256, 4, 120.0, 120.0, seed);
  spec.mm_per_texel = 2.0;
  spec.texture_extent = 0.0;
  spec.spot_peak = 250.0;
  spec.spot_sigma = 1.0;
  spec.motion_mm = {0.0};
  return spec;
}

// Texture-only frame with a vertical image shift. The principal point is
// moved so the laser quad lands far outside the canvas; the plane is
// fronto-parallel and tiled, so this only selects another texture window.
inline GrayImage shifted_texture(int width, int height, double shift_px, std::uint64_t seed = 3) {
  SceneSpec spec = texture_scene(width, height, seed);
  spec.K.cx = width / 2.0 + 5000.0;
  spec.motion_mm = {0.0, shift_px * spec.jig.distance / spec.K.fy * 1000.0};
  return render_frame(spec, 1).image;
}

}  // namespace sldisp::testkit
