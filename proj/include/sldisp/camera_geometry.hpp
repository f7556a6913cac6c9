#pragma once

// Pinhole model of the four-laser jig.
//
// Camera frame: x right, y down (image v), z along the optical axis. The four
// laser points sit at (+-Ts/2, +-Ts/2, D) and are always stored in the order
//   P1 = (-Ts/2, +Ts/2), P2 = (+Ts/2, +Ts/2), P3 = (+Ts/2, -Ts/2), P4 = (-Ts/2, -Ts/2)
// as the four columns of a 2x4 matrix.
//
// The projection routines are templated on the scalar type so that the same
// code path can be evaluated with Eigen::AutoDiffScalar.

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "sldisp/errors.hpp"

namespace sldisp {

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Four image points, one per column, in laser order P1..P4.
template <typename Scalar>
using SpotQuadT = Eigen::Matrix<Scalar, 2, 4>;
using SpotQuad = SpotQuadT<double>;

using RotationMatrix = Eigen::Matrix3d;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Throws ValidationError unless fx, fy > 0 and cx, cy are finite.
  void validate() const;

  /// True when fx and fy agree to 1e-6 relative, as required by the
  /// single-focal-length tilt analysis.
  bool has_square_pixels() const { return std::abs(fx - fy) / fx < 1e-6; }

  template <typename Scalar = double>
  Matrix3<Scalar> matrix() const {
    Matrix3<Scalar> K;
    // clang-format off
    K << Scalar(fx), Scalar(0),  Scalar(cx),
         Scalar(0),  Scalar(fy), Scalar(cy),
         Scalar(0),  Scalar(0),  Scalar(1);
    // clang-format on
    return K;
  }
};

/// Camera attitude relative to the target plane. Radians; roll is always zero.
struct PoseAngles {
  double pitch = 0.0;
  double yaw = 0.0;

  static PoseAngles from_degrees(double pitch_deg, double yaw_deg) {
    return {deg_to_rad(pitch_deg), deg_to_rad(yaw_deg)};
  }

  bool is_valid() const {
    constexpr double half_pi = std::numbers::pi / 2.0;
    return std::isfinite(pitch) && std::isfinite(yaw) && std::abs(pitch) < half_pi &&
           std::abs(yaw) < half_pi;
  }
};

struct JigGeometry {
  double side_length = 0.0;  // Ts, meters
  double distance = 0.0;     // D, meters

  void validate() const;

  double half_side() const { return 0.5 * side_length; }

  /// Homogeneous laser points on the plane, one per column, in P1..P4 order.
  Eigen::Matrix4d world_points() const {
    const double h = half_side();
    Eigen::Matrix4d X;
    // clang-format off
    X << -h,        h,        h,       -h,
          h,        h,       -h,       -h,
          distance, distance, distance, distance,
          1.0,      1.0,      1.0,      1.0;
    // clang-format on
    return X;
  }
};

/// Rotation with zero roll, pitch about x and yaw about y:
///
///   [ cos(y)          0       sin(y)        ]
///   [ sin(p) sin(y)   cos(p) -sin(p) cos(y) ]
///   [-cos(p) sin(y)   sin(p)  cos(p) cos(y) ]
template <typename Scalar>
Matrix3<Scalar> rotation_from_angles(const Scalar& pitch, const Scalar& yaw) {
  using std::cos;
  using std::sin;
  const Scalar cp = cos(pitch), sp = sin(pitch);
  const Scalar cy = cos(yaw), sy = sin(yaw);
  Matrix3<Scalar> R;
  // clang-format off
  R << cy,       Scalar(0), sy,
       sp * sy,  cp,       -sp * cy,
      -cp * sy,  sp,        cp * cy;
  // clang-format on
  return R;
}

inline RotationMatrix rotation_from_angles(const PoseAngles& angles) {
  return rotation_from_angles<double>(angles.pitch, angles.yaw);
}

/// Pixel position of a point given in camera coordinates.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> project_camera_point(const Intrinsics& K, const Vector3<Scalar>& p) {
  if (!(p.z() > Scalar(0))) {
    throw Error(ErrorCode::NonPositiveDepth, "point behind the camera");
  }
  return {Scalar(K.cx) + Scalar(K.fx) * p.x() / p.z(), Scalar(K.cy) + Scalar(K.fy) * p.y() / p.z()};
}

/// lambda * K [R | T] X for the four laser points, normalized by depth.
template <typename Scalar>
SpotQuadT<Scalar> project_points(const JigGeometry& jig, const Intrinsics& K,
                                 const Matrix3<Scalar>& R, const Vector3<Scalar>& T) {
  Eigen::Matrix<Scalar, 3, 4> Rt;
  Rt.template leftCols<3>() = R;
  Rt.col(3) = T;
  const Eigen::Matrix<Scalar, 3, 4> h =
      K.matrix<Scalar>() * Rt * jig.world_points().template cast<Scalar>();

  SpotQuadT<Scalar> quad;
  for (int i = 0; i < 4; ++i) {
    if (!(h(2, i) > Scalar(0))) {
      throw Error(ErrorCode::NonPositiveDepth,
                  "laser point " + std::to_string(i + 1) + " projects behind the camera");
    }
    quad(0, i) = h(0, i) / h(2, i);
    quad(1, i) = h(1, i) / h(2, i);
  }
  return quad;
}

inline SpotQuad project_points(const JigGeometry& jig, const Intrinsics& K, const RotationMatrix& R,
                               const Eigen::Vector3d& T = Eigen::Vector3d::Zero()) {
  return project_points<double>(jig, K, R, T);
}

/// Ideal spot positions with the optical axis perpendicular to the screen.
inline SpotQuad virtual_calibration_points(const JigGeometry& jig, const Intrinsics& K) {
  return project_points(jig, K, RotationMatrix::Identity(), Eigen::Vector3d::Zero());
}

/// Reference camera used by the reproduction studies: 1920x1080 sensor with a
/// 1470 px focal length.
inline Intrinsics default_intrinsics() { return {1470.0, 1470.0, 960.0, 540.0}; }

/// Reference jig: 0.2 m laser square at a 2 m standoff.
inline JigGeometry default_jig() { return {0.2, 2.0}; }

/// True when any coordinate is non-finite or two points lie within one pixel.
bool is_degenerate(const SpotQuad& quad);

}  // namespace sldisp
