#include "sldisp/alignment.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sldisp {

PairLengths pair_lengths(double f, const JigGeometry& jig, double tilt) {
  jig.validate();
  if (!(f > 0.0)) throw Error(ErrorCode::InvalidArgument, "focal length must be positive");
  if (!(std::abs(tilt) < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::DegenerateGeometry, "tilt must lie in (-90, 90) degrees");
  }
  const double h = jig.half_side();
  const double D = jig.distance;
  const double c = std::cos(tilt);
  const double s = std::sin(tilt);
  const double near_den = D * c - h * s;
  const double far_den = D * c + h * s;
  if (!(near_den > 0.0) || !(far_den > 0.0)) {
    throw Error(ErrorCode::DegenerateGeometry, "tilted screen does not cross both laser rays");
  }
  return {jig.side_length * f / D, f * h * c / near_den + f * h * c / far_den};
}

double length_ratio(double f, const JigGeometry& jig, double tilt) {
  const PairLengths l = pair_lengths(f, jig, tilt);
  return l.tilted / l.perpendicular;
}

std::vector<TiltStudyResult> alignment_error_curve(const Intrinsics& K, double jig_side,
                                                   double tilt_pitch, double tilt_yaw,
                                                   std::span<const double> distances) {
  K.validate();
  const Eigen::Vector3d normal = rotation_from_angles(PoseAngles{tilt_pitch, tilt_yaw}).col(2);
  if (!(normal.z() > 0.0)) {
    throw Error(ErrorCode::DegenerateGeometry, "tilted screen is parallel to the optical axis");
  }

  std::vector<TiltStudyResult> curve;
  curve.reserve(distances.size());
  double previous = 0.0;
  for (const double D : distances) {
    if (!(D > 0.0)) throw Error(ErrorCode::InvalidArgument, "distances must be positive");
    if (!curve.empty() && !(D > previous)) {
      throw Error(ErrorCode::InvalidArgument, "distances must be strictly ascending");
    }
    previous = D;

    const JigGeometry jig{jig_side, D};
    jig.validate();
    const Eigen::Matrix4d X = jig.world_points();
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector3d origin(X(0, i), X(1, i), 0.0);
      // Beam origin + t * z_hat meets {p : n.p = n.(0, 0, D)}.
      const double t = (normal.z() * D - normal.x() * origin.x() - normal.y() * origin.y()) /
                       normal.z();
      if (!(t > 0.0)) {
        throw Error(ErrorCode::DegenerateGeometry,
                    "laser " + std::to_string(i + 1) + " hits the tilted screen behind the jig");
      }
      const Eigen::Vector2d straight =
          project_camera_point<double>(K, Eigen::Vector3d(origin.x(), origin.y(), D));
      const Eigen::Vector2d tilted =
          project_camera_point<double>(K, Eigen::Vector3d(origin.x(), origin.y(), t));
      total += (tilted - straight).norm();
    }
    curve.push_back({D, total / 4.0});
  }
  return curve;
}

}  // namespace sldisp
