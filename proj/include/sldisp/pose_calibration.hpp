#pragma once

// Pitch/yaw estimation from the four detected laser spots by damped
// Gauss-Newton (Levenberg-Marquardt) on the reprojection residuals.

#include <vector>

#include "sldisp/camera_geometry.hpp"

namespace sldisp {

using Residuals = Eigen::Matrix<double, 8, 1>;
using ResidualJacobian = Eigen::Matrix<double, 8, 2>;

/// detected - projected, stacked as (u1, v1, u2, v2, ...). Scalar may be an
/// autodiff type; the projection uses zero translation.
template <typename Scalar>
Eigen::Matrix<Scalar, 8, 1> residuals(const SpotQuad& detected, const Intrinsics& K,
                                      const JigGeometry& jig, const Scalar& pitch,
                                      const Scalar& yaw) {
  const SpotQuadT<Scalar> projected = project_points<Scalar>(
      jig, K, rotation_from_angles<Scalar>(pitch, yaw), Vector3<Scalar>::Zero());
  const SpotQuadT<Scalar> diff = detected.template cast<Scalar>() - projected;
  return Eigen::Map<const Eigen::Matrix<Scalar, 8, 1>>(diff.data());
}

inline Residuals residuals(const SpotQuad& detected, const Intrinsics& K, const JigGeometry& jig,
                           const PoseAngles& angles) {
  return residuals<double>(detected, K, jig, angles.pitch, angles.yaw);
}

/// Central-difference Jacobian of the residuals with respect to (pitch, yaw).
ResidualJacobian residual_jacobian(const SpotQuad& detected, const Intrinsics& K,
                                   const JigGeometry& jig, const PoseAngles& angles,
                                   double step = 1e-7);

struct CalibrationOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;                // rad
  double relative_decrease_tolerance = 1e-12;
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  double jacobian_step = 1e-7;                  // rad
  int max_backtracks = 20;
};

struct CalibrationResult {
  PoseAngles angles;
  double rms_residual = 0.0;  // px
  int iterations = 0;
  bool converged = false;
  /// Sum of squared residuals after every accepted step, starting at the
  /// initial guess.
  std::vector<double> objective_trace;
};

/// Refines the inclinometer reading `initial` (within +-60 degrees per axis).
/// A run that exhausts the iteration budget is returned with converged = false.
CalibrationResult calibrate_angles(const SpotQuad& detected, const Intrinsics& K,
                                   const JigGeometry& jig, const PoseAngles& initial,
                                   const CalibrationOptions& options = {});

}  // namespace sldisp
