#include "sldisp/pose_calibration.hpp"

#include <cmath>
#include <optional>

#include <Eigen/Cholesky>

namespace sldisp {

namespace {

std::optional<Residuals> try_residuals(const SpotQuad& detected, const Intrinsics& K,
                                       const JigGeometry& jig, const Eigen::Vector2d& x) {
  if (!PoseAngles{x[0], x[1]}.is_valid()) return std::nullopt;
  try {
    return residuals<double>(detected, K, jig, x[0], x[1]);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NonPositiveDepth) return std::nullopt;
    throw;
  }
}

}  // namespace

ResidualJacobian residual_jacobian(const SpotQuad& detected, const Intrinsics& K,
                                   const JigGeometry& jig, const PoseAngles& angles,
                                   double step) {
  ResidualJacobian J;
  const Eigen::Vector2d x(angles.pitch, angles.yaw);
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d lo = x, hi = x;
    lo[k] -= step;
    hi[k] += step;
    J.col(k) = (residuals<double>(detected, K, jig, hi[0], hi[1]) -
                residuals<double>(detected, K, jig, lo[0], lo[1])) /
               (2.0 * step);
  }
  return J;
}

CalibrationResult calibrate_angles(const SpotQuad& detected, const Intrinsics& K,
                                   const JigGeometry& jig, const PoseAngles& initial,
                                   const CalibrationOptions& options) {
  K.validate();
  jig.validate();
  if (is_degenerate(detected)) {
    throw Error(ErrorCode::DegenerateQuad, "detected laser quad is degenerate");
  }
  const double limit = deg_to_rad(60.0);
  if (!std::isfinite(initial.pitch) || !std::isfinite(initial.yaw) ||
      std::abs(initial.pitch) > limit || std::abs(initial.yaw) > limit) {
    throw Error(ErrorCode::PreconditionFailed, "initial angles must lie within +-60 degrees");
  }

  Eigen::Vector2d x(initial.pitch, initial.yaw);
  const auto r0 = try_residuals(detected, K, jig, x);
  if (!r0) throw Error(ErrorCode::NonPositiveDepth, "initial angles put the plane behind the camera");
  Residuals r = *r0;
  double cost = r.squaredNorm();

  CalibrationResult result;
  result.objective_trace.push_back(cost);

  double damping = options.initial_damping;
  int iteration = 0;
  bool converged = cost == 0.0;
  while (!converged && iteration < options.max_iterations) {
    ++iteration;
    const ResidualJacobian J =
        residual_jacobian(detected, K, jig, {x[0], x[1]}, options.jacobian_step);
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    const Eigen::Vector2d gradient = J.transpose() * r;

    Eigen::Matrix2d A = JtJ;
    A.diagonal() += damping * JtJ.diagonal().cwiseMax(1e-12);
    Eigen::Vector2d step = A.ldlt().solve(-gradient);

    if (step.norm() < options.step_tolerance) {
      converged = true;
      break;
    }

    std::optional<Residuals> trial;
    for (int backtrack = 0;; ++backtrack) {
      trial = try_residuals(detected, K, jig, x + step);
      if (trial) break;
      if (backtrack >= options.max_backtracks) {
        throw Error(ErrorCode::NonPositiveDepth,
                    "calibration step left the valid pose region after backtracking");
      }
      step *= 0.5;
    }

    const double trial_cost = trial->squaredNorm();
    if (trial_cost < cost) {
      const double decrease = (cost - trial_cost) / cost;
      x += step;
      r = *trial;
      cost = trial_cost;
      damping /= options.damping_factor;
      result.objective_trace.push_back(cost);
      if (decrease < options.relative_decrease_tolerance || cost == 0.0) converged = true;
    } else {
      damping *= options.damping_factor;
    }
  }

  result.angles = {x[0], x[1]};
  result.iterations = iteration;
  result.converged = converged;
  result.rms_residual = std::sqrt(cost / 8.0);
  return result;
}

}  // namespace sldisp
