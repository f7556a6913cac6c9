#pragma once

// Alignment error caused by a screen that is not perpendicular to the optical
// axis while the lasers are being aligned.

#include <span>
#include <vector>

#include "sldisp/camera_geometry.hpp"

namespace sldisp {

struct PairLengths {
  double perpendicular = 0.0;  // image length of a laser pair on the perpendicular screen, px
  double tilted = 0.0;         // same pair on the screen tilted by the given angle, px
};

/// Image length of a laser pair on a perpendicular and on a tilted screen,
/// for a single focal length f (pixels). Throws DegenerateGeometry when the
/// tilted screen does not intersect both rays in front of the camera.
PairLengths pair_lengths(double f, const JigGeometry& jig, double tilt);

/// tilted / perpendicular pair length; tends to 1 as the distance grows.
double length_ratio(double f, const JigGeometry& jig, double tilt);

struct TiltStudyResult {
  double distance = 0.0;               // m
  double mean_positional_error = 0.0;  // px
};

/// For every screen distance, the mean pixel displacement of the four laser
/// points between a perpendicular screen and one tilted by (pitch, yaw).
/// The lasers are parallel to the optical axis; each beam is intersected with
/// the tilted plane through (0, 0, D).
std::vector<TiltStudyResult> alignment_error_curve(const Intrinsics& K, double jig_side,
                                                   double tilt_pitch, double tilt_yaw,
                                                   std::span<const double> distances);

}  // namespace sldisp
