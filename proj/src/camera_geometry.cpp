#include "sldisp/camera_geometry.hpp"

namespace sldisp {

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !std::isfinite(fx)) {
    throw Error(ErrorCode::ValidationError, "intrinsics.fx must be positive");
  }
  if (!(fy > 0.0) || !std::isfinite(fy)) {
    throw Error(ErrorCode::ValidationError, "intrinsics.fy must be positive");
  }
  if (!std::isfinite(cx)) throw Error(ErrorCode::ValidationError, "intrinsics.cx must be finite");
  if (!std::isfinite(cy)) throw Error(ErrorCode::ValidationError, "intrinsics.cy must be finite");
}

void JigGeometry::validate() const {
  if (!(side_length > 0.0) || !std::isfinite(side_length)) {
    throw Error(ErrorCode::ValidationError, "jig.side_length_m must be positive");
  }
  if (!(distance > side_length) || !std::isfinite(distance)) {
    throw Error(ErrorCode::ValidationError, "jig.distance_m must exceed jig.side_length_m");
  }
}

bool is_degenerate(const SpotQuad& quad) {
  if (!quad.allFinite()) return true;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if ((quad.col(i) - quad.col(j)).norm() < 1.0) return true;
    }
  }
  return false;
}

}  // namespace sldisp
