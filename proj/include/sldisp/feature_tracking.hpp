#pragma once

// Corner seeding (minimum eigenvalue of the gradient structure tensor) and
// pyramidal Lucas-Kanade tracking, composed into a vertical displacement
// time series.

#include <span>
#include <vector>

#include "sldisp/image.hpp"
#include "sldisp/scale_factor.hpp"

namespace sldisp {

struct FeatureSet {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> quality;  // minimum-eigenvalue score per point

  std::size_t size() const { return points.size(); }
};

struct CornerOptions {
  int max_points = 100;
  double quality = 0.01;        // fraction of the strongest response
  double min_separation = 5.0;  // px
};

/// Smaller eigenvalue of the 3x3-summed structure tensor of Sobel gradients,
/// evaluated at every pixel (borders replicate).
FloatImage min_eigenvalue_response(const GrayImage& image);

/// Strongest local maxima of the response inside `roi`, greedily thinned to
/// `min_separation`. Throws NoFeatures when nothing clears the quality bar.
FeatureSet detect_corners(const GrayImage& image, const Rect& roi,
                          const CornerOptions& options = {});

struct TrackerOptions {
  int window = 21;  // odd, px
  int levels = 3;
  int max_iter = 30;
  double eps = 0.01;            // px, update norm that stops the iteration
  double max_residual = 30.0;   // mean absolute intensity error, gray levels
  double min_eigen_ratio = 1e-4;  // singular when lambda_min < ratio * trace(G)
};

/// Gaussian pyramid with Scharr gradients at every level.
class ImagePyramid {
 public:
  ImagePyramid(const GrayImage& image, int levels);

  int levels() const { return static_cast<int>(images_.size()); }
  int width() const { return width_; }
  int height() const { return height_; }
  const FloatImage& image(int level) const { return images_[static_cast<std::size_t>(level)]; }
  const FloatImage& grad_x(int level) const { return grad_x_[static_cast<std::size_t>(level)]; }
  const FloatImage& grad_y(int level) const { return grad_y_[static_cast<std::size_t>(level)]; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<FloatImage> images_;
  std::vector<FloatImage> grad_x_;
  std::vector<FloatImage> grad_y_;
};

struct TrackedPoint {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  bool tracked = false;
};

/// Coarse-to-fine Lucas-Kanade. `guesses`, when given, seeds each point's
/// position in `next` (same length as `points`).
std::vector<TrackedPoint> track_flow(const ImagePyramid& prev, const ImagePyramid& next,
                                     std::span<const Eigen::Vector2d> points,
                                     std::span<const Eigen::Vector2d> guesses,
                                     const TrackerOptions& options = {});

std::vector<TrackedPoint> track_flow(const GrayImage& prev, const GrayImage& next,
                                     std::span<const Eigen::Vector2d> points,
                                     const TrackerOptions& options = {});

struct DisplacementSample {
  int frame = 0;
  double time = 0.0;          // s
  double mean_dv = 0.0;       // px, relative to frame 0
  double mean_du = 0.0;       // px, diagnostic only
  int survivors = 0;
  double displacement = 0.0;  // mm, mean_dv * scale factor
};

struct DisplacementSeries {
  ScaleFactor scale;
  std::vector<DisplacementSample> samples;
};

struct TrackingConfig {
  TrackerOptions tracker;
  CornerOptions corners;
};

/// Incremental displacement measurement. Features are seeded in the first
/// frame; every later frame is registered against the first one, starting
/// from the previous frame's estimate, and lost features stay dropped.
class DisplacementTracker {
 public:
  DisplacementTracker(const GrayImage& first_frame, const Rect& roi, const ScaleFactor& scale,
                      double fps, const TrackingConfig& config = {});

  const DisplacementSample& push(const GrayImage& frame);

  const DisplacementSeries& series() const { return series_; }
  const FeatureSet& features() const { return features_; }

 private:
  TrackingConfig config_;
  double fps_;
  ImagePyramid reference_;
  FeatureSet features_;
  std::vector<Eigen::Vector2d> current_;
  std::vector<bool> alive_;
  DisplacementSeries series_;
};

DisplacementSeries displacement_series(std::span<const GrayImage> frames, const Rect& roi,
                                       const ScaleFactor& scale, double fps,
                                       const TrackingConfig& config = {});

}  // namespace sldisp
