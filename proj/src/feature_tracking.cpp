#include "sldisp/feature_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sldisp {

namespace {

float at_clamped(const FloatImage& img, Eigen::Index x, Eigen::Index y) {
  x = std::clamp<Eigen::Index>(x, 0, img.cols() - 1);
  y = std::clamp<Eigen::Index>(y, 0, img.rows() - 1);
  return img(y, x);
}

double sample_bilinear(const FloatImage& img, double x, double y) {
  const double max_x = static_cast<double>(img.cols() - 1);
  const double max_y = static_cast<double>(img.rows() - 1);
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const auto x0 = static_cast<Eigen::Index>(std::floor(x));
  const auto y0 = static_cast<Eigen::Index>(std::floor(y));
  const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, img.cols() - 1);
  const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, img.rows() - 1);
  const double ax = x - static_cast<double>(x0);
  const double ay = y - static_cast<double>(y0);
  const double top = (1.0 - ax) * img(y0, x0) + ax * img(y0, x1);
  const double bottom = (1.0 - ax) * img(y1, x0) + ax * img(y1, x1);
  return (1.0 - ay) * top + ay * bottom;
}

// Separable [1 4 6 4 1] / 16 blur followed by dropping odd rows and columns.
FloatImage downsample(const FloatImage& src) {
  const Eigen::Index w = src.cols(), h = src.rows();
  FloatImage tmp(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      tmp(y, x) = (at_clamped(src, x - 2, y) + 4.0f * at_clamped(src, x - 1, y) +
                   6.0f * src(y, x) + 4.0f * at_clamped(src, x + 1, y) +
                   at_clamped(src, x + 2, y)) /
                  16.0f;
    }
  }
  const Eigen::Index ow = (w + 1) / 2, oh = (h + 1) / 2;
  FloatImage out(oh, ow);
  for (Eigen::Index y = 0; y < oh; ++y) {
    for (Eigen::Index x = 0; x < ow; ++x) {
      const Eigen::Index sx = 2 * x, sy = 2 * y;
      out(y, x) = (at_clamped(tmp, sx, sy - 2) + 4.0f * at_clamped(tmp, sx, sy - 1) +
                   6.0f * tmp(sy, sx) + 4.0f * at_clamped(tmp, sx, sy + 1) +
                   at_clamped(tmp, sx, sy + 2)) /
                  16.0f;
    }
  }
  return out;
}

void scharr(const FloatImage& img, FloatImage& gx, FloatImage& gy) {
  const Eigen::Index w = img.cols(), h = img.rows();
  gx.resize(h, w);
  gy.resize(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const float tl = at_clamped(img, x - 1, y - 1), tc = at_clamped(img, x, y - 1),
                  tr = at_clamped(img, x + 1, y - 1);
      const float ml = at_clamped(img, x - 1, y), mr = at_clamped(img, x + 1, y);
      const float bl = at_clamped(img, x - 1, y + 1), bc = at_clamped(img, x, y + 1),
                  br = at_clamped(img, x + 1, y + 1);
      gx(y, x) = (3.0f * (tr - tl) + 10.0f * (mr - ml) + 3.0f * (br - bl)) / 32.0f;
      gy(y, x) = (3.0f * (bl - tl) + 10.0f * (bc - tc) + 3.0f * (br - tr)) / 32.0f;
    }
  }
}

// Smaller eigenvalue of [[a, b], [b, c]].
double min_eigenvalue(double a, double b, double c) {
  const double half_trace = 0.5 * (a + c);
  const double half_diff = 0.5 * (a - c);
  return half_trace - std::sqrt(half_diff * half_diff + b * b);
}

bool inside(const FloatImage& img, double x, double y) {
  return x >= 0.0 && y >= 0.0 && x <= static_cast<double>(img.cols() - 1) &&
         y <= static_cast<double>(img.rows() - 1);
}

}  // namespace

FloatImage min_eigenvalue_response(const GrayImage& image) {
  const FloatImage img = image.to_float();
  const Eigen::Index w = img.cols(), h = img.rows();
  FloatImage gxx(h, w), gxy(h, w), gyy(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const float dx = (at_clamped(img, x + 1, y - 1) + 2.0f * at_clamped(img, x + 1, y) +
                        at_clamped(img, x + 1, y + 1) - at_clamped(img, x - 1, y - 1) -
                        2.0f * at_clamped(img, x - 1, y) - at_clamped(img, x - 1, y + 1)) /
                       8.0f;
      const float dy = (at_clamped(img, x - 1, y + 1) + 2.0f * at_clamped(img, x, y + 1) +
                        at_clamped(img, x + 1, y + 1) - at_clamped(img, x - 1, y - 1) -
                        2.0f * at_clamped(img, x, y - 1) - at_clamped(img, x + 1, y - 1)) /
                       8.0f;
      gxx(y, x) = dx * dx;
      gxy(y, x) = dx * dy;
      gyy(y, x) = dy * dy;
    }
  }
  FloatImage response(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double a = 0.0, b = 0.0, c = 0.0;
      for (Eigen::Index dy = -1; dy <= 1; ++dy) {
        for (Eigen::Index dx = -1; dx <= 1; ++dx) {
          a += at_clamped(gxx, x + dx, y + dy);
          b += at_clamped(gxy, x + dx, y + dy);
          c += at_clamped(gyy, x + dx, y + dy);
        }
      }
      response(y, x) = static_cast<float>(std::max(0.0, min_eigenvalue(a, b, c)));
    }
  }
  return response;
}

FeatureSet detect_corners(const GrayImage& image, const Rect& roi, const CornerOptions& options) {
  if (!roi.inside(image.width(), image.height())) {
    throw Error(ErrorCode::InvalidArgument, "corner ROI must lie inside the image");
  }
  if (options.max_points < 1) throw Error(ErrorCode::InvalidArgument, "max_points must be >= 1");

  // The response inside the ROI only depends on a 2-pixel margin around it.
  constexpr int margin = 2;
  const int x0 = std::max(0, roi.x - margin);
  const int y0 = std::max(0, roi.y - margin);
  const int x1 = std::min(image.width(), roi.x + roi.width + margin);
  const int y1 = std::min(image.height(), roi.y + roi.height + margin);
  const GrayImage crop(image.pixels().block(y0, x0, y1 - y0, x1 - x0));
  const FloatImage response = min_eigenvalue_response(crop);

  float strongest = 0.0f;
  for (int y = roi.y; y < roi.y + roi.height; ++y) {
    for (int x = roi.x; x < roi.x + roi.width; ++x) {
      strongest = std::max(strongest, response(y - y0, x - x0));
    }
  }
  if (!(strongest > 0.0f)) throw Error(ErrorCode::NoFeatures, "no corner response inside the ROI");
  const double bar = options.quality * strongest;

  struct Candidate {
    float score;
    int x, y;
  };
  std::vector<Candidate> candidates;
  for (int y = roi.y; y < roi.y + roi.height; ++y) {
    for (int x = roi.x; x < roi.x + roi.width; ++x) {
      const float r = response(y - y0, x - x0);
      if (!(r > 0.0f) || r < bar) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx - x0, ny = y + dy - y0;
          if ((dx || dy) && nx >= 0 && ny >= 0 && nx < response.cols() && ny < response.rows() &&
              response(ny, nx) > r) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) candidates.push_back({r, x, y});
    }
  }
  if (candidates.empty()) throw Error(ErrorCode::NoFeatures, "no corner clears the quality bar");

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

  FeatureSet features;
  const double min_sq = options.min_separation * options.min_separation;
  for (const Candidate& c : candidates) {
    const Eigen::Vector2d p(c.x, c.y);
    const bool crowded = std::any_of(features.points.begin(), features.points.end(),
                                     [&](const Eigen::Vector2d& q) {
                                       return (q - p).squaredNorm() < min_sq;
                                     });
    if (crowded) continue;
    features.points.push_back(p);
    features.quality.push_back(c.score);
    if (static_cast<int>(features.size()) >= options.max_points) break;
  }
  return features;
}

ImagePyramid::ImagePyramid(const GrayImage& image, int levels)
    : width_(image.width()), height_(image.height()) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "pyramid needs at least one level");
  images_.push_back(image.to_float());
  while (static_cast<int>(images_.size()) < levels && images_.back().cols() >= 16 &&
         images_.back().rows() >= 16) {
    images_.push_back(downsample(images_.back()));
  }
  grad_x_.resize(images_.size());
  grad_y_.resize(images_.size());
  for (std::size_t l = 0; l < images_.size(); ++l) scharr(images_[l], grad_x_[l], grad_y_[l]);
}

namespace {

bool track_point(const ImagePyramid& prev, const ImagePyramid& next, const Eigen::Vector2d& point,
                 const Eigen::Vector2d& guess, const TrackerOptions& options,
                 Eigen::Vector2d& out) {
  const int half = options.window / 2;
  const int top = std::min(prev.levels(), next.levels()) - 1;
  const std::size_t n = static_cast<std::size_t>(options.window) * options.window;
  std::vector<double> templ(n), tx(n), ty(n);

  Eigen::Vector2d flow = (guess - point) / std::ldexp(1.0, top);
  Eigen::Vector2d refine = Eigen::Vector2d::Zero();
  for (int level = top; level >= 0; --level) {
    const double scale = std::ldexp(1.0, -level);
    const Eigen::Vector2d p = point * scale;
    const FloatImage& I = prev.image(level);
    const FloatImage& gx = prev.grad_x(level);
    const FloatImage& gy = prev.grad_y(level);
    const FloatImage& J = next.image(level);
    if (!inside(I, p.x(), p.y())) return false;

    double gxx = 0.0, gxy = 0.0, gyy = 0.0;
    std::size_t k = 0;
    for (int dy = -half; dy <= half; ++dy) {
      for (int dx = -half; dx <= half; ++dx, ++k) {
        const double sx = p.x() + dx, sy = p.y() + dy;
        templ[k] = sample_bilinear(I, sx, sy);
        tx[k] = sample_bilinear(gx, sx, sy);
        ty[k] = sample_bilinear(gy, sx, sy);
        gxx += tx[k] * tx[k];
        gxy += tx[k] * ty[k];
        gyy += ty[k] * ty[k];
      }
    }
    const double trace = gxx + gyy;
    if (!(trace > 0.0) || min_eigenvalue(gxx, gxy, gyy) < options.min_eigen_ratio * trace) {
      return false;
    }
    const double det = gxx * gyy - gxy * gxy;

    refine.setZero();
    for (int iter = 0; iter < options.max_iter; ++iter) {
      const Eigen::Vector2d q = p + flow + refine;
      if (!inside(J, q.x(), q.y())) return false;
      double bx = 0.0, by = 0.0;
      k = 0;
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx, ++k) {
          const double diff = templ[k] - sample_bilinear(J, q.x() + dx, q.y() + dy);
          bx += diff * tx[k];
          by += diff * ty[k];
        }
      }
      const Eigen::Vector2d update((gyy * bx - gxy * by) / det, (gxx * by - gxy * bx) / det);
      refine += update;
      if (update.norm() < options.eps) break;
    }
    if (level > 0) flow = 2.0 * (flow + refine);
  }
  out = point + flow + refine;

  const FloatImage& I = prev.image(0);
  const FloatImage& J = next.image(0);
  if (!inside(J, out.x(), out.y())) return false;
  double residual = 0.0;
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) {
      residual += std::abs(sample_bilinear(I, point.x() + dx, point.y() + dy) -
                           sample_bilinear(J, out.x() + dx, out.y() + dy));
    }
  }
  return residual / static_cast<double>(n) <= options.max_residual;
}

void check_options(const TrackerOptions& options) {
  if (options.window < 3 || options.window % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "tracker window must be odd and at least 3");
  }
  if (options.levels < 1 || options.max_iter < 1 || !(options.eps > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tracker levels, max_iter and eps must be positive");
  }
}

}  // namespace

std::vector<TrackedPoint> track_flow(const ImagePyramid& prev, const ImagePyramid& next,
                                     std::span<const Eigen::Vector2d> points,
                                     std::span<const Eigen::Vector2d> guesses,
                                     const TrackerOptions& options) {
  check_options(options);
  if (prev.width() != next.width() || prev.height() != next.height()) {
    throw Error(ErrorCode::DimensionMismatch, "tracked images differ in size");
  }
  if (!guesses.empty() && guesses.size() != points.size()) {
    throw Error(ErrorCode::InvalidArgument, "one initial guess per point is required");
  }
  std::vector<TrackedPoint> result(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d& guess = guesses.empty() ? points[i] : guesses[i];
    Eigen::Vector2d out = points[i];
    result[i].tracked = track_point(prev, next, points[i], guess, options, out);
    result[i].position = out;
  }
  return result;
}

std::vector<TrackedPoint> track_flow(const GrayImage& prev, const GrayImage& next,
                                     std::span<const Eigen::Vector2d> points,
                                     const TrackerOptions& options) {
  if (prev.width() != next.width() || prev.height() != next.height()) {
    throw Error(ErrorCode::DimensionMismatch, "tracked images differ in size");
  }
  check_options(options);
  const ImagePyramid a(prev, options.levels);
  const ImagePyramid b(next, options.levels);
  return track_flow(a, b, points, {}, options);
}

DisplacementTracker::DisplacementTracker(const GrayImage& first_frame, const Rect& roi,
                                         const ScaleFactor& scale, double fps,
                                         const TrackingConfig& config)
    : config_(config), fps_(fps), reference_(first_frame, config.tracker.levels) {
  check_options(config.tracker);
  if (!(fps > 0.0)) throw Error(ErrorCode::InvalidArgument, "fps must be positive");
  features_ = detect_corners(first_frame, roi, config.corners);
  if (features_.size() < 3) {
    throw Error(ErrorCode::AllFeaturesLost,
                "fewer than 3 features in frame 0 (" + std::to_string(features_.size()) + ")");
  }
  current_ = features_.points;
  alive_.assign(features_.size(), true);
  series_.scale = scale;
  series_.samples.push_back({0, 0.0, 0.0, 0.0, static_cast<int>(features_.size()), 0.0});
}

const DisplacementSample& DisplacementTracker::push(const GrayImage& frame) {
  if (frame.width() != reference_.width() || frame.height() != reference_.height()) {
    throw Error(ErrorCode::DimensionMismatch, "frame size differs from frame 0");
  }
  const int index = static_cast<int>(series_.samples.size());
  const ImagePyramid pyramid(frame, config_.tracker.levels);

  std::vector<std::size_t> ids;
  std::vector<Eigen::Vector2d> starts, guesses;
  for (std::size_t i = 0; i < alive_.size(); ++i) {
    if (!alive_[i]) continue;
    ids.push_back(i);
    starts.push_back(features_.points[i]);
    guesses.push_back(current_[i]);
  }
  const auto tracked = track_flow(reference_, pyramid, starts, guesses, config_.tracker);

  double sum_dv = 0.0, sum_du = 0.0;
  int survivors = 0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const std::size_t i = ids[k];
    if (!tracked[k].tracked) {
      alive_[i] = false;
      continue;
    }
    current_[i] = tracked[k].position;
    sum_dv += current_[i].y() - features_.points[i].y();
    sum_du += current_[i].x() - features_.points[i].x();
    ++survivors;
  }
  if (survivors < 3) {
    throw Error(ErrorCode::AllFeaturesLost,
                "fewer than 3 features survive at frame " + std::to_string(index));
  }

  DisplacementSample sample;
  sample.frame = index;
  sample.time = static_cast<double>(index) / fps_;
  sample.mean_dv = sum_dv / survivors;
  sample.mean_du = sum_du / survivors;
  sample.survivors = survivors;
  sample.displacement = sample.mean_dv * series_.scale.value;
  series_.samples.push_back(sample);
  return series_.samples.back();
}

DisplacementSeries displacement_series(std::span<const GrayImage> frames, const Rect& roi,
                                       const ScaleFactor& scale, double fps,
                                       const TrackingConfig& config) {
  if (frames.size() < 2) {
    throw Error(ErrorCode::PreconditionFailed, "displacement series needs at least 2 frames");
  }
  DisplacementTracker tracker(frames.front(), roi, scale, fps, config);
  for (std::size_t i = 1; i < frames.size(); ++i) tracker.push(frames[i]);
  return tracker.series();
}

}  // namespace sldisp
