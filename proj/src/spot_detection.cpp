#include "sldisp/spot_detection.hpp"

#include <algorithm>
#include <numeric>

namespace sldisp {

Histogram histogram(const GrayImage& image) {
  Histogram hist{};
  const auto& px = image.pixels();
  for (Eigen::Index i = 0; i < px.size(); ++i) ++hist[px.data()[i]];
  return hist;
}

int otsu_threshold(const Histogram& hist) {
  std::int64_t total = 0;
  std::int64_t total_sum = 0;
  for (int level = 0; level < 256; ++level) {
    total += static_cast<std::int64_t>(hist[level]);
    total_sum += static_cast<std::int64_t>(hist[level]) * level;
  }

  // Between-class variance up to the constant factor 1 / N^2:
  //   (N * S_t - n_t * S)^2 / (n_t * (N - n_t))
  int best_level = 0;
  double best_score = -1.0;
  std::int64_t below = 0;
  std::int64_t below_sum = 0;
  for (int level = 0; level < 256; ++level) {
    below += static_cast<std::int64_t>(hist[level]);
    below_sum += static_cast<std::int64_t>(hist[level]) * level;
    double score = 0.0;
    if (below > 0 && below < total) {
      const auto diff = static_cast<double>(total * below_sum - below * total_sum);
      score = diff * diff / (static_cast<double>(below) * static_cast<double>(total - below));
    }
    if (score > best_score) {
      best_score = score;
      best_level = level;
    }
  }
  return best_level;
}

int otsu_threshold(const GrayImage& image) {
  if (image.empty()) throw Error(ErrorCode::InvalidArgument, "otsu_threshold: empty image");
  return otsu_threshold(histogram(image));
}

std::vector<Blob> find_blobs(const GrayImage& image, int threshold, int min_area) {
  const int w = image.width();
  const int h = image.height();
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> stack;
  std::vector<Blob> blobs;

  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t seed = static_cast<std::size_t>(y0) * w + x0;
      if (visited[seed] || image(x0, y0) <= threshold) continue;

      // Integer accumulators keep symmetric spots exactly centered.
      std::int64_t weight = 0, sum_x = 0, sum_y = 0;
      std::uint64_t intensity = 0;
      int area = 0;
      visited[seed] = 1;
      stack.assign(1, static_cast<int>(seed));
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int x = idx % w;
        const int y = idx / w;
        const int value = image(x, y);
        const std::int64_t above = value - threshold;
        weight += above;
        sum_x += above * x;
        sum_y += above * y;
        intensity += static_cast<std::uint64_t>(value);
        ++area;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
            if (visited[n] || image(nx, ny) <= threshold) continue;
            visited[n] = 1;
            stack.push_back(static_cast<int>(n));
          }
        }
      }
      if (area < min_area) continue;
      Blob blob;
      blob.area = area;
      blob.total_intensity = intensity;
      blob.centroid = {static_cast<double>(sum_x) / static_cast<double>(weight),
                       static_cast<double>(sum_y) / static_cast<double>(weight)};
      blobs.push_back(blob);
    }
  }
  return blobs;
}

SpotQuad order_spots(const std::array<Eigen::Vector2d, 4>& centers) {
  std::array<int, 4> by_v{0, 1, 2, 3};
  std::sort(by_v.begin(), by_v.end(), [&](int a, int b) {
    return centers[a].y() < centers[b].y() || (centers[a].y() == centers[b].y() && a < b);
  });

  const double row_gap = centers[by_v[2]].y() - centers[by_v[1]].y();
  if (row_gap < 1.0) {
    throw Error(ErrorCode::AmbiguousQuadrant, "laser spots do not form two separable rows");
  }
  auto left_right = [&](int a, int b) {
    if (std::abs(centers[a].x() - centers[b].x()) < 1.0) {
      throw Error(ErrorCode::AmbiguousQuadrant, "two laser spots share a column");
    }
    return centers[a].x() < centers[b].x() ? std::pair{a, b} : std::pair{b, a};
  };
  const auto [p4, p3] = left_right(by_v[0], by_v[1]);
  const auto [p1, p2] = left_right(by_v[2], by_v[3]);

  SpotQuad quad;
  quad.col(0) = centers[p1];
  quad.col(1) = centers[p2];
  quad.col(2) = centers[p3];
  quad.col(3) = centers[p4];
  return quad;
}

SpotQuad detect_spots(const GrayImage& image, int min_blob_area) {
  const int threshold = otsu_threshold(image);
  const std::vector<Blob> blobs = find_blobs(image, threshold, min_blob_area);
  if (blobs.size() != 4) {
    throw Error(ErrorCode::SpotCountMismatch, "expected 4 laser spots, found " +
                                                  std::to_string(blobs.size()) +
                                                  " (threshold " + std::to_string(threshold) + ")");
  }
  return order_spots({blobs[0].centroid, blobs[1].centroid, blobs[2].centroid, blobs[3].centroid});
}

}  // namespace sldisp
