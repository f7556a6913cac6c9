#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sldisp/camera_geometry.hpp"
#include "sldisp/image.hpp"

namespace sldisp {

using Histogram = std::array<std::uint64_t, 256>;

Histogram histogram(const GrayImage& image);

/// Level t maximizing the between-class variance of the {<= t} / {> t}
/// split. Ties resolve to the smallest t, so a constant image yields 0.
int otsu_threshold(const Histogram& hist);
int otsu_threshold(const GrayImage& image);

struct Blob {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  int area = 0;
  std::uint64_t total_intensity = 0;
};

/// 8-connected components of pixels brighter than `threshold` with at least
/// `min_area` members, in raster order of their first pixel. Centroids weight
/// each member by its intensity above the threshold.
std::vector<Blob> find_blobs(const GrayImage& image, int threshold, int min_area);

/// Puts four spot centers into laser order: the two lowest in the image
/// (largest v) are P1, P2 and the two highest are P4, P3, each pair ordered
/// left to right. Throws AmbiguousQuadrant when the rows or columns cannot be
/// separated by at least one pixel.
SpotQuad order_spots(const std::array<Eigen::Vector2d, 4>& centers);

/// Otsu binarization, blob extraction and ordering of the four laser spots.
SpotQuad detect_spots(const GrayImage& image, int min_blob_area = 5);

}  // namespace sldisp
