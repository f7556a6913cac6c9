#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sldisp {

using PixelMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FloatImage = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8-bit grayscale image, row-major. Pixel (x, y) has its center at
/// image coordinates (u, v) = (x, y).
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  explicit GrayImage(PixelMatrix pixels);

  int width() const { return static_cast<int>(pixels_.cols()); }
  int height() const { return static_cast<int>(pixels_.rows()); }
  bool empty() const { return pixels_.size() == 0; }

  std::uint8_t operator()(int x, int y) const { return pixels_(y, x); }
  std::uint8_t& operator()(int x, int y) { return pixels_(y, x); }

  const PixelMatrix& pixels() const { return pixels_; }
  PixelMatrix& pixels() { return pixels_; }

  FloatImage to_float() const { return pixels_.cast<float>().array(); }

  bool operator==(const GrayImage& other) const {
    return pixels_.rows() == other.pixels_.rows() && pixels_.cols() == other.pixels_.cols() &&
           pixels_ == other.pixels_;
  }

 private:
  PixelMatrix pixels_;
};

/// Axis-aligned pixel rectangle [x, x + width) x [y, y + height).
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(double u, double v) const {
    return u >= x && v >= y && u <= x + width - 1 && v <= y + height - 1;
  }
  bool inside(int image_width, int image_height) const {
    return width > 0 && height > 0 && x >= 0 && y >= 0 && x + width <= image_width &&
           y + height <= image_height;
  }
};

/// Binary PGM ("P5", maxval 255).
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

}  // namespace sldisp
