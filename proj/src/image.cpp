#include "sldisp/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string_view>

#include "sldisp/errors.hpp"

namespace sldisp {

GrayImage::GrayImage(int width, int height, std::uint8_t fill) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be at least 1x1");
  }
  pixels_ = PixelMatrix::Constant(height, width, fill);
}

GrayImage::GrayImage(PixelMatrix pixels) : pixels_(std::move(pixels)) {
  if (pixels_.rows() < 1 || pixels_.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be at least 1x1");
  }
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::ParseError, "malformed PGM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1L << 30)) throw Error(ErrorCode::ParseError, "PGM header value too large");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::ParseError, "malformed PGM header");
    }
    return pos_ + 1;
  }

  std::size_t pos_ = 0;

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
};

}  // namespace

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::ParseError, "not a binary PGM (expected magic P5)");
  }
  HeaderReader reader(bytes);
  reader.pos_ = 2;
  const int width = reader.next_int();
  const int height = reader.next_int();
  const int maxval = reader.next_int();
  if (maxval != 255) throw Error(ErrorCode::ParseError, "only maxval 255 is supported");
  if (width < 1 || height < 1) throw Error(ErrorCode::ParseError, "PGM has empty dimensions");
  const std::size_t offset = reader.raster_offset();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < offset + count) throw Error(ErrorCode::ParseError, "PGM raster is truncated");

  PixelMatrix pixels(height, width);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(offset), count, pixels.data());
  return GrayImage(std::move(pixels));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header =
      "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  const auto* data = image.pixels().data();
  bytes.insert(bytes.end(), data, data + image.pixels().size());
  return bytes;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_pgm(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const auto bytes = encode_pgm(image);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace sldisp
