#include "strkm/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "strkm/binio.hpp"
#include "strkm/errors.hpp"

namespace strkm {

GrayImage tile_images(const Mat& images, int h, int w, int cols) {
  if (h < 1 || w < 1 || cols < 1) throw ConfigError("tile_images: dims must be >= 1");
  if (images.cols() != static_cast<Eigen::Index>(h) * w) throw ShapeError("tile_images: pixel count mismatch");
  if (images.rows() == 0) throw ContractError("tile_images: no images");
  const int n = static_cast<int>(images.rows());
  const int c = std::min(cols, n);
  const int r = (n + c - 1) / c;
  GrayImage img;
  img.width = c * w + (c - 1);
  img.height = r * h + (r - 1);
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, kSeparatorValue);
  for (int k = 0; k < n; ++k) {
    const int ox = (k % c) * (w + 1);
    const int oy = (k / c) * (h + 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double v = std::clamp(images(k, static_cast<Eigen::Index>(y) * w + x), 0.0, 1.0);
        img.pixels[static_cast<std::size_t>(oy + y) * img.width + ox + x] =
            static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw ShapeError("encode_pgm: pixel buffer size mismatch");
  }
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw ParseError(0, "bad magic, expected P5");
  pos = 2;
  auto read_int = [&](const char* what) {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) && v < (1l << 30)) v = v * 10 + (bytes[pos++] - '0');
    if (pos == start) throw ParseError(start, std::string("expected ") + what);
    return v;
  };
  GrayImage img;
  img.width = static_cast<int>(read_int("width"));
  img.height = static_cast<int>(read_int("height"));
  const std::size_t maxval_at = pos;
  if (read_int("maxval") != 255) throw ParseError(maxval_at, "only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw ParseError(pos, "expected whitespace after header");
  ++pos;
  const std::size_t need = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() - pos != need) {
    throw ParseError(pos, "pixel section: expected " + std::to_string(need) + " bytes, got " +
                              std::to_string(bytes.size() - pos));
  }
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  binio::write_file(path, encode_pgm(img));
}

GrayImage read_pgm(const std::filesystem::path& path) { return decode_pgm(binio::read_file(path)); }

}  // namespace strkm
