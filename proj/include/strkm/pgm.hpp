#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "strkm/ndmath.hpp"

namespace strkm {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

constexpr std::uint8_t kSeparatorValue = 128;

// Tiles rows of `images` (each h*w, values in [0, 1]) row-major into a grid
// with `cols` columns and 1-pixel separators; unused cells are separator
// gray. Values are clamped and rounded to 0..255.
GrayImage tile_images(const Mat& images, int h, int w, int cols);

// Binary PGM (P5, maxval 255).
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace strkm
