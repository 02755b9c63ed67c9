#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hemo {

/// 8-bit grayscale image, row-major, 256 intensity levels.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

/// Intensity remapping table; monotone non-decreasing by construction.
struct HistogramMapping {
  std::array<std::uint8_t, 256> lut = {};
};

/// Per-level pixel counts; sums to width * height.
std::array<long long, 256> histogram(const GrayImage& img);

/// Global histogram equalization: s_k = round((L-1) * cum_k / MN) with
/// round-half-up, applied through the returned mapping.
std::pair<GrayImage, HistogramMapping> equalize(const GrayImage& img);

/// Contrast-limited adaptive histogram equalization. Per-tile histograms are
/// clipped at clip_limit * (tile_pixels / 256) with the excess spread
/// uniformly, per-tile mappings are computed as in equalize, and output
/// pixels blend the four nearest tile mappings bilinearly (mappings clamp at
/// the borders). Throws if the tile grid exceeds the image.
GrayImage clahe(const GrayImage& img, int tiles_x, int tiles_y,
                double clip_limit);

/// Binary PGM (P5, maxval 255); the bit-exact interchange format.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& img, const std::string& path);

}  // namespace hemo
