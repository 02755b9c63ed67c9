#include "hemo/image.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hemo {

namespace {

constexpr int kLevels = 256;

void check_non_empty(const GrayImage& img, const char* op) {
  if (img.width <= 0 || img.height <= 0 || img.pixels.empty()) {
    throw std::runtime_error(std::string(op) + ": empty image");
  }
  if (img.pixels.size() != static_cast<std::size_t>(img.width) *
                               static_cast<std::size_t>(img.height)) {
    throw std::runtime_error(std::string(op) + ": pixel buffer size mismatch");
  }
}

std::uint8_t round_half_up_255(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::min(255.0, std::max(0.0, r)));
}

/// Equalization mapping from a (possibly fractional, post-clip) histogram.
std::array<std::uint8_t, 256> mapping_from_histogram(
    const std::array<double, 256>& hist, double total) {
  std::array<std::uint8_t, 256> lut{};
  double cum = 0.0;
  for (int k = 0; k < kLevels; ++k) {
    cum += hist[static_cast<std::size_t>(k)];
    lut[static_cast<std::size_t>(k)] =
        round_half_up_255(255.0 * cum / total);
  }
  return lut;
}

}  // namespace

std::array<long long, 256> histogram(const GrayImage& img) {
  check_non_empty(img, "histogram");
  std::array<long long, 256> counts{};
  for (const std::uint8_t p : img.pixels) ++counts[p];
  return counts;
}

std::pair<GrayImage, HistogramMapping> equalize(const GrayImage& img) {
  const auto counts = histogram(img);
  std::array<double, 256> hist{};
  for (int k = 0; k < kLevels; ++k) {
    hist[static_cast<std::size_t>(k)] =
        static_cast<double>(counts[static_cast<std::size_t>(k)]);
  }
  HistogramMapping mapping;
  mapping.lut = mapping_from_histogram(
      hist, static_cast<double>(img.width) * static_cast<double>(img.height));

  GrayImage out = img;
  for (auto& p : out.pixels) p = mapping.lut[p];
  return {std::move(out), mapping};
}

GrayImage clahe(const GrayImage& img, int tiles_x, int tiles_y,
                double clip_limit) {
  check_non_empty(img, "clahe");
  if (tiles_x < 1 || tiles_y < 1) {
    throw std::runtime_error("clahe: tile counts must be at least 1");
  }
  if (tiles_x > img.width || tiles_y > img.height) {
    throw std::runtime_error("clahe: tile grid larger than image");
  }
  if (!(clip_limit > 0.0)) {
    throw std::runtime_error("clahe: clip limit must be positive");
  }

  // Balanced tile boundaries: tile i spans [i*extent/tiles, (i+1)*extent/tiles).
  const auto tile_start = [](int index, int extent, int tiles) {
    return static_cast<int>(static_cast<long long>(index) * extent / tiles);
  };

  std::vector<std::array<std::uint8_t, 256>> luts(
      static_cast<std::size_t>(tiles_x) * static_cast<std::size_t>(tiles_y));
  std::vector<double> centers_x(static_cast<std::size_t>(tiles_x));
  std::vector<double> centers_y(static_cast<std::size_t>(tiles_y));

  for (int ty = 0; ty < tiles_y; ++ty) {
    const int y0 = tile_start(ty, img.height, tiles_y);
    const int y1 = tile_start(ty + 1, img.height, tiles_y);
    centers_y[static_cast<std::size_t>(ty)] = 0.5 * (y0 + y1 - 1);
    for (int tx = 0; tx < tiles_x; ++tx) {
      const int x0 = tile_start(tx, img.width, tiles_x);
      const int x1 = tile_start(tx + 1, img.width, tiles_x);
      if (ty == 0) centers_x[static_cast<std::size_t>(tx)] = 0.5 * (x0 + x1 - 1);

      std::array<double, 256> hist{};
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          hist[img.at(x, y)] += 1.0;
        }
      }
      const double tile_pixels =
          static_cast<double>(x1 - x0) * static_cast<double>(y1 - y0);
      const double threshold = clip_limit * tile_pixels / kLevels;

      double excess = 0.0;
      for (auto& bin : hist) {
        if (bin > threshold) {
          excess += bin - threshold;
          bin = threshold;
        }
      }
      if (excess > 0.0) {
        const double bonus = excess / kLevels;
        for (auto& bin : hist) bin += bonus;
      }
      luts[static_cast<std::size_t>(ty) * static_cast<std::size_t>(tiles_x) +
           static_cast<std::size_t>(tx)] =
          mapping_from_histogram(hist, tile_pixels);
    }
  }

  const auto lut_at = [&](int tx, int ty) -> const std::array<std::uint8_t, 256>& {
    return luts[static_cast<std::size_t>(ty) * static_cast<std::size_t>(tiles_x) +
                static_cast<std::size_t>(tx)];
  };

  // Bracketing tile indices and interpolation weight along one axis,
  // clamped at the borders.
  const auto bracket = [](double pos, const std::vector<double>& centers,
                          int& lo, int& hi, double& w_hi) {
    const int tiles = static_cast<int>(centers.size());
    if (pos <= centers.front()) {
      lo = hi = 0;
      w_hi = 0.0;
      return;
    }
    if (pos >= centers.back()) {
      lo = hi = tiles - 1;
      w_hi = 0.0;
      return;
    }
    hi = 1;
    while (centers[static_cast<std::size_t>(hi)] < pos) ++hi;
    lo = hi - 1;
    const double span = centers[static_cast<std::size_t>(hi)] -
                        centers[static_cast<std::size_t>(lo)];
    w_hi = (pos - centers[static_cast<std::size_t>(lo)]) / span;
  };

  GrayImage out = img;
  for (int y = 0; y < img.height; ++y) {
    int ty0, ty1;
    double wy;
    bracket(static_cast<double>(y), centers_y, ty0, ty1, wy);
    for (int x = 0; x < img.width; ++x) {
      int tx0, tx1;
      double wx;
      bracket(static_cast<double>(x), centers_x, tx0, tx1, wx);
      const std::uint8_t p = img.at(x, y);

      if (tx0 == tx1 && ty0 == ty1) {
        // Single bracketing tile (corner regions or a 1xN grid): apply the
        // mapping directly so the degenerate case stays bit-exact.
        out.at(x, y) = lut_at(tx0, ty0)[p];
        continue;
      }
      const double v00 = lut_at(tx0, ty0)[p];
      const double v10 = lut_at(tx1, ty0)[p];
      const double v01 = lut_at(tx0, ty1)[p];
      const double v11 = lut_at(tx1, ty1)[p];
      const double top = v00 * (1.0 - wx) + v10 * wx;
      const double bottom = v01 * (1.0 - wx) + v11 * wx;
      out.at(x, y) = round_half_up_255(top * (1.0 - wy) + bottom * wy);
    }
  }
  return out;
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open '" + path + "'");

  std::string magic;
  in >> magic;
  if (magic != "P5") {
    throw std::runtime_error("read_pgm: '" + path + "' is not binary PGM (P5)");
  }
  // Header tokens may be separated by whitespace and '#' comment lines.
  const auto next_int = [&in, &path]() {
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
        continue;
      }
      if (std::isspace(c)) {
        in.get();
        continue;
      }
      break;
    }
    long long value = 0;
    if (!(in >> value)) {
      throw std::runtime_error("read_pgm: malformed header in '" + path + "'");
    }
    return value;
  };

  const long long width = next_int();
  const long long height = next_int();
  const long long maxval = next_int();
  if (width <= 0 || height <= 0 || maxval != 255) {
    throw std::runtime_error("read_pgm: unsupported dimensions or maxval in '" +
                             path + "'");
  }
  in.get();  // single whitespace after maxval

  GrayImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.pixels.resize(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw std::runtime_error("read_pgm: truncated pixel data in '" + path + "'");
  }
  return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
  check_non_empty(img, "write_pgm");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot write '" + path + "'");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("write_pgm: write failure on '" + path + "'");
}

}  // namespace hemo
