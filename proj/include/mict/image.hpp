#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "mict/geometry.hpp"

namespace mict {

/// Row-major 8-bit RGB image.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  Raster() = default;
  Raster(int w, int h);

  std::array<std::uint8_t, 3> at(int x, int y) const;
  void set(int x, int y, std::array<std::uint8_t, 3> rgb);
};

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Foreground bitmask; rows index y, columns index x.
struct ForegroundMask {
  MaskArray bits;

  ForegroundMask() = default;
  ForegroundMask(int w, int h, bool value = false);

  int width() const { return static_cast<int>(bits.cols()); }
  int height() const { return static_cast<int>(bits.rows()); }
  bool at(int x, int y) const { return bits(y, x); }

  // Sets every pixel whose center lies inside `r`.
  void fill(const OrientedRectd& r);
};

// Calls f(x, y) for each integer pixel whose center (x + 0.5, y + 0.5) lies
// inside r. Pixels outside [0, w) x [0, h) are visited only if clip is false.
template <typename F>
void for_each_pixel_in(const OrientedRectd& r, int w, int h, bool clip, F&& f) {
  const Boxd b = r.bounds();
  int x0 = static_cast<int>(std::floor(b.min().x()));
  int y0 = static_cast<int>(std::floor(b.min().y()));
  int x1 = static_cast<int>(std::ceil(b.max().x()));
  int y1 = static_cast<int>(std::ceil(b.max().y()));
  if (clip) {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, w);
    y1 = std::min(y1, h);
  }
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      if (r.contains(Point2<double>(x + 0.5, y + 0.5))) f(x, y);
}

Raster read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Raster& img);

// Accepts ASCII (P1) and binary (P4) bitmaps; writes P4.
ForegroundMask read_pbm(const std::filesystem::path& path);
void write_pbm(const std::filesystem::path& path, const ForegroundMask& mask);

}  // namespace mict
