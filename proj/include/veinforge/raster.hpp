#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "veinforge/common.hpp"

namespace vf {

// Row-major 8-bit grayscale raster, origin top-left. A coordinate is
// (x = column, y = row), 0-indexed. Images are immutable values once built;
// nothing in the library mutates an image it did not create.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t size() const { return pixels.size(); }
  bool same_dims(const GrayImage& o) const {
    return width == o.width && height == o.height;
  }
  bool operator==(const GrayImage&) const = default;
};

// Row-major bitmask raster; every element is 0 or 1.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  BinaryImage() = default;
  BinaryImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t size() const { return pixels.size(); }
  std::size_t popcount() const;
  bool operator==(const BinaryImage&) const = default;
};

struct Coord {
  int x = 0;  // column
  int y = 0;  // row
  bool operator==(const Coord&) const = default;
};

// Raster-order comparison: ascending y, then ascending x.
inline bool raster_less(const Coord& a, const Coord& b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

// Ordered skeleton pixel coordinates. Invariant: raster order, no duplicates.
struct CoordinateList {
  std::vector<Coord> points;

  // Sorts into raster order and removes duplicates.
  static CoordinateList from_unordered(std::vector<Coord> pts);

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool operator==(const CoordinateList&) const = default;
};

// Binary PGM (P5) I/O. Writers emit exactly "P5\n<w> <h>\n255\n" followed by
// the raw bytes; readers tolerate comments and arbitrary token whitespace.
GrayImage load_pgm(const std::string& path);
void save_pgm(const GrayImage& img, const std::string& path);

// 1 exactly at the listed coordinates (duplicates collapse), 0 elsewhere.
BinaryImage rasterize(const CoordinateList& coords, int width, int height);

// Binary <-> gray conversions used for skeleton files: foreground is stored
// as 255 in PGM form and any nonzero byte reads back as foreground.
GrayImage to_gray(const BinaryImage& bin);
BinaryImage to_binary(const GrayImage& img);

}  // namespace vf
