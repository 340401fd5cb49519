#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "veinforge/common.hpp"
#include "veinforge/detmath.hpp"
#include "veinforge/raster.hpp"

namespace tu {

// Runs fn and reports which error code it raised, if any.
template <class Fn>
std::optional<vf::Err> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const vf::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "vftestXXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline void spew(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline vf::GrayImage random_gray(vf::Xorshift64Star& rng, int w, int h) {
  vf::GrayImage img(w, h);
  for (auto& p : img.pixels)
    p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return img;
}

inline vf::BinaryImage random_binary(vf::Xorshift64Star& rng, int w, int h,
                                     double fill = 0.3) {
  vf::BinaryImage img(w, h);
  for (auto& p : img.pixels) p = rng.next_unit() < fill ? 1 : 0;
  return img;
}

// Union of filled disks, the shape family used for thinning tests. Radii
// start at 2 because Zhang-Suen erases an isolated 2x2 square outright.
inline vf::BinaryImage random_blobs(vf::Xorshift64Star& rng, int w, int h,
                                    int n_blobs) {
  vf::BinaryImage img(w, h);
  for (int b = 0; b < n_blobs; ++b) {
    const int r = rng.uniform_int(2, 5);
    const int cx = rng.uniform_int(r, w - 1 - r);
    const int cy = rng.uniform_int(r, h - 1 - r);
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx)
        if (dx * dx + dy * dy <= r * r) img.at(cx + dx, cy + dy) = 1;
  }
  return img;
}

inline int count_components8(const vf::BinaryImage& bin) {
  const int w = bin.width, h = bin.height;
  std::vector<std::uint8_t> seen(bin.pixels.size(), 0);
  int count = 0;
  for (std::size_t start = 0; start < bin.pixels.size(); ++start) {
    if (!bin.pixels[start] || seen[start]) continue;
    ++count;
    std::vector<int> stack{static_cast<int>(start)};
    seen[start] = 1;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const int x = i % w, y = i / w;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if ((dx == 0 && dy == 0) || nx < 0 || nx >= w || ny < 0 || ny >= h)
            continue;
          const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
          if (bin.pixels[j] && !seen[j]) {
            seen[j] = 1;
            stack.push_back(static_cast<int>(j));
          }
        }
    }
  }
  return count;
}

}  // namespace tu
