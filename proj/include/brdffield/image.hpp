#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brdffield/rgb.hpp"

namespace brdffield {

// Row-major linear-radiance image (row 0 on top) with a per-pixel coverage
// mask marking geometry hits.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
  std::vector<std::uint8_t> mask;

  static Image filled(int w, int h, const Rgb& v, bool covered = true);
  const Rgb& at(int x, int y) const { return pixels[y * width + x]; }
  Rgb& at(int x, int y) { return pixels[y * width + x]; }
  bool covered(int x, int y) const { return mask[y * width + x] != 0; }
};

// PFM: "PF" header, width/height line, negative scale (little-endian),
// 32-bit float triplets, rows bottom-up. Lossless round trip at float32
// precision; the coverage mask is not part of the container.
std::vector<std::uint8_t> write_pfm(const Image& img);
Image read_pfm(const std::vector<std::uint8_t>& bytes);
void save_pfm(const Image& img, const std::string& path);
Image load_pfm(const std::string& path);

// PPM (P6, 8-bit) after clamping to [0,1] and applying the sRGB transfer.
std::vector<std::uint8_t> write_ppm(const Image& img);
void save_ppm(const Image& img, const std::string& path);

double srgb_encode(double linear);

}  // namespace brdffield
