#include "brdffield/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "brdffield/errors.hpp"

namespace brdffield {

Image Image::filled(int w, int h, const Rgb& v, bool covered) {
  Image img;
  img.width = w;
  img.height = h;
  img.pixels.assign(static_cast<std::size_t>(w) * h, v);
  img.mask.assign(static_cast<std::size_t>(w) * h, covered ? 1 : 0);
  return img;
}

double srgb_encode(double linear) {
  const double x = std::clamp(linear, 0.0, 1.0);
  return x <= 0.0031308 ? 12.92 * x
                        : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
}

namespace {
void put_f32_le(std::vector<std::uint8_t>& out, float f) {
  const std::uint32_t b = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(b >> (8 * i)));
}
float get_f32_le(const std::uint8_t* p) {
  std::uint32_t b = 0;
  for (int i = 3; i >= 0; --i) b = (b << 8) | p[i];
  return std::bit_cast<float>(b);
}
}  // namespace

std::vector<std::uint8_t> write_pfm(const Image& img) {
  std::string header = "PF\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n-1.0\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<std::size_t>(img.width) * img.height * 12);
  for (int y = img.height - 1; y >= 0; --y)
    for (int x = 0; x < img.width; ++x) {
      const Rgb& p = img.at(x, y);
      put_f32_le(out, static_cast<float>(p[0]));
      put_f32_le(out, static_cast<float>(p[1]));
      put_f32_le(out, static_cast<float>(p[2]));
    }
  return out;
}

Image read_pfm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  const auto token = [&]() -> std::string {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos]))
      t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  if (token() != "PF") throw DataError("pfm: missing 'PF' magic");
  int w = 0, h = 0;
  double scale = 0.0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    scale = std::stod(token());
  } catch (const std::exception&) {
    throw DataError("pfm: malformed header");
  }
  if (w <= 0 || h <= 0) throw DataError("pfm: bad dimensions");
  if (scale >= 0.0) throw DataError("pfm: big-endian payload not supported");
  ++pos;  // single whitespace after the scale line
  const std::size_t need = static_cast<std::size_t>(w) * h * 12;
  if (bytes.size() - pos < need) throw DataError("pfm: truncated payload");
  Image img = Image::filled(w, h, Rgb::Zero());
  for (int y = h - 1; y >= 0; --y)
    for (int x = 0; x < w; ++x) {
      Rgb& p = img.at(x, y);
      p[0] = get_f32_le(bytes.data() + pos);
      p[1] = get_f32_le(bytes.data() + pos + 4);
      p[2] = get_f32_le(bytes.data() + pos + 8);
      pos += 12;
    }
  return img;
}

void save_pfm(const Image& img, const std::string& path) {
  const auto bytes = write_pfm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("pfm: cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Image load_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("pfm: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_pfm(bytes);
}

std::vector<std::uint8_t> write_ppm(const Image& img) {
  std::string header = "P6\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const Rgb& p = img.at(x, y);
      for (int c = 0; c < 3; ++c)
        out.push_back(static_cast<std::uint8_t>(
            std::lround(255.0 * srgb_encode(p[c]))));
    }
  return out;
}

void save_ppm(const Image& img, const std::string& path) {
  const auto bytes = write_ppm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("ppm: cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace brdffield
