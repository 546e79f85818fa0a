#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brdffield/geom.hpp"
#include "brdffield/rgb.hpp"

namespace brdffield {

// Dense isotropic half-angle table in the standard measured-BRDF binary
// layout: three little-endian int32 dims (90, 90, 180), then
// 3*90*90*180 little-endian float64 samples, channel-major (all red, then
// green, then blue), index = phi_d + 180*(theta_d + 90*theta_h).
// Negative stored entries mark invalid cells.
struct MerlBrdf {
  static constexpr int kNThetaH = 90;
  static constexpr int kNThetaD = 90;
  static constexpr int kNPhiD = 180;
  static constexpr int kCells = kNThetaH * kNThetaD * kNPhiD;
  static constexpr std::array<double, 3> kScale = {1.0 / 1500.0, 1.15 / 1500.0,
                                                   1.66 / 1500.0};

  std::vector<double> table;  // size 3*kCells, raw (unscaled) values

  double stored(int channel, int cell) const {
    return table[static_cast<std::size_t>(channel) * kCells + cell];
  }
  double& stored(int channel, int cell) {
    return table[static_cast<std::size_t>(channel) * kCells + cell];
  }
};

struct MerlIndex {
  int theta_h = 0;
  int theta_d = 0;
  int phi_d = 0;
  int cell() const {
    return phi_d + MerlBrdf::kNPhiD * (theta_d + MerlBrdf::kNThetaD * theta_h);
  }
};

// theta_h uses the square-root mapping; theta_d is linear; phi_d is folded
// to [0, pi) by reciprocity before linear indexing.
MerlIndex merl_index(const RusinCoords& r);

// Cell-center coordinates, inverse of merl_index (phi_h fixed to 0).
RusinCoords merl_cell_coords(const MerlIndex& idx);

MerlBrdf parse_merl(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_merl(const MerlBrdf& m);
MerlBrdf load_merl_file(const std::string& path);
void save_merl_file(const MerlBrdf& m, const std::string& path);

// Scaled reflectance at the nearest cell; empty for invalid cells.
std::optional<Rgb> merl_eval(const MerlBrdf& m, const DirectionPair& p);
std::optional<Rgb> merl_eval_coords(const MerlBrdf& m, const RusinCoords& r);

}  // namespace brdffield
