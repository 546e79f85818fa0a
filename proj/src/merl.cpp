#include "brdffield/merl.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "brdffield/errors.hpp"

namespace brdffield {

namespace {
std::uint32_t read_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

double read_f64_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

void write_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void write_f64_le(std::vector<std::uint8_t>& out, double d) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}
}  // namespace

MerlIndex merl_index(const RusinCoords& r) {
  MerlIndex idx;
  const double th = std::clamp(r.theta_h, 0.0, kHalfPi);
  idx.theta_h = std::min(MerlBrdf::kNThetaH - 1,
                         static_cast<int>(std::sqrt(th / kHalfPi) *
                                          MerlBrdf::kNThetaH));
  const double td = std::clamp(r.theta_d, 0.0, kHalfPi);
  idx.theta_d = std::min(MerlBrdf::kNThetaD - 1,
                         static_cast<int>(td / kHalfPi * MerlBrdf::kNThetaD));
  double pd = std::fmod(r.phi_d, kPi);
  if (pd < 0.0) pd += kPi;
  idx.phi_d = std::min(MerlBrdf::kNPhiD - 1,
                       static_cast<int>(pd / kPi * MerlBrdf::kNPhiD));
  return idx;
}

RusinCoords merl_cell_coords(const MerlIndex& idx) {
  RusinCoords r;
  const double u = (idx.theta_h + 0.5) / MerlBrdf::kNThetaH;
  r.theta_h = u * u * kHalfPi;
  r.phi_h = 0.0;
  r.theta_d = (idx.theta_d + 0.5) / MerlBrdf::kNThetaD * kHalfPi;
  r.phi_d = (idx.phi_d + 0.5) / MerlBrdf::kNPhiD * kPi;
  return r;
}

MerlBrdf parse_merl(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12)
    throw DataError("merl: truncated header, " + std::to_string(bytes.size()) +
                    " bytes (need 12)");
  const int nh = static_cast<int>(read_u32_le(bytes.data()));
  const int nd = static_cast<int>(read_u32_le(bytes.data() + 4));
  const int np = static_cast<int>(read_u32_le(bytes.data() + 8));
  if (nh != MerlBrdf::kNThetaH || nd != MerlBrdf::kNThetaD ||
      np != MerlBrdf::kNPhiD)
    throw DataError("merl: unsupported dims (" + std::to_string(nh) + ", " +
                    std::to_string(nd) + ", " + std::to_string(np) +
                    "), expected (90, 90, 180)");
  const std::size_t expected = 12 + 3ull * MerlBrdf::kCells * 8;
  if (bytes.size() != expected)
    throw DataError("merl: payload length " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(expected) +
                    " (mismatch at byte offset " +
                    std::to_string(std::min(bytes.size(), expected)) + ")");
  MerlBrdf m;
  m.table.resize(3ull * MerlBrdf::kCells);
  for (std::size_t i = 0; i < m.table.size(); ++i)
    m.table[i] = read_f64_le(bytes.data() + 12 + 8 * i);
  return m;
}

std::vector<std::uint8_t> write_merl(const MerlBrdf& m) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + m.table.size() * 8);
  write_u32_le(out, MerlBrdf::kNThetaH);
  write_u32_le(out, MerlBrdf::kNThetaD);
  write_u32_le(out, MerlBrdf::kNPhiD);
  for (double d : m.table) write_f64_le(out, d);
  return out;
}

MerlBrdf load_merl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("merl: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_merl(bytes);
}

void save_merl_file(const MerlBrdf& m, const std::string& path) {
  const auto bytes = write_merl(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("merl: cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::optional<Rgb> merl_eval_coords(const MerlBrdf& m, const RusinCoords& r) {
  const int cell = merl_index(r).cell();
  Rgb out;
  for (int c = 0; c < 3; ++c) {
    const double raw = m.stored(c, cell);
    if (raw < 0.0) return std::nullopt;
    out[c] = raw * MerlBrdf::kScale[c];
  }
  return out;
}

std::optional<Rgb> merl_eval(const MerlBrdf& m, const DirectionPair& p) {
  return merl_eval_coords(m, io_to_rusink(p));
}

}  // namespace brdffield
