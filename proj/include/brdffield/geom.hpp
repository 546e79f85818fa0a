#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "brdffield/dual.hpp"
#include "brdffield/errors.hpp"

namespace brdffield {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Polar clamp applied before derivative-carrying transforms; the scaled
// derivative divides by cos(theta)*sin(theta), singular at both ends.
inline constexpr double kPoleGuard = 1e-6;

// Upper-hemisphere direction. theta in [0, pi/2], phi in [0, 2*pi).
struct SphericalDir {
  double theta = 0.0;
  double phi = 0.0;
};

// Half/difference-vector coordinates. theta_h, theta_d in [0, pi/2];
// phi_h, phi_d in [0, 2*pi).
struct RusinCoords {
  double theta_h = 0.0;
  double phi_h = 0.0;
  double theta_d = 0.0;
  double phi_d = 0.0;
};

struct DirectionPair {
  SphericalDir wi;
  SphericalDir wo;
};

inline DirectionPair swapped(const DirectionPair& p) { return {p.wo, p.wi}; }

template <class S>
struct Vec3T {
  S x{}, y{}, z{};
};

using Vec3 = Vec3T<double>;

template <class S>
Vec3T<S> operator+(const Vec3T<S>& a, const Vec3T<S>& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
template <class S>
Vec3T<S> operator-(const Vec3T<S>& a, const Vec3T<S>& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
template <class S>
Vec3T<S> operator*(const Vec3T<S>& a, const S& c) {
  return {a.x * c, a.y * c, a.z * c};
}
template <class S>
S dot(const Vec3T<S>& a, const Vec3T<S>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class S>
struct RusinT {
  S theta_h{}, phi_h{}, theta_d{}, phi_d{};
};

namespace geom_detail {
template <class S>
S clamp_unit(const S& x) {
  // Keeps acos inputs strictly inside (-1, 1).
  if (value(x) >= 1.0 - 1e-12) return S(1.0 - 1e-12);
  if (value(x) <= -1.0 + 1e-12) return S(-1.0 + 1e-12);
  return x;
}

template <class S>
S clamp_polar(const S& x) {
  if (value(x) < kPoleGuard) return S(kPoleGuard);
  if (value(x) > kHalfPi - kPoleGuard) return S(kHalfPi - kPoleGuard);
  return x;
}

template <class S>
S wrap_two_pi(const S& x) {
  if (value(x) < 0.0) return x + kTwoPi;
  if (value(x) >= kTwoPi) return x - kTwoPi;
  return x;
}
}  // namespace geom_detail

template <class S>
Vec3T<S> sph_to_cart(const S& theta, const S& phi) {
  using std::cos;
  using std::sin;
  const S st = sin(theta);
  return {st * cos(phi), st * sin(phi), cos(theta)};
}

inline Vec3 sph_to_cart(const SphericalDir& d) {
  return sph_to_cart(d.theta, d.phi);
}

// Inverse of sph_to_cart for unit vectors with z >= 0. phi convention 0 at
// the pole, where the azimuth is undefined.
inline SphericalDir cart_to_sph(const Vec3& v) {
  const double z = std::min(1.0, std::max(-1.0, v.z));
  const double theta = std::acos(z);
  if (theta < 1e-9) return {theta, 0.0};
  double phi = std::atan2(v.y, v.x);
  if (phi < 0.0) phi += kTwoPi;
  return {theta, phi};
}

// Half/difference transform. The scalar type S may carry derivatives, in
// which case they chain through the full construction. Angle inputs are
// pole-clamped; truly antipodal pairs are rejected first.
template <class S>
RusinT<S> io_to_rusink(const S& theta_i, const S& phi_i, const S& theta_o,
                       const S& phi_o) {
  using std::acos;
  using std::atan2;
  using std::cos;
  using std::sin;
  using std::sqrt;
  using geom_detail::clamp_polar;
  using geom_detail::clamp_unit;
  {
    const Vec3 wi_raw = sph_to_cart(value(theta_i), value(phi_i));
    const Vec3 wo_raw = sph_to_cart(value(theta_o), value(phi_o));
    const Vec3 s = wi_raw + wo_raw;
    if (std::sqrt(dot(s, s)) < 1e-8)
      throw DegenerateInput("io_to_rusink: near-antipodal direction pair");
  }
  const S ti = clamp_polar(theta_i);
  const S to = clamp_polar(theta_o);
  const Vec3T<S> wi = sph_to_cart(ti, phi_i);
  const Vec3T<S> wo = sph_to_cart(to, phi_o);
  const Vec3T<S> sum = wi + wo;
  const S inv_norm = S(1.0) / sqrt(dot(sum, sum));
  const Vec3T<S> h = sum * inv_norm;

  RusinT<S> r;
  r.theta_h = acos(clamp_unit(h.z));
  const bool h_at_pole = value(h.z) > 1.0 - 1e-10;
  r.phi_h = h_at_pole ? S(0.0) : geom_detail::wrap_two_pi(atan2(h.y, h.x));

  // d = R_b(-theta_h) R_n(-phi_h) wi, rotations written out in angle form.
  const S cph = cos(r.phi_h), sph = sin(r.phi_h);
  const S x1 = wi.x * cph + wi.y * sph;
  const S y1 = wi.y * cph - wi.x * sph;
  const S cth = cos(r.theta_h), sth = sin(r.theta_h);
  const S dx = x1 * cth - wi.z * sth;
  const S dz = x1 * sth + wi.z * cth;

  r.theta_d = acos(clamp_unit(dz));
  const bool d_at_pole = value(dz) > 1.0 - 1e-10;
  r.phi_d = d_at_pole ? S(0.0) : geom_detail::wrap_two_pi(atan2(y1, dx));
  return r;
}

inline RusinCoords io_to_rusink(const DirectionPair& p) {
  const RusinT<double> r =
      io_to_rusink(p.wi.theta, p.wi.phi, p.wo.theta, p.wo.phi);
  return {r.theta_h, r.phi_h, r.theta_d, r.phi_d};
}

// Reconstructs the direction pair; empty when either reconstructed
// direction falls below the horizon (the caller decides how to skip).
inline std::optional<DirectionPair> rusink_to_io(const RusinCoords& r) {
  const Vec3 h = sph_to_cart(r.theta_h, r.phi_h);
  const Vec3 d = sph_to_cart(r.theta_d, r.phi_d);
  // wi = R_n(phi_h) R_b(theta_h) d
  const double cth = std::cos(r.theta_h), sth = std::sin(r.theta_h);
  const double x1 = d.x * cth + d.z * sth;
  const double z1 = d.z * cth - d.x * sth;
  const double cph = std::cos(r.phi_h), sph = std::sin(r.phi_h);
  const Vec3 wi{x1 * cph - d.y * sph, x1 * sph + d.y * cph, z1};
  const Vec3 wo = h * (2.0 * dot(wi, h)) - wi;
  if (wi.z < -1e-12 || wo.z < -1e-12) return std::nullopt;
  return DirectionPair{cart_to_sph(wi), cart_to_sph(wo)};
}

// Input scaling of the azimuthal harmonic channels.
inline constexpr double kFirstHarmonicGain = 2.0;
inline constexpr double kSecondHarmonicGain = 4.0;
// Softening of the half-vector normalization and the cos(theta_d) channel:
// |wi + wo| is replaced by sqrt(|wi + wo|^2 + eps^2), which keeps the
// channels smooth through the antipodal limit. Away from it the h block is
// shorter than unit length by under eps^2 / (2 |wi+wo|^2).
inline constexpr double kAntipodalEps = 0.15;

// First-layer inputs of the field network: the half vector plus a
// difference block carrying cos(theta_d) and phi_d harmonics modulated by
// powers of a = sin(theta_h) sin(theta_d) and c = cos(theta_d). With
// doubled=true the block uses the second harmonic (cos 2phi_d, sin 2phi_d),
// invariant to a pi shift of phi_d; doubled=false keeps the first harmonic
// (the non-reciprocal baseline).
//
// The exact modulation matters: these channels equal polynomials in the
// direction components,
//   a c   cos(phi_d)  = (wo_z - wi_z)/2 * c      (and c^2 = |wi+wo|^2/4)
//   a c   sin(phi_d)  = -((wi x wo).n)/2
//   a^2 c^2 cos(2phi_d) = ((wo_z-wi_z)^2 c^2 - ((wi x wo).n)^2)/4
//   a^2 c   sin(2phi_d) = -(wo_z-wi_z) ((wi x wo).n)/2
// so they are free of the frame spin that makes the bare angles
// phi_h/phi_d singular at theta_h = 0, theta_d = 0 and toward antipodal
// pairs. A bare sin(theta_d) (cos 2phi_d, sin 2phi_d) block looks
// equivalent on paper but oscillates without bound near those loci, which
// breaks both quadrature of the derivative field and its fitting.
template <class S>
void reciprocity_embed(const RusinT<S>& r, bool doubled, Vec3T<S>& h,
                       Vec3T<S>& d_prime) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const S c = cos(r.theta_d);
  const S a = sin(r.theta_h) * sin(r.theta_d);
  const S soft_norm = sqrt(c * c * 4.0 + S(kAntipodalEps * kAntipodalEps));
  const S c_soft = soft_norm * 0.5;
  // |wi + wo| = 2 cos(theta_d); the softened normalization shortens h by
  // the same antipodal floor used for the c channel.
  h = sph_to_cart(r.theta_h, r.phi_h) * (c * 2.0 / soft_norm);
  if (doubled) {
    const S pd2 = S(2.0) * r.phi_d;
    d_prime = {S(kSecondHarmonicGain) * a * a * c * c * cos(pd2),
               S(kSecondHarmonicGain) * a * a * c * sin(pd2), c_soft};
  } else {
    d_prime = {S(kFirstHarmonicGain) * a * c * cos(r.phi_d),
               S(kFirstHarmonicGain) * a * c * sin(r.phi_d), c_soft};
  }
}

}  // namespace brdffield
