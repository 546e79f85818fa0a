#pragma once

#include <cmath>
#include <variant>

#include "brdffield/geom.hpp"
#include "brdffield/rgb.hpp"

namespace brdffield {

// Closed-form reference materials. Lambertian and the microfacet model are
// reciprocal by construction; ScaledConstant can deliberately exceed the
// passivity bound (hemisphere cosine integral = pi * value).
struct Lambertian {
  Rgb albedo = Rgb::Constant(0.5);
};

struct ScaledConstant {
  Rgb value = Rgb::Constant(1.0 / kPi);
};

struct GgxMicrofacet {
  double roughness = 0.3;  // alpha in (0, 1]
  Rgb f0 = Rgb::Constant(1.0);
  Rgb diffuse = Rgb::Zero();
};

using AnalyticBrdf = std::variant<Lambertian, ScaledConstant, GgxMicrofacet>;

namespace analytic_detail {
inline double ggx_d(double cos_h, double alpha) {
  const double a2 = alpha * alpha;
  const double t = cos_h * cos_h * (a2 - 1.0) + 1.0;
  return a2 / (kPi * t * t);
}
inline double ggx_g1(double cos_v, double alpha) {
  const double a2 = alpha * alpha;
  return 2.0 * cos_v / (cos_v + std::sqrt(a2 + (1.0 - a2) * cos_v * cos_v));
}
}  // namespace analytic_detail

inline Rgb analytic_eval(const AnalyticBrdf& a, const DirectionPair& p) {
  if (const auto* l = std::get_if<Lambertian>(&a)) return l->albedo / kPi;
  if (const auto* s = std::get_if<ScaledConstant>(&a)) return s->value;
  const auto& g = std::get<GgxMicrofacet>(a);
  const Vec3 wi = sph_to_cart(p.wi);
  const Vec3 wo = sph_to_cart(p.wo);
  const Vec3 sum = wi + wo;
  const double n = std::sqrt(dot(sum, sum));
  if (n < 1e-12) return g.diffuse / kPi;
  const Vec3 h = sum * (1.0 / n);
  const double ci = std::max(wi.z, 1e-9);
  const double co = std::max(wo.z, 1e-9);
  // h.(wi) == h.(wo); using the half-angle cosine keeps the Fresnel term
  // manifestly symmetric.
  const double ch = std::max(0.0, 0.5 * (dot(h, wi) + dot(h, wo)));
  const double d = analytic_detail::ggx_d(h.z, g.roughness);
  const double gg = analytic_detail::ggx_g1(ci, g.roughness) *
                    analytic_detail::ggx_g1(co, g.roughness);
  const Rgb fresnel = g.f0 + (Rgb::Ones() - g.f0) * std::pow(1.0 - ch, 5.0);
  return fresnel * (d * gg / (4.0 * ci * co)) + g.diffuse / kPi;
}

}  // namespace brdffield
