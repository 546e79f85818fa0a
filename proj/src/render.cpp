#include "brdffield/render.hpp"

#include <cmath>

#include "brdffield/quadrature.hpp"

namespace brdffield {

namespace {
struct Frame {
  Vec3 t, b, n;
  Vec3 to_local(const Vec3& v) const {
    return {dot(v, t), dot(v, b), dot(v, n)};
  }
};

// Branch-stable orthonormal basis around n (Duff et al. construction).
Frame make_frame(const Vec3& n) {
  const double sign = std::copysign(1.0, n.z);
  const double a = -1.0 / (sign + n.z);
  const double b = n.x * n.y * a;
  return {Vec3{1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x},
          Vec3{b, sign + n.y * n.y * a, -n.y}, n};
}

struct PixelHit {
  bool hit = false;
  Vec3 normal;
};

PixelHit trace(const Scene& s, int x, int y) {
  const double e = s.ortho_extent;
  const double px = -e + 2.0 * e * (x + 0.5) / s.width;
  const double py = e - 2.0 * e * (y + 0.5) / s.height;
  const double r2 = px * px + py * py;
  if (r2 > 1.0) return {};
  return {true, Vec3{px, py, std::sqrt(1.0 - r2)}};
}
}  // namespace

std::vector<std::uint8_t> sphere_coverage(const Scene& s) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(s.width) * s.height,
                                 0);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      mask[y * s.width + x] = trace(s, x, y).hit ? 1 : 0;
  return mask;
}

Image render_direct(const BrdfSource& src, const Scene& s) {
  const auto& light = std::get<PointLight>(s.light);
  const Vec3 wi_world = sph_to_cart(light.direction);
  Image img = Image::filled(s.width, s.height, Rgb::Zero(), false);
  img.mask = sphere_coverage(s);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const PixelHit hit = trace(s, x, y);
      if (!hit.hit) continue;
      const Frame frame = make_frame(hit.normal);
      const Vec3 wi_l = frame.to_local(wi_world);
      const Vec3 wo_l = frame.to_local(Vec3{0.0, 0.0, 1.0});
      if (wi_l.z <= 1e-9 || wo_l.z <= 1e-9) continue;  // unlit or grazing
      const DirectionPair p{cart_to_sph(wi_l), cart_to_sph(wo_l)};
      const auto f = source_eval(src, p);
      if (!f) continue;  // invalid measured cell renders black
      img.at(x, y) = *f * wi_l.z * light.radiance;
    }
  return img;
}

Image render_furnace(const BrdfSource& src, const Scene& s, int quad_order) {
  Image img = Image::filled(s.width, s.height, Rgb::Zero(), false);
  img.mask = sphere_coverage(s);
  const FieldModel* anti = source_antiderivative_field(src);
  const BrdfFn fn = [&src](const DirectionPair& p) {
    return source_eval(src, p);
  };
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const PixelHit hit = trace(s, x, y);
      if (!hit.hit) continue;
      const Frame frame = make_frame(hit.normal);
      Vec3 wi_l = frame.to_local(Vec3{0.0, 0.0, 1.0});
      wi_l.z = std::max(wi_l.z, 1e-9);
      const SphericalDir wi = cart_to_sph(wi_l);
      img.at(x, y) = anti ? hemisphere_integral_closed(*anti, wi)
                          : hemisphere_integral_quadrature(fn, wi, quad_order);
    }
  return img;
}

Image furnace_excess(const Image& img) {
  Image out = img;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(x, y) = img.covered(x, y) ? Rgb(img.at(x, y).max(1.0) - 1.0)
                                       : Rgb(Rgb::Zero());
  return out;
}

}  // namespace brdffield
