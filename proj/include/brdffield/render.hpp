#pragma once

#include <variant>

#include "brdffield/image.hpp"
#include "brdffield/metrics.hpp"
#include "brdffield/source.hpp"

namespace brdffield {

// Directional light; `direction` points from the surface toward the light
// in world coordinates, radiance is its unattenuated intensity.
struct PointLight {
  SphericalDir direction{0.0, 0.0};
  Rgb radiance = Rgb::Ones();
};

// Constant white environment of intensity 1.
struct Furnace {};

// Unit sphere at the origin under an orthographic camera on +z. No shadows
// or indirect light; validation imagery only.
struct Scene {
  int width = 256;
  int height = 256;
  std::variant<PointLight, Furnace> light = PointLight{};
  double ortho_extent = 1.05;
};

// Per-pixel boolean sphere coverage at the given resolution; identical for
// every render at that resolution.
std::vector<std::uint8_t> sphere_coverage(const Scene& s);

// Single-bounce direct illumination: f(wi, wo) * cos(theta_i) * L per
// covered pixel, local frame from the sphere normal.
Image render_direct(const BrdfSource& src, const Scene& s);

// Hemispherical-directional integral per covered pixel, the incident
// direction fixed by the pixel's view geometry. Antiderivative fields use
// the closed form; everything else Gauss-Legendre of the given order.
Image render_furnace(const BrdfSource& src, const Scene& s,
                     int quad_order = 64);

// max(0, v - 1) over covered pixels; zero elsewhere.
Image furnace_excess(const Image& img);

}  // namespace brdffield
