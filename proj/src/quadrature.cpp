#include "brdffield/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace brdffield {

namespace {
GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n via the Bonnet recurrence.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}
}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order < 1");
  static std::map<int, GaussLegendre> cache;
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

Rgb hemisphere_integral_quadrature(const BrdfFn& f, const SphericalDir& wi,
                                   int order) {
  if (order < 8)
    throw std::invalid_argument("hemisphere_integral_quadrature: order < 8");
  const GaussLegendre& gl = gauss_legendre(order);
  Rgb acc = Rgb::Zero();
  for (int a = 0; a < order; ++a) {
    const double theta = 0.25 * kPi * (gl.nodes[a] + 1.0);
    const double wt = 0.25 * kPi * gl.weights[a];
    const double jac = std::cos(theta) * std::sin(theta);
    Rgb phi_acc = Rgb::Zero();
    for (int b = 0; b < order; ++b) {
      const double phi = kPi * (gl.nodes[b] + 1.0);
      const double wp = kPi * gl.weights[b];
      const auto v = f({wi, SphericalDir{theta, phi}});
      if (v) phi_acc += wp * *v;
    }
    acc += wt * jac * phi_acc;
  }
  return acc;
}

QuadratureResult hemisphere_integral_converged(const BrdfFn& f,
                                               const SphericalDir& wi,
                                               int order) {
  const Rgb coarse = hemisphere_integral_quadrature(f, wi, order);
  const Rgb fine = hemisphere_integral_quadrature(f, wi, 2 * order);
  return {fine, (fine - coarse).abs()};
}

}  // namespace brdffield
