#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>

#include "brdffield/geom.hpp"
#include "brdffield/rgb.hpp"

namespace brdffield {

// Gauss-Legendre nodes/weights on [-1, 1]; cached per order.
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
const GaussLegendre& gauss_legendre(int order);

using BrdfFn = std::function<std::optional<Rgb>(const DirectionPair&)>;

// Tensor-product Gauss-Legendre estimate of
//   integral over the upper hemisphere of f(wi, wo) cos(theta_o) d(wo)
// using `order` nodes per axis. Invalid evaluations contribute zero.
Rgb hemisphere_integral_quadrature(const BrdfFn& f, const SphericalDir& wi,
                                   int order);

// Same integral plus a convergence gauge: |I_2n - I_n| per channel.
struct QuadratureResult {
  Rgb value;
  Rgb refinement_delta;
};
QuadratureResult hemisphere_integral_converged(const BrdfFn& f,
                                               const SphericalDir& wi,
                                               int order);

}  // namespace brdffield
