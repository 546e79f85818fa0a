#pragma once

#include <Eigen/Core>

namespace brdffield {

// Linear RGB reflectance/radiance triple (1/steradian for BRDF values).
using Rgb = Eigen::Array3d;

}  // namespace brdffield
