#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "brdffield/image.hpp"
#include "brdffield/source.hpp"

namespace brdffield {

// Thin evaluation handle used by the Monte-Carlo metrics; constructible
// from any BrdfSource and, in tests, from bare lambdas.
struct BrdfEvaluator {
  std::function<std::optional<Rgb>(const DirectionPair&)> eval;
  bool isotropic = false;
};

BrdfEvaluator make_evaluator(const BrdfSource& src);

// Helmholtz reciprocity index: mean squared channel-mean difference between
// f at (theta_h, phi_h, theta_d, phi_d) and at phi_d + pi, with
// theta_h, theta_d ~ U[0, pi/2] and phi_d ~ U[0, pi]. phi_h is sampled the
// same way unless the source is isotropic (then fixed to 0). Coordinates
// with unreachable geometry or invalid cells are redrawn.
double hri(const BrdfEvaluator& f, int n, std::uint64_t seed);

// Helmholtz continuity index: mean absolute channel-mean gap across the
// phi_d in {0, pi} seam.
double hci(const BrdfEvaluator& f, int n, std::uint64_t seed);

// Energy passivity index: mean hinge excess of the hemisphere cosine
// integral over 1 across cosine-weighted incident directions. Antiderivative
// fields use the closed form, everything else the quadrature oracle.
// paper_max_form swaps hinge(I-1) for the printed max(1, I) variant.
double epi(const BrdfSource& src, int wi_count, int quad_order,
           std::uint64_t seed, bool paper_max_form = false);

// Energy creation index of a furnace rendering: mean over covered pixels of
// max(0, channel-mean - 1).
double eci(const Image& furnace_image);

struct ImageMetrics {
  double mae = 0.0;
  double mse = 0.0;
  double psnr = 0.0;     // dB, capped at 99
  double ssim = 0.0;
  double delta_e = 0.0;  // CIE76 in L*a*b*, D65
};

// a is the reference, b the candidate; images must share dimensions.
// MAE/MSE are over linear RGB; PSNR/SSIM over values clamped to [0, 1];
// delta-E converts clamped linear RGB (sRGB primaries) through XYZ to Lab.
ImageMetrics image_metrics(const Image& a, const Image& b);

// Table-style presentation of a metric value (reported x 10^3).
double scaled_for_table(double raw);

}  // namespace brdffield
