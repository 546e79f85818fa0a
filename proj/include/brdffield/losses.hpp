#pragma once

#include <array>
#include <cmath>

#include "brdffield/errors.hpp"
#include "brdffield/rgb.hpp"
#include "brdffield/tape.hpp"

namespace brdffield {

namespace loss_detail {
template <class R>
void require_finite(const std::array<R, 3>& pred, const Rgb& gt) {
  for (int c = 0; c < 3; ++c)
    if (!std::isfinite(value(pred[c])) || !std::isfinite(gt[c]))
      throw DivergenceError("loss input is non-finite");
}
}  // namespace loss_detail

// Mean absolute logarithmic loss on cosine-weighted reflectance, averaged
// over channels. Predictions may be negative (raw derivative values); the
// log1p argument is floored at -1 + 1e-12.
template <class R>
R loss_fit(const std::array<R, 3>& pred, const Rgb& gt, double theta_i) {
  using std::abs;
  using std::log1p;
  using std::max;
  loss_detail::require_finite(pred, gt);
  const double cos_i = std::max(0.0, std::cos(theta_i));
  R acc(0.0);
  for (int c = 0; c < 3; ++c) {
    const double target = std::log1p(gt[c] * cos_i);
    const R floored = max(pred[c] * R(cos_i), R(-1.0 + 1e-12));
    acc += abs(log1p(floored) - R(target));
  }
  return acc * R(1.0 / 3.0);
}

// Logarithmic loss on the squared norm of the cosine-weighted RGB vector;
// constrains magnitude so per-channel errors cannot trade off into hue
// shifts at low reflectance.
template <class R>
R loss_ce(const std::array<R, 3>& pred, const Rgb& gt, double theta_i) {
  using std::abs;
  using std::log1p;
  loss_detail::require_finite(pred, gt);
  const double cos_i = std::max(0.0, std::cos(theta_i));
  const double gt_n2 = (gt * cos_i).square().sum();
  R n2(0.0);
  for (int c = 0; c < 3; ++c) {
    const R s = pred[c] * R(cos_i);
    n2 += s * s;
  }
  return abs(log1p(n2) - R(std::log1p(gt_n2)));
}

template <class R>
R hinge(const R& x) {
  using std::max;
  return max(x, R(0.0));
}

// Weighted combination of the three loss terms.
inline double combine_total(double fit, double epl, double ce,
                            double lambda_epl, double lambda_ce) {
  return fit + lambda_epl * epl + lambda_ce * ce;
}

}  // namespace brdffield
