#include "brdffield/metrics.hpp"

#include <cmath>

#include "brdffield/errors.hpp"
#include "brdffield/quadrature.hpp"
#include "brdffield/rng.hpp"

namespace brdffield {

BrdfEvaluator make_evaluator(const BrdfSource& src) {
  BrdfEvaluator ev;
  ev.isotropic = source_isotropic(src);
  // The evaluator owns a copy so it can outlive the caller's source.
  ev.eval = [s = src](const DirectionPair& p) { return source_eval(s, p); };
  return ev;
}

namespace {
// Draws coordinates until both the base pair and its pi-shifted partner are
// reachable and evaluable; the rejection loop consumes from one
// deterministic stream. Shifting phi_d by pi is exactly the slot swap of
// the reconstructed pair, so the partner is built that way rather than
// re-running the inverse transform (whose rounding would be amplified by
// grazing-angle evaluations).
bool draw_pair(const BrdfEvaluator& f, Rng& rng, double phi_d_lo,
               double phi_d_hi, Rgb& va, Rgb& vb) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    RusinCoords r;
    r.theta_h = rng.uniform(0.0, kHalfPi);
    r.theta_d = rng.uniform(0.0, kHalfPi);
    r.phi_h = f.isotropic ? 0.0 : rng.uniform(0.0, kTwoPi);
    r.phi_d = phi_d_lo == phi_d_hi ? phi_d_lo : rng.uniform(phi_d_lo, phi_d_hi);
    const auto pa = rusink_to_io(r);
    if (!pa) continue;
    const auto ea = f.eval(*pa);
    const auto eb = f.eval(swapped(*pa));
    if (!ea || !eb) continue;
    va = *ea;
    vb = *eb;
    return true;
  }
  return false;
}
}  // namespace

double hri(const BrdfEvaluator& f, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("hri: sample count must be >= 1");
  Rng rng(seed);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    Rgb va, vb;
    if (!draw_pair(f, rng, 0.0, kPi, va, vb))
      throw DataError("hri: could not draw valid geometry");
    const double d = va.mean() - vb.mean();
    acc += d * d;
  }
  return acc / n;
}

double hci(const BrdfEvaluator& f, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("hci: sample count must be >= 1");
  Rng rng(seed);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    Rgb va, vb;
    if (!draw_pair(f, rng, 0.0, 0.0, va, vb))
      throw DataError("hci: could not draw valid geometry");
    acc += std::abs(va.mean() - vb.mean());
  }
  return acc / n;
}

double epi(const BrdfSource& src, int wi_count, int quad_order,
           std::uint64_t seed, bool paper_max_form) {
  if (wi_count < 1) throw ConfigError("epi: wi_count must be >= 1");
  Rng rng(seed);
  const FieldModel* anti = source_antiderivative_field(src);
  double acc = 0.0;
  for (int i = 0; i < wi_count; ++i) {
    const SphericalDir wi = sample_cosine_hemisphere(rng);
    Rgb I;
    if (anti) {
      I = hemisphere_integral_closed(*anti, wi);
    } else {
      I = hemisphere_integral_quadrature(
          [&src](const DirectionPair& p) { return source_eval(src, p); }, wi,
          quad_order);
    }
    const double m = I.mean();
    acc += paper_max_form ? std::max(1.0, m) : std::max(m - 1.0, 0.0);
  }
  return acc / wi_count;
}

double eci(const Image& furnace_image) {
  double acc = 0.0;
  long count = 0;
  for (int y = 0; y < furnace_image.height; ++y)
    for (int x = 0; x < furnace_image.width; ++x) {
      if (!furnace_image.covered(x, y)) continue;
      acc += std::max(furnace_image.at(x, y).mean() - 1.0, 0.0);
      ++count;
    }
  if (count == 0) throw DataError("eci: empty coverage mask");
  return acc / count;
}

namespace {
constexpr double kPsnrCap = 99.0;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// sRGB primaries (D65) linear RGB -> XYZ.
void rgb_to_xyz(const Rgb& rgb, double& X, double& Y, double& Z) {
  const double r = clamp01(rgb[0]), g = clamp01(rgb[1]), b = clamp01(rgb[2]);
  X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
}

double lab_f(double t) {
  constexpr double d = 6.0 / 29.0;
  return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
}

void rgb_to_lab(const Rgb& rgb, double& L, double& a, double& b) {
  double X, Y, Z;
  rgb_to_xyz(rgb, X, Y, Z);
  const double fx = lab_f(X / 0.95047);
  const double fy = lab_f(Y / 1.0);
  const double fz = lab_f(Z / 1.08883);
  L = 116.0 * fy - 16.0;
  a = 500.0 * (fx - fy);
  b = 200.0 * (fy - fz);
}

// Mean SSIM over the valid interior (full 11x11 Gaussian support,
// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1).
double ssim_channel(const Image& a, const Image& b, int ch) {
  constexpr int kHalf = 5;
  double kernel[11][11];
  double ksum = 0.0;
  for (int i = -kHalf; i <= kHalf; ++i)
    for (int j = -kHalf; j <= kHalf; ++j) {
      const double w = std::exp(-(i * i + j * j) / (2.0 * 1.5 * 1.5));
      kernel[i + kHalf][j + kHalf] = w;
      ksum += w;
    }
  for (auto& row : kernel)
    for (double& w : row) w /= ksum;

  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  double acc = 0.0;
  long count = 0;
  for (int y = kHalf; y < a.height - kHalf; ++y)
    for (int x = kHalf; x < a.width - kHalf; ++x) {
      double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
      for (int i = -kHalf; i <= kHalf; ++i)
        for (int j = -kHalf; j <= kHalf; ++j) {
          const double w = kernel[i + kHalf][j + kHalf];
          const double va = clamp01(a.at(x + j, y + i)[ch]);
          const double vb = clamp01(b.at(x + j, y + i)[ch]);
          mu_a += w * va;
          mu_b += w * vb;
          aa += w * va * va;
          bb += w * vb * vb;
          ab += w * va * vb;
        }
      const double var_a = aa - mu_a * mu_a;
      const double var_b = bb - mu_b * mu_b;
      const double cov = ab - mu_a * mu_b;
      const double s = ((2 * mu_a * mu_b + kC1) * (2 * cov + kC2)) /
                       ((mu_a * mu_a + mu_b * mu_b + kC1) *
                        (var_a + var_b + kC2));
      acc += s;
      ++count;
    }
  return count > 0 ? acc / count : 1.0;
}
}  // namespace

ImageMetrics image_metrics(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw DataError("image_metrics: dimension mismatch");
  ImageMetrics m;
  const std::size_t n = a.pixels.size();
  double mse01 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const double d = a.pixels[i][c] - b.pixels[i][c];
      m.mae += std::abs(d);
      m.mse += d * d;
      const double d01 = clamp01(a.pixels[i][c]) - clamp01(b.pixels[i][c]);
      mse01 += d01 * d01;
    }
    double la, aa, ba, lb, ab, bb;
    rgb_to_lab(a.pixels[i], la, aa, ba);
    rgb_to_lab(b.pixels[i], lb, ab, bb);
    m.delta_e += std::sqrt((la - lb) * (la - lb) + (aa - ab) * (aa - ab) +
                           (ba - bb) * (ba - bb));
  }
  m.mae /= static_cast<double>(3 * n);
  m.mse /= static_cast<double>(3 * n);
  m.delta_e /= static_cast<double>(n);
  mse01 /= static_cast<double>(3 * n);
  m.psnr = mse01 <= 0.0 ? kPsnrCap
                        : std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse01));
  m.ssim = (ssim_channel(a, b, 0) + ssim_channel(a, b, 1) +
            ssim_channel(a, b, 2)) /
           3.0;
  return m;
}

double scaled_for_table(double raw) { return raw * 1e3; }

}  // namespace brdffield
