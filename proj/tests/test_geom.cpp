#include <doctest.h>

#include <cmath>

#include "brdffield/geom.hpp"
#include "brdffield/rng.hpp"
#include "test_util.hpp"

using namespace brdffield;
using testutil::angle_diff;

TEST_SUITE("geom") {

TEST_CASE("spherical to cartesian fixed points") {
  const Vec3 pole = sph_to_cart(SphericalDir{0.0, 2.3});
  CHECK(pole.x == 0.0);
  CHECK(pole.y == 0.0);
  CHECK(pole.z == 1.0);

  const Vec3 xdir = sph_to_cart(SphericalDir{kHalfPi, 0.0});
  CHECK(xdir.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(xdir.y) < 1e-15);
  CHECK(std::abs(xdir.z) < 1e-15);

  const Vec3 d = sph_to_cart(SphericalDir{kPi / 4.0, kHalfPi});
  CHECK(std::abs(d.x) < 1e-15);
  CHECK(d.y == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(d.z == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("unit norm and upper hemisphere over random directions") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = sph_to_cart(testutil::random_dir(rng));
    CHECK(dot(v, v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.z >= 0.0);
  }
}

TEST_CASE("coincident directions put the difference vector at the pole") {
  const DirectionPair p{{0.3, 1.0}, {0.3, 1.0}};
  const RusinCoords r = io_to_rusink(p);
  CHECK(r.theta_d < 2e-6);  // acos near its clamped endpoint
  CHECK(r.theta_h == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(r.phi_h == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mirror pair puts the half vector at the normal") {
  const DirectionPair p{{kPi / 4.0, 0.0}, {kPi / 4.0, kPi}};
  const RusinCoords r = io_to_rusink(p);
  CHECK(r.theta_h < 1e-5);
  CHECK(r.phi_h == 0.0);  // pole convention
  CHECK(r.theta_d == doctest::Approx(kPi / 4.0).epsilon(1e-6));
}

TEST_CASE("swapping directions shifts phi_d by pi and fixes the rest") {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const DirectionPair p{testutil::random_dir(rng, 1e-3),
                          testutil::random_dir(rng, 1e-3)};
    const RusinCoords a = io_to_rusink(p);
    if (a.theta_h < 1e-3 || a.theta_d < 1e-3) continue;  // pole conventions
    const RusinCoords b = io_to_rusink(swapped(p));
    CHECK(std::abs(a.theta_h - b.theta_h) < 1e-9);
    CHECK(angle_diff(a.phi_h, b.phi_h) < 1e-9);
    CHECK(std::abs(a.theta_d - b.theta_d) < 1e-9);
    CHECK(angle_diff(a.phi_d + kPi, b.phi_d) < 1e-9);
  }
}

TEST_CASE("round trip over random coordinates") {
  Rng rng(29);
  int valid = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    RusinCoords r;
    r.theta_h = rng.uniform(1e-3, kHalfPi - 1e-3);
    r.phi_h = rng.uniform(0.0, kTwoPi);
    r.theta_d = rng.uniform(1e-3, kHalfPi - 1e-3);
    r.phi_d = rng.uniform(0.0, kTwoPi);
    const auto p = rusink_to_io(r);
    if (!p) continue;
    ++valid;
    const RusinCoords q = io_to_rusink(*p);
    worst = std::max(worst, std::abs(q.theta_h - r.theta_h));
    worst = std::max(worst, angle_diff(q.phi_h, r.phi_h));
    worst = std::max(worst, std::abs(q.theta_d - r.theta_d));
    worst = std::max(worst, angle_diff(q.phi_d, r.phi_d));
  }
  CHECK(valid > 4000);
  CHECK(worst <= 1e-9);
}

TEST_CASE("grazing coordinates below the horizon are flagged") {
  // theta_h, theta_d both near pi/2 with phi_d = pi reconstructs an
  // outgoing direction with z = 2 sin(b) sin(a) - cos(a-b) < 0.
  const RusinCoords r{kHalfPi - 0.01, 0.0, kHalfPi - 0.005, kPi};
  CHECK(!rusink_to_io(r).has_value());

  const RusinCoords fine{0.4, 0.0, 0.3, kHalfPi};
  CHECK(rusink_to_io(fine).has_value());
}

TEST_CASE("antipodal pairs are rejected") {
  const DirectionPair p{{kHalfPi, 0.0}, {kHalfPi, kPi}};
  CHECK_THROWS_AS(io_to_rusink(p), DegenerateInput);
}

TEST_CASE("doubled embedding is pi-periodic in phi_d") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    RusinT<double> r;
    r.theta_h = rng.uniform(0.0, kHalfPi);
    r.phi_h = rng.uniform(0.0, kTwoPi);
    r.theta_d = rng.uniform(0.0, kHalfPi);
    r.phi_d = rng.uniform(0.0, kTwoPi);
    RusinT<double> shifted = r;
    shifted.phi_d += kPi;
    Vec3 h1, d1, h2, d2;
    reciprocity_embed(r, true, h1, d1);
    reciprocity_embed(shifted, true, h2, d2);
    CHECK(std::abs(d1.x - d2.x) < 1e-14);
    CHECK(std::abs(d1.y - d2.y) < 1e-14);
    CHECK(d1.z == d2.z);
    CHECK(h1.x == h2.x);
  }
}

TEST_CASE("difference pole makes the embedding azimuth-free") {
  RusinT<double> r{0.8, 1.1, 0.0, 2.4};
  Vec3 h, d;
  reciprocity_embed(r, true, h, d);
  CHECK(d.x == 0.0);
  CHECK(d.y == 0.0);
  const double soft =
      std::sqrt(4.0 + kAntipodalEps * kAntipodalEps) / 2.0;
  CHECK(d.z == doctest::Approx(soft).epsilon(1e-14));
}

TEST_CASE("embedding's harmonic channels match their vector identities") {
  // a cos(phi_d) = (wo_z - wi_z)/2 and a c sin(phi_d) =
  // (wi_y wo_x - wi_x wo_y)/2 for a = sin(theta_h) sin(theta_d),
  // c = cos(theta_d).
  Rng rng(43);
  for (int i = 0; i < 500; ++i) {
    const DirectionPair pair{testutil::random_dir(rng, 1e-2),
                             testutil::random_dir(rng, 1e-2)};
    const RusinCoords rc = io_to_rusink(pair);
    const RusinT<double> r{rc.theta_h, rc.phi_h, rc.theta_d, rc.phi_d};
    const Vec3 wi = sph_to_cart(pair.wi);
    const Vec3 wo = sph_to_cart(pair.wo);
    const double cd = std::cos(rc.theta_d);
    const double dz = (wo.z - wi.z) * 0.5;
    const double q = (wi.y * wo.x - wi.x * wo.y) * 0.5;
    const double soft =
        std::sqrt(4.0 * cd * cd + kAntipodalEps * kAntipodalEps) * 0.5;

    Vec3 h, d;
    reciprocity_embed(r, false, h, d);
    CHECK(std::abs(d.x - kFirstHarmonicGain * dz * cd) < 1e-9);
    CHECK(std::abs(d.y - kFirstHarmonicGain * q) < 1e-9);
    CHECK(std::abs(d.z - soft) < 1e-12);

    reciprocity_embed(r, true, h, d);
    CHECK(std::abs(d.x - kSecondHarmonicGain * (dz * dz * cd * cd - q * q)) <
          1e-9);
    CHECK(std::abs(d.y - 2.0 * kSecondHarmonicGain * dz * q) < 1e-9);
    CHECK(std::abs(d.z - soft) < 1e-12);
  }
}

TEST_CASE("plain embedding exposes the phi_d seam") {
  RusinT<double> a{0.5, 0.0, 0.4, 0.0};
  RusinT<double> b{0.5, 0.0, 0.4, kPi};
  Vec3 h1, d1, h2, d2;
  reciprocity_embed(a, false, h1, d1);
  reciprocity_embed(b, false, h2, d2);
  CHECK(d1.x == doctest::Approx(-d2.x).epsilon(1e-12));
  CHECK(d1.x > 0.1);
}

TEST_CASE("derivatives flow through the transform and embedding") {
  Rng rng(37);
  int checked = 0;
  for (int trial = 0; trial < 300 && checked < 100; ++trial) {
    const SphericalDir wi = testutil::random_dir(rng, 0.05);
    const double to = rng.uniform(0.05, kHalfPi - 0.05);
    const double po = rng.uniform(0.1, kTwoPi - 0.1);
    {  // stay away from coordinate poles where FD is meaningless
      const RusinCoords r =
          io_to_rusink({wi, {to, po}});
      if (r.theta_h < 5e-2 || r.theta_d < 5e-2) continue;
      if (r.theta_h > kHalfPi - 5e-2) continue;
    }
    for (int comp = 0; comp < 6; ++comp) {
      const auto eval = [&](auto theta, auto phi) {
        using S = decltype(theta);
        const auto r = io_to_rusink(S(wi.theta), S(wi.phi), theta, phi);
        Vec3T<S> h, d;
        reciprocity_embed(r, true, h, d);
        const S vals[6] = {h.x, h.y, h.z, d.x, d.y, d.z};
        return vals[comp];
      };
      const Dual2d out = eval(Dual2d::var_theta(to), Dual2d::var_phi(po));
      const auto fd = testutil::finite_differences(
          [&](double t, double p) { return eval(t, p); }, to, po, 1e-4);
      CHECK(testutil::rel_err(out.dt, fd.dt) < 1e-3);
      CHECK(testutil::rel_err(out.dp, fd.dp) < 1e-3);
      CHECK(testutil::rel_err(out.dtp, fd.dtp) < 5e-3);
    }
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("cart_to_sph inverts sph_to_cart") {
  Rng rng(41);
  for (int i = 0; i < 500; ++i) {
    const SphericalDir d = testutil::random_dir(rng, 1e-6);
    const SphericalDir back = cart_to_sph(sph_to_cart(d));
    CHECK(std::abs(back.theta - d.theta) < 1e-9);
    if (d.theta > 1e-6) CHECK(angle_diff(back.phi, d.phi) < 1e-9);
  }
}

}  // TEST_SUITE
