#include <doctest.h>

#include <cmath>

#include "brdffield/analytic.hpp"
#include "brdffield/image.hpp"
#include "brdffield/render.hpp"
#include "brdffield/rng.hpp"
#include "test_util.hpp"

using namespace brdffield;

TEST_SUITE("render") {

TEST_CASE("head-on lambertian center pixel is albedo over pi") {
  Scene s;
  s.width = s.height = 65;  // odd: one pixel sits exactly on the axis
  s.light = PointLight{{0.0, 0.0}, Rgb::Ones()};
  const Image img =
      render_direct(BrdfSource{AnalyticBrdf{Lambertian{Rgb::Constant(0.5)}}},
                    s);
  const Rgb center = img.at(32, 32);
  for (int c = 0; c < 3; ++c)
    CHECK(center[c] == doctest::Approx(0.5 / kPi).epsilon(1e-9));
  CHECK(img.covered(32, 32));
  CHECK(!img.covered(0, 0));
}

TEST_CASE("swapping equal-elevation light and view is value-preserving") {
  // The center-pixel radiance is f(wi, wo) cos(theta_i); with both
  // directions at the same polar angle, reciprocity makes the swap exact.
  const AnalyticBrdf g =
      GgxMicrofacet{0.35, Rgb::Constant(0.8), Rgb::Constant(0.2)};
  const DirectionPair p{{0.5, 0.3}, {0.5, 2.1}};
  const double a = analytic_eval(g, p).mean() * std::cos(p.wi.theta);
  const double b =
      analytic_eval(g, swapped(p)).mean() * std::cos(p.wo.theta);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("unlit pixels render black but stay covered") {
  Scene s;
  s.width = s.height = 33;
  s.light = PointLight{{1.2, kPi}, Rgb::Ones()};  // grazing from one side
  const Image img =
      render_direct(BrdfSource{AnalyticBrdf{Lambertian{Rgb::Ones()}}}, s);
  int black_covered = 0;
  for (int y = 0; y < 33; ++y)
    for (int x = 0; x < 33; ++x)
      if (img.covered(x, y) && img.at(x, y).maxCoeff() == 0.0)
        ++black_covered;
  CHECK(black_covered > 50);
}

TEST_CASE("white furnace holds at one for a perfect diffuse sphere") {
  Scene s;
  s.width = s.height = 33;
  s.light = Furnace{};
  const Image img =
      render_furnace(BrdfSource{AnalyticBrdf{Lambertian{Rgb::Ones()}}}, s, 64);
  for (int y = 0; y < 33; ++y)
    for (int x = 0; x < 33; ++x)
      if (img.covered(x, y))
        for (int c = 0; c < 3; ++c)
          CHECK(std::abs(img.at(x, y)[c] - 1.0) < 1e-10);
}

TEST_CASE("furnace scales with the violator's excess") {
  Scene s;
  s.width = s.height = 17;
  s.light = Furnace{};
  const Image img = render_furnace(
      BrdfSource{AnalyticBrdf{ScaledConstant{Rgb::Constant(1.5 / kPi)}}}, s,
      32);
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 17; ++x)
      if (img.covered(x, y))
        CHECK(img.at(x, y)[0] == doctest::Approx(1.5).epsilon(1e-9));

  const Image ex = furnace_excess(img);
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 17; ++x)
      CHECK(ex.at(x, y)[0] ==
            doctest::Approx(ex.covered(x, y) ? 0.5 : 0.0).epsilon(1e-9));
}

TEST_CASE("furnace excess clips absorption to black") {
  Image img = Image::filled(8, 8, Rgb::Constant(0.9));
  const Image ex = furnace_excess(img);
  for (const auto& p : ex.pixels) CHECK(p.maxCoeff() == 0.0);
}

TEST_CASE("coverage masks are identical across renders") {
  Scene direct;
  direct.width = direct.height = 41;
  direct.light = PointLight{{0.3, 1.0}, Rgb::Ones()};
  Scene furnace = direct;
  furnace.light = Furnace{};
  const BrdfSource lam{AnalyticBrdf{Lambertian{Rgb::Constant(0.5)}}};
  const Image a = render_direct(lam, direct);
  const Image b = render_furnace(lam, furnace, 16);
  CHECK(a.mask == b.mask);
  CHECK(a.mask == sphere_coverage(direct));
}

TEST_CASE("renders are deterministic") {
  Scene s;
  s.width = s.height = 21;
  s.light = PointLight{{0.7, 2.0}, Rgb(1.0, 0.8, 0.6)};
  const BrdfSource g{
      AnalyticBrdf{GgxMicrofacet{0.3, Rgb::Constant(0.9), Rgb::Constant(0.1)}}};
  const Image a = render_direct(g, s);
  const Image b = render_direct(g, s);
  for (std::size_t i = 0; i < a.pixels.size(); ++i)
    CHECK((a.pixels[i] == b.pixels[i]).all());
}

TEST_CASE("pfm round trip is lossless at float precision") {
  Rng rng(5);
  Image img = Image::filled(13, 9, Rgb::Zero());
  for (auto& p : img.pixels)
    p = Rgb(rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0),
            rng.uniform(0.0, 4.0));
  const Image back = read_pfm(write_pfm(img));
  REQUIRE(back.width == 13);
  REQUIRE(back.height == 9);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(back.pixels[i][c] ==
            static_cast<double>(static_cast<float>(img.pixels[i][c])));
}

TEST_CASE("single-pixel pfm has the documented byte layout") {
  Image img = Image::filled(1, 1, Rgb(1.0, 0.0, 0.0));
  const auto bytes = write_pfm(img);
  const std::string header(bytes.begin(), bytes.begin() + 11);
  CHECK(header == "PF\n1 1\n-1.0");
  REQUIRE(bytes.size() == 12 + 12);
  // float32 little-endian 1.0f, 0.0f, 0.0f
  const std::uint8_t expected[12] = {0, 0, 0x80, 0x3f, 0, 0, 0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 12; ++i) CHECK(bytes[12 + i] == expected[i]);
}

TEST_CASE("malformed pfm headers are rejected") {
  std::vector<std::uint8_t> junk{'P', 'X', '\n'};
  CHECK_THROWS_AS(read_pfm(junk), DataError);
  auto ok = write_pfm(Image::filled(2, 2, Rgb::Ones()));
  ok.resize(ok.size() - 5);
  CHECK_THROWS_AS(read_pfm(ok), DataError);
}

TEST_CASE("ppm of an all-ones image is saturated") {
  const auto bytes = write_ppm(Image::filled(2, 2, Rgb::Ones()));
  const std::string header(bytes.begin(), bytes.begin() + 11);
  CHECK(header == "P6\n2 2\n255\n");
  for (std::size_t i = 11; i < bytes.size(); ++i) CHECK(bytes[i] == 255);
}

}  // TEST_SUITE
