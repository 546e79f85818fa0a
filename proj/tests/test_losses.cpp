#include <doctest.h>

#include <array>
#include <cmath>

#include "brdffield/errors.hpp"
#include "brdffield/field.hpp"
#include "brdffield/losses.hpp"
#include "brdffield/rng.hpp"
#include "brdffield/train.hpp"
#include "test_util.hpp"

using namespace brdffield;

namespace {
std::array<double, 3> arr(double r, double g, double b) { return {r, g, b}; }

FieldModel carrier_only(double gain) {
  FieldModel m = make_field_model(FieldMode::kAntiderivative,
                                  Activation::kSoftplus, true, {4});
  m.params.setZero();
  for (int c = 0; c < 3; ++c) m.params[m.ramp_offset() + c] = gain;
  return m;
}
}  // namespace

TEST_SUITE("losses") {

TEST_CASE("fit loss vanishes at the target") {
  CHECK(loss_fit(arr(0.4, 0.2, 0.1), Rgb(0.4, 0.2, 0.1), 0.3) == 0.0);
}

TEST_CASE("grazing incidence weights the fit loss to zero") {
  CHECK(loss_fit(arr(9.0, 9.0, 9.0), Rgb::Zero(), kHalfPi) < 1e-14);
}

TEST_CASE("unit error at normal incidence is log 2") {
  const double l = loss_fit(arr(0.0, 0.0, 0.0), Rgb::Ones(), 0.0);
  CHECK(l == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("negative raw predictions stay finite through the floor") {
  const double l = loss_fit(arr(-50.0, 0.0, 0.0), Rgb::Ones(), 0.0);
  CHECK(std::isfinite(l));
  CHECK(l > 5.0);  // floored log1p argument explodes the penalty
}

TEST_CASE("non-finite inputs fail the step") {
  CHECK_THROWS_AS(
      loss_fit(arr(std::nan(""), 0.0, 0.0), Rgb::Ones(), 0.1),
      DivergenceError);
}

TEST_CASE("chromaticity loss vanishes at the target and on equal norms") {
  CHECK(loss_ce(arr(0.2, 0.5, 0.1), Rgb(0.2, 0.5, 0.1), 0.4) == 0.0);
  // different hue, same norm
  CHECK(loss_ce(arr(1.0, 0.0, 0.0), Rgb(0.0, 1.0, 0.0), 0.0) == 0.0);
}

TEST_CASE("chromaticity loss of a unit gap is log 4") {
  const double l = loss_ce(arr(0.0, 0.0, 0.0), Rgb::Ones(), 0.0);
  CHECK(l == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("total loss combines terms with the configured weights") {
  CHECK(combine_total(0.1, 0.2, 0.3, 0.1, 1.0) ==
        doctest::Approx(0.42).epsilon(1e-15));
  CHECK(combine_total(0.7, 123.0, 55.0, 0.0, 0.0) == 0.7);
}

TEST_CASE("hinge") {
  CHECK(hinge(0.5) == 0.5);
  CHECK(hinge(-0.5) == 0.0);
  CHECK(hinge(0.0) == 0.0);
}

TEST_CASE("passive surfaces pay no energy penalty") {
  const FieldModel m = carrier_only(0.5 / kPi);  // integral 0.5 per channel
  std::vector<SphericalDir> wis{{0.2, 0.1}, {0.7, 2.0}, {1.2, 4.4}};
  CHECK(loss_epl_value(m, wis) == 0.0);
}

TEST_CASE("energy excess is penalized by its hinge") {
  const FieldModel m = carrier_only(1.5 / kPi);  // integral 1.5 per channel
  std::vector<SphericalDir> wis{{0.2, 0.1}, {0.7, 2.0}};
  CHECK(loss_epl_value(m, wis) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("energy penalty needs the antiderivative mode") {
  FieldModel m =
      make_field_model(FieldMode::kDirect, Activation::kSoftplus, true, {4});
  std::vector<SphericalDir> wis{{0.2, 0.1}};
  CHECK_THROWS_AS(loss_epl_value(m, wis), ConfigError);
}

TEST_CASE("energy penalty gradient matches finite differences") {
  FieldModel m = make_field_model(FieldMode::kAntiderivative,
                                  Activation::kSoftplus, true, {1});
  init_random(m, 5, 1.0);
  m.params[m.ramp_offset() + 0] = 0.5;  // keep the hinge active
  m.params[m.ramp_offset() + 1] = 0.5;
  m.params[m.ramp_offset() + 2] = 0.5;
  std::vector<SphericalDir> wis{{0.3, 0.4}, {0.9, 2.2}, {1.1, 5.0}};
  REQUIRE(loss_epl_value(m, wis) > 0.05);

  Tape tape(m.param_count());
  Tape::Scope scope(tape);
  const RevField rf(m, tape);
  const Rev loss = loss_epl_rev(rf, wis);
  CHECK(value(loss) == doctest::Approx(loss_epl_value(m, wis)).epsilon(1e-12));
  const Eigen::VectorXd g = tape.gradient(loss);

  for (int i = 0; i < m.param_count(); ++i) {
    FieldModel hi = m, lo = m;
    hi.params[i] += 1e-6;
    lo.params[i] -= 1e-6;
    const double fd =
        (loss_epl_value(hi, wis) - loss_epl_value(lo, wis)) / 2e-6;
    CHECK(testutil::rel_err(g[i], fd) < 1e-3);
  }
}

TEST_CASE("per-channel energy penalty upper-bounds nothing the mean misses") {
  FieldModel m = carrier_only(0.2);
  m.params[m.ramp_offset() + 0] = 0.5;  // one hot channel: pi*0.5 > 1
  std::vector<SphericalDir> wis{{0.4, 0.0}};
  const double mean_form = loss_epl_value(m, wis, false);
  const double strict = loss_epl_value(m, wis, true);
  // channel mean is below 1 here, the strict variant still fires
  CHECK(mean_form == 0.0);
  CHECK(strict > 0.1);
}

TEST_CASE("total objective gradient matches finite differences across flags") {
  const Rgb target(0.35, 0.2, 0.12);
  std::vector<DirectionPair> batch;
  Rng rng(8);
  for (int i = 0; i < 3; ++i)
    batch.push_back({testutil::random_dir(rng, 0.1),
                     testutil::random_dir(rng, 0.1)});

  for (const bool doubled : {true, false})
    for (const bool use_epl : {false, true})
    for (const bool use_ce : {false, true}) {
      const double lam_e = use_epl ? 0.1 : 0.0;
      const double lam_c = use_ce ? 1.0 : 0.0;
      std::vector<SphericalDir> wis{{0.5, 1.0}, {0.8, 3.0}};

      const auto total_value = [&](const FieldModel& model) {
        double fit = 0.0, ce = 0.0;
        for (const auto& p : batch) {
          const Rgb raw = brdf_eval_raw(model, p);
          const std::array<double, 3> pred{raw[0], raw[1], raw[2]};
          fit += loss_fit(pred, target, p.wi.theta);
          ce += loss_ce(pred, target, p.wi.theta);
        }
        fit /= batch.size();
        ce /= batch.size();
        const double epl = lam_e > 0 ? loss_epl_value(model, wis) : 0.0;
        return combine_total(fit, epl, ce, lam_e, lam_c);
      };

      FieldModel m = make_field_model(FieldMode::kAntiderivative,
                                      Activation::kSoftplus, doubled, {6});
      init_random(m, 77, 0.8);

      Tape tape(m.param_count());
      Tape::Scope scope(tape);
      const RevField rf(m, tape);
      Rev fit(0.0), ce(0.0);
      for (const auto& p : batch) {
        const auto pred = rf.raw_scaled(p);
        fit += loss_fit(pred, target, p.wi.theta);
        ce += loss_ce(pred, target, p.wi.theta);
      }
      const double inv = 1.0 / batch.size();
      Rev total = fit * Rev(inv);
      if (lam_c > 0) total += Rev(lam_c * inv) * ce;
      if (lam_e > 0) total += Rev(lam_e) * loss_epl_rev(rf, wis);

      CHECK(value(total) == doctest::Approx(total_value(m)).epsilon(1e-10));
      const Eigen::VectorXd g = tape.gradient(total);
      for (int i = 0; i < m.param_count(); i += 3) {
        FieldModel hi = m, lo = m;
        hi.params[i] += 1e-6;
        lo.params[i] -= 1e-6;
        const double fd = (total_value(hi) - total_value(lo)) / 2e-6;
        CHECK(testutil::rel_err(g[i], fd) < 1e-3);
      }
    }
}

}  // TEST_SUITE
