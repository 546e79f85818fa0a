#include <doctest.h>

#include <cmath>
#include <vector>

#include "brdffield/dual.hpp"
#include "brdffield/rng.hpp"
#include "brdffield/tape.hpp"
#include "test_util.hpp"

using namespace brdffield;

TEST_SUITE("tape") {

TEST_CASE("gradient of a square") {
  Tape tape(1);
  Tape::Scope scope(tape);
  const Rev x = tape.leaf(0, 3.0);
  const Rev loss = x * x;
  const Eigen::VectorXd g = tape.gradient(loss);
  CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("untouched parameters get exactly zero") {
  Tape tape(3);
  Tape::Scope scope(tape);
  const Rev x = tape.leaf(0, 2.0);
  const Rev z = tape.leaf(2, 5.0);
  const Rev loss = sin(x) * z;
  const Eigen::VectorXd g = tape.gradient(loss);
  CHECK(g[1] == 0.0);
  CHECK(g[0] == doctest::Approx(std::cos(2.0) * 5.0));
  CHECK(g[2] == doctest::Approx(std::sin(2.0)));
}

TEST_CASE("linearity of gradients") {
  Tape tape(4);
  Tape::Scope scope(tape);
  Rng rng(11);
  std::vector<Rev> w;
  for (int i = 0; i < 4; ++i) w.push_back(tape.leaf(i, rng.normal()));
  const Rev l1 = softplus(w[0] * w[1] + w[2]);
  const Rev l2 = tanh(w[3] * w[0]) * w[2];
  const double alpha = 2.75;
  const Rev combined = Rev(alpha) * l1 + l2;
  const Eigen::VectorXd g1 = tape.gradient(l1);
  const Eigen::VectorXd g2 = tape.gradient(l2);
  const Eigen::VectorXd gc = tape.gradient(combined);
  for (int i = 0; i < 4; ++i)
    CHECK(gc[i] == doctest::Approx(alpha * g1[i] + g2[i]).epsilon(1e-14));
}

TEST_CASE("gradient matches finite differences through mixed ops") {
  Rng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd p(5);
    for (int i = 0; i < 5; ++i) p[i] = 0.3 + rng.uniform();
    const auto eval = [](const Eigen::VectorXd& v) {
      return std::log1p(std::exp(v[0] * v[1])) +
             std::tanh(v[2] / v[3]) * std::sqrt(v[4]) +
             std::abs(v[1] - v[4]) + std::atan2(v[0], v[3]);
    };
    Tape tape(5);
    Tape::Scope scope(tape);
    std::vector<Rev> w;
    for (int i = 0; i < 5; ++i) w.push_back(tape.leaf(i, p[i]));
    const Rev loss = log1p(exp(w[0] * w[1])) +
                     tanh(w[2] / w[3]) * sqrt(w[4]) + abs(w[1] - w[4]) +
                     atan2(w[0], w[3]);
    CHECK(value(loss) == doctest::Approx(eval(p)).epsilon(1e-12));
    const Eigen::VectorXd g = tape.gradient(loss);
    for (int i = 0; i < 5; ++i) {
      Eigen::VectorXd hi = p, lo = p;
      hi[i] += 1e-6;
      lo[i] -= 1e-6;
      const double fd = (eval(hi) - eval(lo)) / 2e-6;
      CHECK(testutil::rel_err(g[i], fd) < 1e-6);
    }
  }
}

TEST_CASE("affine node agrees with elementary composition") {
  Rng rng(7);
  Tape tape(7);
  Tape::Scope scope(tape);
  std::vector<Rev> a, b;
  for (int i = 0; i < 3; ++i) a.push_back(tape.leaf(i, rng.normal()));
  for (int i = 0; i < 3; ++i) b.push_back(tape.leaf(3 + i, rng.normal()));
  const Rev bias = tape.leaf(6, rng.normal());

  const Rev fused = tape.affine(a, b, bias);
  Rev manual = bias;
  for (int i = 0; i < 3; ++i) manual += a[i] * b[i];
  CHECK(value(fused) == doctest::Approx(value(manual)).epsilon(1e-15));

  const Eigen::VectorXd gf = tape.gradient(fused);
  const Eigen::VectorXd gm = tape.gradient(manual);
  for (int i = 0; i < 7; ++i)
    CHECK(gf[i] == doctest::Approx(gm[i]).epsilon(1e-15));
}

TEST_CASE("gradient of a loss built from the mixed-partial component") {
  // One tanh hidden unit driven by (theta, phi); the objective reads the
  // dtp slot, so its parameter gradient needs second-order terms.
  const double theta = 0.7, phi = 1.3;
  const auto dtp_value = [&](const Eigen::VectorXd& p) {
    Tape tape(4);
    Tape::Scope scope(tape);
    const Rev w1 = tape.leaf(0, p[0]);
    const Rev w2 = tape.leaf(1, p[1]);
    const Rev b = tape.leaf(2, p[2]);
    const Rev w3 = tape.leaf(3, p[3]);
    using D = Dual2<Rev>;
    const D t = D::var_theta(Rev(theta));
    const D ph = D::var_phi(Rev(phi));
    const D hidden =
        tanh(t * D::constant(w1) + ph * D::constant(w2) + D::constant(b));
    const D out = hidden * D::constant(w3);
    return value(out.dtp);
  };

  Eigen::VectorXd p(4);
  p << 0.8, -0.6, 0.2, 1.4;

  Tape tape(4);
  Tape::Scope scope(tape);
  const Rev w1 = tape.leaf(0, p[0]);
  const Rev w2 = tape.leaf(1, p[1]);
  const Rev b = tape.leaf(2, p[2]);
  const Rev w3 = tape.leaf(3, p[3]);
  using D = Dual2<Rev>;
  const D t = D::var_theta(Rev(theta));
  const D ph = D::var_phi(Rev(phi));
  const D out =
      tanh(t * D::constant(w1) + ph * D::constant(w2) + D::constant(b)) *
      D::constant(w3);
  const Rev loss = out.dtp * out.dtp;
  const Eigen::VectorXd g = tape.gradient(loss);

  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd hi = p, lo = p;
    hi[i] += 1e-5;
    lo[i] -= 1e-5;
    const double v_hi = dtp_value(hi), v_lo = dtp_value(lo);
    const double fd = (v_hi * v_hi - v_lo * v_lo) / 2e-5;
    CHECK(testutil::rel_err(g[i], fd) < 1e-3);
  }
}

TEST_CASE("deterministic replay produces identical gradients") {
  const auto run = [] {
    Tape tape(3);
    Tape::Scope scope(tape);
    Rng rng(99);
    const Rev a = tape.leaf(0, rng.normal());
    const Rev b = tape.leaf(1, rng.normal());
    const Rev c = tape.leaf(2, rng.normal());
    const Rev loss = softplus(a * b) / (c * c + Rev(1.0)) + sin(a - c);
    return tape.gradient(loss);
  };
  const Eigen::VectorXd g1 = run();
  const Eigen::VectorXd g2 = run();
  for (int i = 0; i < 3; ++i) CHECK(g1[i] == g2[i]);
}

TEST_CASE("domain violations are rejected with the op name") {
  Tape tape(1);
  Tape::Scope scope(tape);
  const Rev x = tape.leaf(0, -2.0);
  CHECK_THROWS_WITH_AS(sqrt(x), doctest::Contains("sqrt"), std::domain_error);
  CHECK_THROWS_WITH_AS(log1p(x), doctest::Contains("log1p"),
                       std::domain_error);
  const Rev zero(0.0);
  CHECK_THROWS_AS(x / zero, std::domain_error);
}

TEST_CASE("rewind keeps leaves usable") {
  Tape tape(2);
  Tape::Scope scope(tape);
  const Rev a = tape.leaf(0, 2.0);
  const Rev b = tape.leaf(1, 4.0);
  (void)(a * b);
  const auto size_before = tape.size();
  tape.rewind();
  CHECK(tape.size() < size_before);
  const Rev loss = a * a * b;
  const Eigen::VectorXd g = tape.gradient(loss);
  CHECK(g[0] == doctest::Approx(16.0));
  CHECK(g[1] == doctest::Approx(4.0));
}

}  // TEST_SUITE
