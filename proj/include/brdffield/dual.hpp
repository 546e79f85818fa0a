#pragma once

#include <cmath>

#include "brdffield/tape.hpp"

namespace brdffield {

// Forward-mode scalar carrying a value, the two first partials with respect
// to a designated (theta, phi) input pair, and their mixed second partial.
// T is double for plain evaluation or Rev when parameter gradients of any
// component are needed.
template <class T>
struct Dual2 {
  T v{};    // value
  T dt{};   // d/dtheta
  T dp{};   // d/dphi
  T dtp{};  // d2/(dtheta dphi)

  Dual2() = default;
  Dual2(double c) : v(T(c)), dt(T(0.0)), dp(T(0.0)), dtp(T(0.0)) {}  // NOLINT
  Dual2(T v_, T dt_, T dp_, T dtp_)
      : v(std::move(v_)), dt(std::move(dt_)), dp(std::move(dp_)),
        dtp(std::move(dtp_)) {}

  static Dual2 constant(T x) { return {std::move(x), T(0.0), T(0.0), T(0.0)}; }
  static Dual2 var_theta(T x) { return {std::move(x), T(1.0), T(0.0), T(0.0)}; }
  static Dual2 var_phi(T x) { return {std::move(x), T(0.0), T(1.0), T(0.0)}; }
};

using Dual2d = Dual2<double>;

template <class T>
double value(const Dual2<T>& a) {
  return value(a.v);
}

namespace dual_detail {
// u(a) for scalar u with first/second derivative up, upp (all in T arithmetic).
template <class T>
Dual2<T> unary(const Dual2<T>& a, T u, T up, T upp) {
  return {u, up * a.dt, up * a.dp, up * a.dtp + upp * (a.dt * a.dp)};
}

// f(a, b) with gradient (fa, fb) and Hessian (faa, fab, fbb).
template <class T>
Dual2<T> binary(const Dual2<T>& a, const Dual2<T>& b, T f, T fa, T fb, T faa,
                T fab, T fbb) {
  return {f, fa * a.dt + fb * b.dt, fa * a.dp + fb * b.dp,
          fa * a.dtp + fb * b.dtp + faa * (a.dt * a.dp) +
              fab * (a.dt * b.dp + a.dp * b.dt) + fbb * (b.dt * b.dp)};
}
}  // namespace dual_detail

template <class T>
Dual2<T> operator+(const Dual2<T>& a, const Dual2<T>& b) {
  return {a.v + b.v, a.dt + b.dt, a.dp + b.dp, a.dtp + b.dtp};
}
template <class T>
Dual2<T> operator-(const Dual2<T>& a, const Dual2<T>& b) {
  return {a.v - b.v, a.dt - b.dt, a.dp - b.dp, a.dtp - b.dtp};
}
template <class T>
Dual2<T> operator-(const Dual2<T>& a) {
  return {-a.v, -a.dt, -a.dp, -a.dtp};
}
template <class T>
Dual2<T> operator*(const Dual2<T>& a, const Dual2<T>& b) {
  return {a.v * b.v, a.dt * b.v + a.v * b.dt, a.dp * b.v + a.v * b.dp,
          a.dtp * b.v + a.dt * b.dp + a.dp * b.dt + a.v * b.dtp};
}
template <class T>
Dual2<T> operator/(const Dual2<T>& a, const Dual2<T>& b) {
  if (value(b.v) == 0.0) throw_domain("dual div", 0.0);
  const T inv = T(1.0) / b.v;
  const T inv2 = inv * inv;
  return dual_detail::binary(a, b, a.v * inv, inv, -a.v * inv2, T(0.0), -inv2,
                             T(2.0) * a.v * inv2 * inv);
}

template <class T>
Dual2<T>& operator+=(Dual2<T>& a, const Dual2<T>& b) {
  return a = a + b;
}
template <class T>
Dual2<T>& operator-=(Dual2<T>& a, const Dual2<T>& b) {
  return a = a - b;
}
template <class T>
Dual2<T>& operator*=(Dual2<T>& a, const Dual2<T>& b) {
  return a = a * b;
}
template <class T>
Dual2<T> operator+(const Dual2<T>& a, double c) {
  return {a.v + T(c), a.dt, a.dp, a.dtp};
}
template <class T>
Dual2<T> operator+(double c, const Dual2<T>& a) {
  return a + c;
}
template <class T>
Dual2<T> operator-(const Dual2<T>& a, double c) {
  return a + (-c);
}
template <class T>
Dual2<T> operator-(double c, const Dual2<T>& a) {
  return (-a) + c;
}
template <class T>
Dual2<T> operator*(const Dual2<T>& a, double c) {
  return {a.v * T(c), a.dt * T(c), a.dp * T(c), a.dtp * T(c)};
}
template <class T>
Dual2<T> operator*(double c, const Dual2<T>& a) {
  return a * c;
}
template <class T>
Dual2<T> operator/(const Dual2<T>& a, double c) {
  if (c == 0.0) throw_domain("dual div", 0.0);
  return a * (1.0 / c);
}

template <class T>
Dual2<T> sin(const Dual2<T>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.v), c = cos(a.v);
  return dual_detail::unary(a, s, c, -s);
}
template <class T>
Dual2<T> cos(const Dual2<T>& a) {
  using std::cos;
  using std::sin;
  const T c = cos(a.v), s = sin(a.v);
  return dual_detail::unary(a, c, -s, -c);
}
template <class T>
Dual2<T> exp(const Dual2<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return dual_detail::unary(a, e, e, e);
}
template <class T>
Dual2<T> log(const Dual2<T>& a) {
  using std::log;
  if (value(a.v) <= 0.0) throw_domain("dual log", value(a.v));
  const T inv = T(1.0) / a.v;
  return dual_detail::unary(a, log(a.v), inv, -inv * inv);
}
template <class T>
Dual2<T> log1p(const Dual2<T>& a) {
  using std::log1p;
  if (value(a.v) <= -1.0) throw_domain("dual log1p", value(a.v));
  const T inv = T(1.0) / (T(1.0) + a.v);
  return dual_detail::unary(a, log1p(a.v), inv, -inv * inv);
}
template <class T>
Dual2<T> sqrt(const Dual2<T>& a) {
  using std::sqrt;
  if (value(a.v) <= 0.0) throw_domain("dual sqrt", value(a.v));
  const T s = sqrt(a.v);
  const T up = T(0.5) / s;
  return dual_detail::unary(a, s, up, T(-0.5) * up / a.v);
}
template <class T>
Dual2<T> tanh(const Dual2<T>& a) {
  using std::tanh;
  const T t = tanh(a.v);
  const T sech2 = T(1.0) - t * t;
  return dual_detail::unary(a, t, sech2, T(-2.0) * t * sech2);
}
inline Rev softplus_of(const Rev& x) { return softplus(x); }
inline double softplus_of(double x) { return softplus_value(x); }
inline Rev sigmoid_of(const Rev& x) { return sigmoid(x); }
inline double sigmoid_of(double x) { return sigmoid_value(x); }
template <class T>
Dual2<T> softplus(const Dual2<T>& a) {
  const T s = softplus_of(a.v);
  const T sig = sigmoid_of(a.v);
  return dual_detail::unary(a, s, sig, sig * (T(1.0) - sig));
}
// Subgradient of the active branch; second derivative zero away from the
// kink, so the antiderivative path must not use this activation.
template <class T>
Dual2<T> relu(const Dual2<T>& a) {
  if (value(a.v) > 0.0) return a;
  return Dual2<T>::constant(T(0.0));
}
template <class T>
Dual2<T> abs(const Dual2<T>& a) {
  return value(a.v) >= 0.0 ? a : -a;
}
template <class T>
Dual2<T> max(const Dual2<T>& a, const Dual2<T>& b) {
  return value(a.v) >= value(b.v) ? a : b;
}
template <class T>
Dual2<T> pow(const Dual2<T>& a, double p) {
  using std::pow;
  if (value(a.v) <= 0.0) throw_domain("dual pow", value(a.v));
  const T f = pow(a.v, p);
  return dual_detail::unary(a, f, T(p) * f / a.v,
                            T(p * (p - 1.0)) * f / (a.v * a.v));
}
template <class T>
Dual2<T> acos(const Dual2<T>& a) {
  using std::acos;
  using std::sqrt;
  if (std::abs(value(a.v)) >= 1.0) throw_domain("dual acos", value(a.v));
  const T w = T(1.0) - a.v * a.v;
  const T up = T(-1.0) / sqrt(w);
  return dual_detail::unary(a, acos(a.v), up, a.v * up / w);
}
template <class T>
Dual2<T> asin(const Dual2<T>& a) {
  using std::asin;
  using std::sqrt;
  if (std::abs(value(a.v)) >= 1.0) throw_domain("dual asin", value(a.v));
  const T w = T(1.0) - a.v * a.v;
  const T up = T(1.0) / sqrt(w);
  return dual_detail::unary(a, asin(a.v), up, a.v * up / w);
}
template <class T>
Dual2<T> atan2(const Dual2<T>& y, const Dual2<T>& x) {
  using std::atan2;
  const T r2 = x.v * x.v + y.v * y.v;
  if (value(r2) == 0.0) throw_domain("dual atan2", 0.0);
  const T inv = T(1.0) / r2;
  const T fy = x.v * inv;
  const T fx = -y.v * inv;
  const T fyy = T(-2.0) * x.v * y.v * inv * inv;
  const T fyx = (y.v * y.v - x.v * x.v) * inv * inv;
  return dual_detail::binary(y, x, atan2(y.v, x.v), fy, fx, fyy, fyx, -fyy);
}

}  // namespace brdffield
