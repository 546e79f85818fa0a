#pragma once

#include <Eigen/Core>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace brdffield {

class Tape;

// Scalar tracked for reverse-mode differentiation. id < 0 marks a constant
// that lives on no tape. Arithmetic records onto the thread-active Tape.
struct Rev {
  double v = 0.0;
  std::int32_t id = -1;

  Rev() = default;
  explicit Rev(double value) : v(value), id(-1) {}
  Rev(double value, std::int32_t node) : v(value), id(node) {}

  bool tracked() const { return id >= 0; }
};

// Wengert list over scalar operations. The first `num_params` node ids are
// parameter leaves; everything recorded after them can be dropped with
// rewind() while leaf ids stay valid, so one tape serves many evaluations.
//
// Single-writer: operations record through the thread-local scope below.
class Tape {
 public:
  explicit Tape(int num_params) : num_params_(num_params) {
    arg_begin_.push_back(0);
  }

  int num_params() const { return num_params_; }
  std::int32_t size() const {
    return num_params_ + static_cast<std::int32_t>(arg_begin_.size()) - 1;
  }

  Rev leaf(int index, double value) const {
    assert(index >= 0 && index < num_params_);
    return Rev(value, index);
  }

  // Drops every recorded operation, keeping parameter leaves.
  void rewind() {
    arg_begin_.resize(1);
    parents_.clear();
    partials_.clear();
  }

  std::int32_t add_node(std::initializer_list<std::int32_t> parents,
                        std::initializer_list<double> partials) {
    assert(parents.size() == partials.size());
    for (auto p : parents) parents_.push_back(p);
    for (auto d : partials) partials_.push_back(d);
    arg_begin_.push_back(static_cast<std::int32_t>(parents_.size()));
    return size() - 1;
  }

  // value = sum_i a[i]*b[i] + bias, recorded as one node. Only tracked
  // operands become parents; constants fold into the recorded partials.
  Rev affine(std::span<const Rev> a, std::span<const Rev> b, const Rev& bias) {
    assert(a.size() == b.size());
    double value = bias.v;
    for (std::size_t i = 0; i < a.size(); ++i) value += a[i].v * b[i].v;
    bool any = bias.tracked();
    for (std::size_t i = 0; i < a.size() && !any; ++i)
      any = a[i].tracked() || b[i].tracked();
    if (!any) return Rev(value);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].tracked()) {
        parents_.push_back(a[i].id);
        partials_.push_back(b[i].v);
      }
      if (b[i].tracked()) {
        parents_.push_back(b[i].id);
        partials_.push_back(a[i].v);
      }
    }
    if (bias.tracked()) {
      parents_.push_back(bias.id);
      partials_.push_back(1.0);
    }
    arg_begin_.push_back(static_cast<std::int32_t>(parents_.size()));
    return Rev(value, size() - 1);
  }

  // Accumulates scale * d(out)/d(param_k) into grad[k]. Parameters with no
  // path to `out` receive exactly zero contribution.
  void accumulate_gradient(const Rev& out, double scale,
                           Eigen::VectorXd& grad) const {
    assert(grad.size() == num_params_);
    if (!out.tracked()) return;
    if (out.id < num_params_) {
      grad[out.id] += scale;
      return;
    }
    adjoint_.assign(arg_begin_.size() - 1, 0.0);
    adjoint_[out.id - num_params_] = scale;
    for (std::int32_t n = out.id - num_params_; n >= 0; --n) {
      const double adj = adjoint_[n];
      if (adj == 0.0) continue;
      for (std::int32_t k = arg_begin_[n]; k < arg_begin_[n + 1]; ++k) {
        const std::int32_t p = parents_[k];
        const double w = adj * partials_[k];
        if (p < num_params_)
          grad[p] += w;
        else
          adjoint_[p - num_params_] += w;
      }
    }
  }

  Eigen::VectorXd gradient(const Rev& out) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(num_params_);
    accumulate_gradient(out, 1.0, g);
    return g;
  }

  // RAII activation; Rev arithmetic inside the scope records here.
  class Scope {
   public:
    explicit Scope(Tape& tape) : previous_(active_) { active_ = &tape; }
    ~Scope() { active_ = previous_; }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  static Tape& active() {
    if (!active_) throw std::logic_error("no active Tape in this scope");
    return *active_;
  }

 private:
  int num_params_;
  std::vector<std::int32_t> arg_begin_;  // per-node offsets into the two below
  std::vector<std::int32_t> parents_;
  std::vector<double> partials_;
  mutable std::vector<double> adjoint_;  // backward-pass scratch
  static thread_local Tape* active_;
};

[[noreturn]] inline void throw_domain(const char* op, double value) {
  throw std::domain_error(std::string("autodiff op '") + op +
                          "' outside domain at value " +
                          std::to_string(value));
}

namespace detail {
inline Rev unary(const Rev& a, double value, double da) {
  if (!a.tracked()) return Rev(value);
  return Rev(value, Tape::active().add_node({a.id}, {da}));
}

inline Rev binary(const Rev& a, const Rev& b, double value, double da,
                  double db) {
  const bool ta = a.tracked(), tb = b.tracked();
  if (!ta && !tb) return Rev(value);
  Tape& t = Tape::active();
  if (ta && tb) return Rev(value, t.add_node({a.id, b.id}, {da, db}));
  if (ta) return Rev(value, t.add_node({a.id}, {da}));
  return Rev(value, t.add_node({b.id}, {db}));
}
}  // namespace detail

inline Rev operator+(const Rev& a, const Rev& b) {
  return detail::binary(a, b, a.v + b.v, 1.0, 1.0);
}
inline Rev operator-(const Rev& a, const Rev& b) {
  return detail::binary(a, b, a.v - b.v, 1.0, -1.0);
}
inline Rev operator*(const Rev& a, const Rev& b) {
  return detail::binary(a, b, a.v * b.v, b.v, a.v);
}
inline Rev operator/(const Rev& a, const Rev& b) {
  if (b.v == 0.0) throw_domain("div", b.v);
  return detail::binary(a, b, a.v / b.v, 1.0 / b.v, -a.v / (b.v * b.v));
}
inline Rev operator-(const Rev& a) { return detail::unary(a, -a.v, -1.0); }
inline Rev& operator+=(Rev& a, const Rev& b) { return a = a + b; }
inline Rev& operator-=(Rev& a, const Rev& b) { return a = a - b; }
inline Rev& operator*=(Rev& a, const Rev& b) { return a = a * b; }
inline Rev& operator/=(Rev& a, const Rev& b) { return a = a / b; }

inline Rev sin(const Rev& a) {
  return detail::unary(a, std::sin(a.v), std::cos(a.v));
}
inline Rev cos(const Rev& a) {
  return detail::unary(a, std::cos(a.v), -std::sin(a.v));
}
inline Rev exp(const Rev& a) {
  const double e = std::exp(a.v);
  return detail::unary(a, e, e);
}
inline Rev log(const Rev& a) {
  if (a.v <= 0.0) throw_domain("log", a.v);
  return detail::unary(a, std::log(a.v), 1.0 / a.v);
}
inline Rev log1p(const Rev& a) {
  if (a.v <= -1.0) throw_domain("log1p", a.v);
  return detail::unary(a, std::log1p(a.v), 1.0 / (1.0 + a.v));
}
inline Rev sqrt(const Rev& a) {
  if (a.v <= 0.0) throw_domain("sqrt", a.v);
  const double s = std::sqrt(a.v);
  return detail::unary(a, s, 0.5 / s);
}
inline Rev tanh(const Rev& a) {
  const double t = std::tanh(a.v);
  return detail::unary(a, t, 1.0 - t * t);
}
inline double sigmoid_value(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}
inline double softplus_value(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
inline double softplus(double x) { return softplus_value(x); }
inline double sigmoid(double x) { return sigmoid_value(x); }
inline Rev softplus(const Rev& a) {
  return detail::unary(a, softplus_value(a.v), sigmoid_value(a.v));
}
inline Rev sigmoid(const Rev& a) {
  const double s = sigmoid_value(a.v);
  return detail::unary(a, s, s * (1.0 - s));
}
inline Rev relu(const Rev& a) {
  return detail::unary(a, a.v > 0.0 ? a.v : 0.0, a.v > 0.0 ? 1.0 : 0.0);
}
// Ties pick the first operand (subgradient of the chosen branch).
inline Rev max(const Rev& a, const Rev& b) {
  return a.v >= b.v ? detail::binary(a, b, a.v, 1.0, 0.0)
                    : detail::binary(a, b, b.v, 0.0, 1.0);
}
inline Rev abs(const Rev& a) {
  return a.v >= 0.0 ? detail::unary(a, a.v, 1.0)
                    : detail::unary(a, -a.v, -1.0);
}
inline Rev pow(const Rev& a, double p) {
  const double v = std::pow(a.v, p);
  return detail::unary(a, v, p * std::pow(a.v, p - 1.0));
}
inline Rev acos(const Rev& a) {
  if (std::abs(a.v) >= 1.0) throw_domain("acos", a.v);
  return detail::unary(a, std::acos(a.v),
                       -1.0 / std::sqrt(1.0 - a.v * a.v));
}
inline Rev asin(const Rev& a) {
  if (std::abs(a.v) >= 1.0) throw_domain("asin", a.v);
  return detail::unary(a, std::asin(a.v), 1.0 / std::sqrt(1.0 - a.v * a.v));
}
inline Rev atan2(const Rev& y, const Rev& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  if (r2 == 0.0) throw_domain("atan2", 0.0);
  return detail::binary(y, x, std::atan2(y.v, x.v), x.v / r2, -y.v / r2);
}

inline double value(double x) { return x; }
inline double value(const Rev& x) { return x.v; }

}  // namespace brdffield
