#include "brdffield/field.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include "brdffield/errors.hpp"
#include "brdffield/rng.hpp"

namespace brdffield {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kSoftplus: return "softplus";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
  }
  return "?";
}

std::string to_string(FieldMode m) {
  return m == FieldMode::kAntiderivative ? "antiderivative" : "direct";
}

Activation activation_from_string(const std::string& s) {
  if (s == "softplus") return Activation::kSoftplus;
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + s + "'");
}

int FieldModel::weight_offset(int layer) const {
  int off = 0;
  for (int l = 0; l < layer; ++l)
    off += layers[l] * layers[l + 1] + layers[l + 1];
  return off;
}

int FieldModel::bias_offset(int layer) const {
  return weight_offset(layer) + layers[layer] * layers[layer + 1];
}

int FieldModel::ramp_offset() const {
  if (mode != FieldMode::kAntiderivative) return -1;
  return weight_offset(linear_count());
}

int FieldModel::param_count() const {
  return weight_offset(linear_count()) +
         (mode == FieldMode::kAntiderivative ? 3 : 0);
}

FieldModel make_field_model(FieldMode mode, Activation act, bool doubled_phi_d,
                            const std::vector<int>& hidden_sizes) {
  if (mode == FieldMode::kAntiderivative && act == Activation::kRelu)
    throw ConfigError(
        "relu cannot drive the antiderivative field: its second derivative "
        "vanishes almost everywhere, so the mixed partial would be zero; "
        "use softplus or tanh");
  if (hidden_sizes.empty())
    throw ConfigError("at least one hidden layer is required");
  FieldModel m;
  m.mode = mode;
  m.activation = act;
  m.doubled_phi_d = doubled_phi_d;
  m.layers.clear();
  m.layers.push_back(6);
  for (int h : hidden_sizes) {
    if (h < 1) throw ConfigError("hidden layer size must be positive");
    m.layers.push_back(h);
  }
  m.layers.push_back(3);
  m.params = Eigen::VectorXd::Zero(m.param_count());
  return m;
}

void init_random(FieldModel& m, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (int l = 0; l < m.linear_count(); ++l) {
    const int in = m.layers[l], out = m.layers[l + 1];
    const double sd = scale / std::sqrt(static_cast<double>(in));
    for (int k = 0; k < in * out; ++k)
      m.params[m.weight_offset(l) + k] = sd * rng.normal();
    for (int k = 0; k < out; ++k)
      m.params[m.bias_offset(l) + k] = 0.1 * sd * rng.normal();
  }
  if (m.mode == FieldMode::kAntiderivative)
    for (int c = 0; c < 3; ++c)
      m.params[m.ramp_offset() + c] = rng.uniform(0.05, 0.5);
}

void init_for_training(FieldModel& m, std::uint64_t seed) {
  Rng rng(seed);
  for (int l = 0; l < m.linear_count(); ++l) {
    const int in = m.layers[l], out = m.layers[l + 1];
    const bool last = l == m.linear_count() - 1;
    const double bound = std::sqrt(6.0 / (in + out));
    for (int k = 0; k < in * out; ++k)
      m.params[m.weight_offset(l) + k] =
          last ? 0.0 : rng.uniform(-bound, bound);
    for (int k = 0; k < out; ++k) m.params[m.bias_offset(l) + k] = 0.0;
  }
  if (m.mode == FieldMode::kAntiderivative)
    for (int c = 0; c < 3; ++c) m.params[m.ramp_offset() + c] = 0.1;
}

namespace {

template <class T>
Dual2<T> activate(Activation a, const Dual2<T>& u) {
  switch (a) {
    case Activation::kSoftplus: return softplus(u);
    case Activation::kTanh: return tanh(u);
    case Activation::kRelu: return relu(u);
  }
  return u;
}

double activate_value(Activation a, double x) {
  switch (a) {
    case Activation::kSoftplus: return softplus_value(x);
    case Activation::kTanh: return std::tanh(x);
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
  }
  return x;
}

Rev activate_rev(Activation a, const Rev& x) {
  switch (a) {
    case Activation::kSoftplus: return softplus(x);
    case Activation::kTanh: return tanh(x);
    case Activation::kRelu: return relu(x);
  }
  return x;
}

// Same values as reciprocity_embed(io_to_rusink(...)) but computed from the
// direction vectors via the polynomial identities documented there, so
// derivative seeds never pass through inverse trig.
template <class S>
std::array<S, 6> embed_inputs(const S& ti, const S& pi, const S& to,
                              const S& po, bool doubled) {
  using std::sqrt;
  const Vec3T<S> wi = sph_to_cart(ti, pi);
  const Vec3T<S> wo = sph_to_cart(to, po);
  const Vec3T<S> sum = wi + wo;
  const S n2 = dot(sum, sum);
  if (value(n2) < 1e-16)
    throw DegenerateInput("field embedding: near-antipodal direction pair");
  const S soft_norm = sqrt(n2 + S(kAntipodalEps * kAntipodalEps));
  const Vec3T<S> h = sum * (S(1.0) / soft_norm);
  const S c_soft = soft_norm * 0.5;
  const S dz = (wo.z - wi.z) * 0.5;           // a cos(phi_d)
  const S q = (wi.y * wo.x - wi.x * wo.y) * 0.5;  // a c sin(phi_d)
  if (doubled)
    return {h.x,
            h.y,
            h.z,
            S(kSecondHarmonicGain) * (dz * dz * (n2 * 0.25) - q * q),
            S(2.0 * kSecondHarmonicGain) * dz * q,
            c_soft};
  const S cd = sqrt(n2) * 0.5;
  return {h.x, h.y, h.z, S(kFirstHarmonicGain) * dz * cd,
          S(kFirstHarmonicGain) * q, c_soft};
}

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

Eigen::Vector3d mlp_forward_value(const FieldModel& m,
                                  const Eigen::VectorXd& input) {
  Eigen::VectorXd x = input;
  for (int l = 0; l < m.linear_count(); ++l) {
    const int in = m.layers[l], out = m.layers[l + 1];
    RowMajorMap w(m.params.data() + m.weight_offset(l), out, in);
    Eigen::Map<const Eigen::VectorXd> b(m.params.data() + m.bias_offset(l),
                                        out);
    Eigen::VectorXd y = w * x + b;
    if (l + 1 < m.linear_count())
      for (int j = 0; j < out; ++j) y[j] = activate_value(m.activation, y[j]);
    x = std::move(y);
  }
  return x;
}

std::array<Dual2d, 3> mlp_forward_dual(const FieldModel& m,
                                       const std::array<Dual2d, 6>& input) {
  Eigen::VectorXd xv(6), xdt(6), xdp(6), xdtp(6);
  for (int k = 0; k < 6; ++k) {
    xv[k] = input[k].v;
    xdt[k] = input[k].dt;
    xdp[k] = input[k].dp;
    xdtp[k] = input[k].dtp;
  }
  for (int l = 0; l < m.linear_count(); ++l) {
    const int in = m.layers[l], out = m.layers[l + 1];
    RowMajorMap w(m.params.data() + m.weight_offset(l), out, in);
    Eigen::Map<const Eigen::VectorXd> b(m.params.data() + m.bias_offset(l),
                                        out);
    Eigen::VectorXd yv = w * xv + b;
    Eigen::VectorXd ydt = w * xdt;
    Eigen::VectorXd ydp = w * xdp;
    Eigen::VectorXd ydtp = w * xdtp;
    if (l + 1 < m.linear_count()) {
      for (int j = 0; j < out; ++j) {
        const Dual2d a =
            activate(m.activation, Dual2d{yv[j], ydt[j], ydp[j], ydtp[j]});
        yv[j] = a.v;
        ydt[j] = a.dt;
        ydp[j] = a.dp;
        ydtp[j] = a.dtp;
      }
    }
    xv = std::move(yv);
    xdt = std::move(ydt);
    xdp = std::move(ydp);
    xdtp = std::move(ydtp);
  }
  return {Dual2d{xv[0], xdt[0], xdp[0], xdtp[0]},
          Dual2d{xv[1], xdt[1], xdp[1], xdtp[1]},
          Dual2d{xv[2], xdt[2], xdp[2], xdtp[2]}};
}

// Non-periodic antiderivative carrier: d2/(dtheta dphi) of
// phi * sin(theta)^2 / 2 equals cos(theta) sin(theta), so each unit of ramp
// gain contributes exactly 1 to the scaled reflectance.
template <class S>
S ramp_carrier(const S& theta_o, const S& phi_o) {
  using std::sin;
  const S s = sin(theta_o);
  return phi_o * s * s * 0.5;
}

double denom_clamped(double theta_o) {
  return std::max(std::cos(theta_o) * std::sin(theta_o), 1e-6);
}

void require_antiderivative(const FieldModel& m, const char* what) {
  if (m.mode != FieldMode::kAntiderivative)
    throw ConfigError(std::string(what) +
                      " requires an antiderivative-mode model");
}

void check_finite(const Rgb& v, const char* where) {
  if (!v.isFinite().all())
    throw DivergenceError(std::string("non-finite value in ") + where);
}

}  // namespace

std::array<Dual2d, 3> g_eval(const FieldModel& m, const DirectionPair& p) {
  require_antiderivative(m, "g_eval");
  const Dual2d ti = Dual2d::constant(p.wi.theta);
  const Dual2d pi_ = Dual2d::constant(p.wi.phi);
  const Dual2d to = Dual2d::var_theta(p.wo.theta);
  const Dual2d po = Dual2d::var_phi(p.wo.phi);
  auto g = mlp_forward_dual(
      m, embed_inputs(ti, pi_, to, po, m.doubled_phi_d));
  const Dual2d carrier = ramp_carrier(to, po);
  for (int c = 0; c < 3; ++c)
    g[c] = g[c] + carrier * m.params[m.ramp_offset() + c];
  return g;
}

Rgb g_value(const FieldModel& m, const SphericalDir& wi, double theta_o,
            double phi_o) {
  require_antiderivative(m, "g_value");
  const auto e = embed_inputs(wi.theta, wi.phi, theta_o, phi_o,
                              m.doubled_phi_d);
  Eigen::VectorXd x(6);
  for (int k = 0; k < 6; ++k) x[k] = e[k];
  const Eigen::Vector3d y = mlp_forward_value(m, x);
  const double carrier = ramp_carrier(theta_o, phi_o);
  Rgb out;
  for (int c = 0; c < 3; ++c)
    out[c] = y[c] + carrier * m.params[m.ramp_offset() + c];
  return out;
}

Rgb brdf_eval_raw(const FieldModel& m, const DirectionPair& p) {
  if (m.mode == FieldMode::kDirect) {
    const auto e = embed_inputs(p.wi.theta, p.wi.phi, p.wo.theta, p.wo.phi,
                                m.doubled_phi_d);
    Eigen::VectorXd x(6);
    for (int k = 0; k < 6; ++k) x[k] = e[k];
    const Eigen::Vector3d y = mlp_forward_value(m, x);
    Rgb out;
    for (int c = 0; c < 3; ++c) out[c] = softplus_value(y[c]);
    check_finite(out, "brdf_eval (direct)");
    return out;
  }
  const auto g = g_eval(m, p);
  const double inv = 1.0 / denom_clamped(p.wo.theta);
  Rgb out;
  for (int c = 0; c < 3; ++c) out[c] = g[c].dtp * inv;
  check_finite(out, "brdf_eval_raw");
  return out;
}

Rgb brdf_eval(const FieldModel& m, const DirectionPair& p) {
  if (m.mode == FieldMode::kDirect) return brdf_eval_raw(m, p);
  Rgb raw;
  if (m.doubled_phi_d)
    raw = 0.5 * (brdf_eval_raw(m, p) + brdf_eval_raw(m, swapped(p)));
  else
    raw = brdf_eval_raw(m, p);
  return raw.max(0.0);
}

Rgb hemisphere_integral_closed(const FieldModel& m, const SphericalDir& wi,
                               bool two_term) {
  require_antiderivative(m, "hemisphere_integral_closed");
  const Rgb c00 = g_value(m, wi, 0.0, 0.0);
  const Rgb c11 = g_value(m, wi, kHalfPi, kTwoPi);
  if (two_term) return c11 - c00;
  const Rgb c01 = g_value(m, wi, 0.0, kTwoPi);
  const Rgb c10 = g_value(m, wi, kHalfPi, 0.0);
  return c11 - c10 - c01 + c00;
}

// --- checkpoint container -------------------------------------------------

namespace {
constexpr std::uint32_t kCheckpointMagic = 0x4B434642;  // "BFCK"
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_f64(std::vector<std::uint8_t>& out, double d) {
  const std::uint64_t b = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(b >> (8 * i)));
}
std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
double get_f64(const std::uint8_t* p) {
  std::uint64_t b = 0;
  for (int i = 7; i >= 0; --i) b = (b << 8) | p[i];
  return std::bit_cast<double>(b);
}
}  // namespace

std::vector<std::uint8_t> checkpoint_bytes(const FieldModel& m) {
  std::vector<std::uint8_t> out;
  put_u32(out, kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  out.push_back(static_cast<std::uint8_t>(m.mode));
  out.push_back(static_cast<std::uint8_t>(m.activation));
  out.push_back(m.doubled_phi_d ? 1 : 0);
  out.push_back(0);
  put_u32(out, static_cast<std::uint32_t>(m.layers.size()));
  for (int s : m.layers) put_u32(out, static_cast<std::uint32_t>(s));
  put_u32(out, static_cast<std::uint32_t>(m.params.size()));
  for (Eigen::Index i = 0; i < m.params.size(); ++i) put_f64(out, m.params[i]);
  return out;
}

void save_checkpoint(const FieldModel& m, const std::string& path) {
  const auto bytes = checkpoint_bytes(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

FieldModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || get_u32(bytes.data()) != kCheckpointMagic)
    throw DataError("checkpoint: bad magic in '" + path + "'");
  if (get_u32(bytes.data() + 4) != kCheckpointVersion)
    throw DataError("checkpoint: unsupported version");
  FieldModel m;
  m.mode = static_cast<FieldMode>(bytes[8]);
  m.activation = static_cast<Activation>(bytes[9]);
  m.doubled_phi_d = bytes[10] != 0;
  const std::uint32_t n_layers = get_u32(bytes.data() + 12);
  std::size_t off = 16;
  if (bytes.size() < off + 4 * n_layers + 4)
    throw DataError("checkpoint: truncated layer table");
  m.layers.clear();
  for (std::uint32_t i = 0; i < n_layers; ++i, off += 4)
    m.layers.push_back(static_cast<int>(get_u32(bytes.data() + off)));
  const std::uint32_t n_params = get_u32(bytes.data() + off);
  off += 4;
  if (bytes.size() != off + 8ull * n_params)
    throw DataError("checkpoint: truncated parameter block");
  if (static_cast<int>(n_params) != m.param_count())
    throw DataError("checkpoint: parameter count inconsistent with layers");
  if (m.mode == FieldMode::kAntiderivative &&
      m.activation == Activation::kRelu)
    throw ConfigError("checkpoint: relu antiderivative model is invalid");
  m.params.resize(n_params);
  for (std::uint32_t i = 0; i < n_params; ++i, off += 8)
    m.params[i] = get_f64(bytes.data() + off);
  return m;
}

// --- tape-tracked paths ----------------------------------------------------

RevField::RevField(const FieldModel& m, const Tape& tape) : model_(&m) {
  if (tape.num_params() != m.param_count())
    throw ConfigError("RevField: tape leaf count does not match model");
  leaves_.reserve(m.param_count());
  for (int i = 0; i < m.param_count(); ++i)
    leaves_.push_back(tape.leaf(i, m.params[i]));
}

std::array<Rev, 3> RevField::mlp_value(std::array<Rev, 6> input) const {
  const FieldModel& m = *model_;
  Tape& tape = Tape::active();
  std::vector<Rev> x(input.begin(), input.end());
  std::vector<Rev> y;
  const std::span<const Rev> w(leaves_);
  for (int l = 0; l < m.linear_count(); ++l) {
    const int in = m.layers[l], out = m.layers[l + 1];
    y.clear();
    y.reserve(out);
    for (int j = 0; j < out; ++j) {
      Rev s = tape.affine(w.subspan(m.weight_offset(l) + j * in, in),
                          std::span<const Rev>(x),
                          leaves_[m.bias_offset(l) + j]);
      if (l + 1 < m.linear_count()) s = activate_rev(m.activation, s);
      y.push_back(s);
    }
    x = y;
  }
  return {x[0], x[1], x[2]};
}

std::array<Dual2<Rev>, 3> RevField::mlp_dual(
    std::array<Dual2<Rev>, 6> input) const {
  const FieldModel& m = *model_;
  Tape& tape = Tape::active();
  std::vector<Rev> xv, xdt, xdp, xdtp;
  for (const auto& d : input) {
    xv.push_back(d.v);
    xdt.push_back(d.dt);
    xdp.push_back(d.dp);
    xdtp.push_back(d.dtp);
  }
  const std::span<const Rev> w(leaves_);
  const Rev zero(0.0);
  std::vector<Rev> yv, ydt, ydp, ydtp;
  for (int l = 0; l < m.linear_count(); ++l) {
    const int in = m.layers[l], out = m.layers[l + 1];
    yv.clear(); ydt.clear(); ydp.clear(); ydtp.clear();
    for (int j = 0; j < out; ++j) {
      const auto row = w.subspan(m.weight_offset(l) + j * in, in);
      Dual2<Rev> u{tape.affine(row, std::span<const Rev>(xv),
                               leaves_[m.bias_offset(l) + j]),
                   tape.affine(row, std::span<const Rev>(xdt), zero),
                   tape.affine(row, std::span<const Rev>(xdp), zero),
                   tape.affine(row, std::span<const Rev>(xdtp), zero)};
      if (l + 1 < m.linear_count()) u = activate(m.activation, u);
      yv.push_back(u.v);
      ydt.push_back(u.dt);
      ydp.push_back(u.dp);
      ydtp.push_back(u.dtp);
    }
    xv = yv; xdt = ydt; xdp = ydp; xdtp = ydtp;
  }
  return {Dual2<Rev>{xv[0], xdt[0], xdp[0], xdtp[0]},
          Dual2<Rev>{xv[1], xdt[1], xdp[1], xdtp[1]},
          Dual2<Rev>{xv[2], xdt[2], xdp[2], xdtp[2]}};
}

std::array<Rev, 3> RevField::raw_scaled(const DirectionPair& p) const {
  const FieldModel& m = *model_;
  require_antiderivative(m, "RevField::raw_scaled");
  const Dual2d ti = Dual2d::constant(p.wi.theta);
  const Dual2d pi_ = Dual2d::constant(p.wi.phi);
  const Dual2d to = Dual2d::var_theta(p.wo.theta);
  const Dual2d po = Dual2d::var_phi(p.wo.phi);
  const auto e = embed_inputs(ti, pi_, to, po, m.doubled_phi_d);
  std::array<Dual2<Rev>, 6> lifted;
  for (int k = 0; k < 6; ++k)
    lifted[k] = Dual2<Rev>{Rev(e[k].v), Rev(e[k].dt), Rev(e[k].dp),
                           Rev(e[k].dtp)};
  auto g = mlp_dual(lifted);
  const Dual2d cd = ramp_carrier(to, po);
  const Dual2<Rev> carrier{Rev(cd.v), Rev(cd.dt), Rev(cd.dp), Rev(cd.dtp)};
  const double inv = 1.0 / denom_clamped(p.wo.theta);
  std::array<Rev, 3> out;
  for (int c = 0; c < 3; ++c) {
    const Dual2<Rev> gain = Dual2<Rev>::constant(leaves_[m.ramp_offset() + c]);
    const Dual2<Rev> total = g[c] + carrier * gain;
    out[c] = total.dtp * Rev(inv);
  }
  return out;
}

std::array<Rev, 3> RevField::direct_values(const DirectionPair& p) const {
  const FieldModel& m = *model_;
  const auto e = embed_inputs(p.wi.theta, p.wi.phi, p.wo.theta, p.wo.phi,
                              m.doubled_phi_d);
  std::array<Rev, 6> lifted;
  for (int k = 0; k < 6; ++k) lifted[k] = Rev(e[k]);
  auto y = mlp_value(lifted);
  for (auto& ch : y) ch = softplus(ch);
  return y;
}

std::array<Rev, 3> RevField::g_rev(const SphericalDir& wi, double theta_o,
                                   double phi_o) const {
  const FieldModel& m = *model_;
  const auto e =
      embed_inputs(wi.theta, wi.phi, theta_o, phi_o, m.doubled_phi_d);
  std::array<Rev, 6> lifted;
  for (int k = 0; k < 6; ++k) lifted[k] = Rev(e[k]);
  auto g = mlp_value(lifted);
  const double carrier = ramp_carrier(theta_o, phi_o);
  for (int c = 0; c < 3; ++c)
    g[c] = g[c] + Rev(carrier) * leaves_[m.ramp_offset() + c];
  return g;
}

std::array<Rev, 3> RevField::integral_closed(const SphericalDir& wi) const {
  require_antiderivative(*model_, "RevField::integral_closed");
  const auto c00 = g_rev(wi, 0.0, 0.0);
  const auto c01 = g_rev(wi, 0.0, kTwoPi);
  const auto c10 = g_rev(wi, kHalfPi, 0.0);
  const auto c11 = g_rev(wi, kHalfPi, kTwoPi);
  std::array<Rev, 3> out;
  for (int c = 0; c < 3; ++c) out[c] = c11[c] - c10[c] - c01[c] + c00[c];
  return out;
}

}  // namespace brdffield
