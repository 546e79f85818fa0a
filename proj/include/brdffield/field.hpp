#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "brdffield/dual.hpp"
#include "brdffield/geom.hpp"
#include "brdffield/rgb.hpp"
#include "brdffield/tape.hpp"

namespace brdffield {

enum class Activation : std::uint8_t { kSoftplus = 0, kTanh = 1, kRelu = 2 };
enum class FieldMode : std::uint8_t { kAntiderivative = 0, kDirect = 1 };

std::string to_string(Activation a);
std::string to_string(FieldMode m);
Activation activation_from_string(const std::string& s);

// MLP over the half/difference embedding. In antiderivative mode the
// network value g is an antiderivative surface over the outgoing angles:
// the BRDF is its scaled mixed partial, and per-channel albedo is carried
// by a learnable non-periodic ramp term phi_o * sin^2(theta_o)/2 * gain
// (without it, g would be 2*pi-periodic in phi_o and every closed-form
// hemisphere integral would collapse to zero). In direct mode the network
// output is the reflectance itself through a softplus head.
struct FieldModel {
  FieldMode mode = FieldMode::kAntiderivative;
  Activation activation = Activation::kSoftplus;
  bool doubled_phi_d = true;
  std::vector<int> layers = {6, 32, 32, 3};
  Eigen::VectorXd params;

  int linear_count() const { return static_cast<int>(layers.size()) - 1; }
  int weight_offset(int layer) const;
  int bias_offset(int layer) const;
  int ramp_offset() const;  // first of 3 ramp gains; -1 in direct mode
  int param_count() const;
};

// Validates the combination (rejects ReLU in antiderivative mode, which
// would zero the mixed partial almost everywhere) and allocates parameters.
FieldModel make_field_model(FieldMode mode, Activation act, bool doubled_phi_d,
                            const std::vector<int>& hidden_sizes);

// Every parameter drawn from N(0, scale^2/fan_in); ramp gains uniform in
// (0.05, 0.5). Used for property tests over generic models.
void init_random(FieldModel& m, std::uint64_t seed, double scale = 1.0);

// Fit-friendly start: Xavier hidden layers, zero final linear layer, ramp
// gains at 0.1 so the initial reflectance is a small flat lobe.
void init_for_training(FieldModel& m, std::uint64_t seed);

// Antiderivative value and its outgoing-angle derivatives, per channel.
std::array<Dual2d, 3> g_eval(const FieldModel& m, const DirectionPair& p);

// g at explicit outgoing corner angles (values only; used by the
// closed-form integral and finite-difference oracles).
Rgb g_value(const FieldModel& m, const SphericalDir& wi, double theta_o,
            double phi_o);

// Single-orientation scaled mixed partial, signed, no clamping. This is the
// quantity the quadrature oracle integrates and the training loss fits.
Rgb brdf_eval_raw(const FieldModel& m, const DirectionPair& p);

// Inference-side reflectance: non-negative; with doubled_phi_d the two slot
// orders are averaged, which makes the value exactly invariant under
// swapping the directions. Direct mode is the plain positive forward pass.
Rgb brdf_eval(const FieldModel& m, const DirectionPair& p);

// Exact hemisphere cosine integral of the raw scaled derivative via corner
// evaluations of g: g(pi/2,2pi) - g(pi/2,0) - g(0,2pi) + g(0,0). The
// two_term flag drops the middle corners (diagnostic variant).
Rgb hemisphere_integral_closed(const FieldModel& m, const SphericalDir& wi,
                               bool two_term = false);

void save_checkpoint(const FieldModel& m, const std::string& path);
FieldModel load_checkpoint(const std::string& path);
std::vector<std::uint8_t> checkpoint_bytes(const FieldModel& m);

// Tape-tracked evaluation paths used by the optimizer. Leaf ids match
// parameter indices; the tape may be rewound between calls but the leaf
// handles stay valid for the lifetime of the parameter values.
class RevField {
 public:
  RevField(const FieldModel& m, const Tape& tape);

  std::array<Rev, 3> raw_scaled(const DirectionPair& p) const;
  std::array<Rev, 3> direct_values(const DirectionPair& p) const;
  std::array<Rev, 3> integral_closed(const SphericalDir& wi) const;

  const FieldModel& model() const { return *model_; }

 private:
  std::array<Rev, 3> mlp_value(std::array<Rev, 6> x) const;
  std::array<Dual2<Rev>, 3> mlp_dual(std::array<Dual2<Rev>, 6> x) const;
  std::array<Rev, 3> g_rev(const SphericalDir& wi, double theta_o,
                           double phi_o) const;

  const FieldModel* model_;
  std::vector<Rev> leaves_;
};

}  // namespace brdffield
