#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "brdffield/field.hpp"
#include "brdffield/source.hpp"

namespace brdffield {

struct TrainConfig {
  FieldMode mode = FieldMode::kAntiderivative;
  bool reciprocity = true;  // doubled phi_d; antiderivative fits both slot orders
  bool use_epl = true;      // energy-passivity penalty (antiderivative only)
  bool use_ce = true;       // chromaticity term
  double lambda_epl = 0.1;
  double lambda_ce = 1.0;
  double learning_rate = 5e-4;
  int batch_size = 512;
  int epochs = 20;
  int epl_wi_samples_per_step = 16;
  int n_samples = 100000;
  std::uint64_t seed = 1;
  std::vector<int> hidden = {32, 32};
  Activation activation = Activation::kSoftplus;
  bool per_channel_epl = false;  // strict per-channel passivity variant

  bool epl_active() const {
    return mode == FieldMode::kAntiderivative && use_epl && lambda_epl > 0.0;
  }
  bool ce_active() const { return use_ce && lambda_ce > 0.0; }
};

struct EpochLoss {
  double total = 0.0;
  double fit = 0.0;
  double epl = 0.0;
  double ce = 0.0;
};

struct RunReport {
  std::vector<EpochLoss> curve;
  double final_fit = 0.0;
  int best_epoch = -1;
  double best_total = 0.0;
  // quick plausibility snapshot of the trained model
  double hri = 0.0;
  double hci = 0.0;
  double epi = 0.0;
  std::string checkpoint_final;  // relative to the output directory
  std::string checkpoint_best;
  std::string config_echo;
  double wall_seconds = 0.0;  // reported separately, never serialized
};

// Mean hinge excess of the closed-form hemisphere integral over 1 across
// the given incident directions; channel-mean aggregation by default.
double loss_epl_value(const FieldModel& m,
                      std::span<const SphericalDir> wi_batch,
                      bool per_channel = false);
Rev loss_epl_rev(const RevField& f, std::span<const SphericalDir> wi_batch,
                 bool per_channel = false);

// Adam fit of the configured model to samples drawn from the source.
// Writes checkpoints into out_dir when non-empty (final + best epoch; on
// divergence the last finite state is saved before the error propagates).
std::pair<FieldModel, RunReport> train(const BrdfSource& src,
                                       const TrainConfig& cfg,
                                       const std::string& out_dir = "");

}  // namespace brdffield
