#include "brdffield/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "brdffield/errors.hpp"
#include "brdffield/losses.hpp"
#include "brdffield/metrics.hpp"

namespace brdffield {

double loss_epl_value(const FieldModel& m,
                      std::span<const SphericalDir> wi_batch,
                      bool per_channel) {
  if (m.mode != FieldMode::kAntiderivative)
    throw ConfigError("loss_epl requires an antiderivative-mode model");
  double acc = 0.0;
  for (const auto& wi : wi_batch) {
    const Rgb I = hemisphere_integral_closed(m, wi);
    if (per_channel) {
      double h = 0.0;
      for (int c = 0; c < 3; ++c) h += std::max(I[c] - 1.0, 0.0);
      acc += h / 3.0;
    } else {
      acc += std::max(I.mean() - 1.0, 0.0);
    }
  }
  return acc / static_cast<double>(wi_batch.size());
}

Rev loss_epl_rev(const RevField& f, std::span<const SphericalDir> wi_batch,
                 bool per_channel) {
  if (f.model().mode != FieldMode::kAntiderivative)
    throw ConfigError("loss_epl requires an antiderivative-mode model");
  Rev acc(0.0);
  for (const auto& wi : wi_batch) {
    const auto I = f.integral_closed(wi);
    if (per_channel) {
      Rev h(0.0);
      for (int c = 0; c < 3; ++c) h += hinge(I[c] - Rev(1.0));
      acc += h * Rev(1.0 / 3.0);
    } else {
      const Rev mean = (I[0] + I[1] + I[2]) * Rev(1.0 / 3.0);
      acc += hinge(mean - Rev(1.0));
    }
  }
  return acc * Rev(1.0 / static_cast<double>(wi_batch.size()));
}

namespace {
struct Adam {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
  double lr;
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  Adam(Eigen::Index n, double learning_rate)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)),
        lr(learning_rate) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    ++t;
    m = kBeta1 * m + (1.0 - kBeta1) * grad;
    v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    params -= (lr / c1) * m.cwiseQuotient(
                              ((v / c2).cwiseSqrt().array() + kEps).matrix());
  }
};

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next_below(i)]);
}
}  // namespace

std::pair<FieldModel, RunReport> train(const BrdfSource& src,
                                       const TrainConfig& cfg,
                                       const std::string& out_dir) {
  const auto t_start = std::chrono::steady_clock::now();
  FieldModel model = make_field_model(cfg.mode, cfg.activation,
                                      cfg.reciprocity, cfg.hidden);
  Rng base(cfg.seed);
  init_for_training(model, base.fork(1).next_u64());
  auto dataset = sample_dataset(src, cfg.n_samples, base.fork(2).next_u64());
  Rng epl_rng = base.fork(3);
  Rng shuffle_rng = base.fork(4);

  const int P = model.param_count();
  Tape tape(P);
  Tape::Scope scope(tape);
  Adam adam(P, cfg.learning_rate);
  Eigen::VectorXd grad(P);

  const bool antider = cfg.mode == FieldMode::kAntiderivative;
  const bool augment = antider && cfg.reciprocity;
  const bool epl_on = cfg.epl_active();
  const bool ce_on = cfg.ce_active();

  RunReport report;
  FieldModel best = model;
  Eigen::VectorXd last_good = model.params;

  std::vector<int> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  const auto maybe_save = [&](const FieldModel& m, const std::string& name) {
    if (out_dir.empty()) return std::string();
    std::filesystem::create_directories(out_dir);
    save_checkpoint(m, (std::filesystem::path(out_dir) / name).string());
    return name;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    EpochLoss ep;
    int n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const int n_orient = augment ? 2 : 1;
      const double inv_terms =
          1.0 / (static_cast<double>(end - start) * n_orient);

      RevField rf(model, tape);
      grad.setZero();
      double fit_sum = 0.0, ce_sum = 0.0;

      for (std::size_t i = start; i < end; ++i) {
        const BrdfSample& s = dataset[order[i]];
        for (int o = 0; o < n_orient; ++o) {
          const DirectionPair pair = o == 0 ? s.pair : swapped(s.pair);
          tape.rewind();
          const auto pred =
              antider ? rf.raw_scaled(pair) : rf.direct_values(pair);
          const Rev fit = loss_fit(pred, s.value, pair.wi.theta);
          Rev objective = fit;
          fit_sum += value(fit);
          if (ce_on) {
            const Rev ce = loss_ce(pred, s.value, pair.wi.theta);
            ce_sum += value(ce);
            objective += Rev(cfg.lambda_ce) * ce;
          }
          tape.accumulate_gradient(objective, inv_terms, grad);
        }
      }

      double epl_val = 0.0;
      if (epl_on) {
        tape.rewind();
        std::vector<SphericalDir> wis(cfg.epl_wi_samples_per_step);
        for (auto& w : wis) w = sample_cosine_hemisphere(epl_rng);
        const Rev epl = loss_epl_rev(rf, wis, cfg.per_channel_epl);
        epl_val = value(epl);
        tape.accumulate_gradient(epl, cfg.lambda_epl, grad);
      }

      const double fit_mean = fit_sum * inv_terms;
      const double ce_mean = ce_sum * inv_terms;
      const double total = combine_total(fit_mean, epl_val, ce_mean,
                                         epl_on ? cfg.lambda_epl : 0.0,
                                         ce_on ? cfg.lambda_ce : 0.0);
      if (!std::isfinite(total)) {
        model.params = last_good;
        maybe_save(model, "checkpoint_last_good.bfck");
        throw DivergenceError(
            "training diverged (non-finite batch loss) at epoch " +
            std::to_string(epoch) + "; last finite state preserved");
      }
      last_good = model.params;
      adam.step(model.params, grad);

      ep.fit += fit_mean;
      ep.epl += epl_val;
      ep.ce += ce_mean;
      ep.total += total;
      ++n_batches;
    }
    ep.fit /= n_batches;
    ep.epl /= n_batches;
    ep.ce /= n_batches;
    ep.total /= n_batches;
    report.curve.push_back(ep);

    if (report.best_epoch < 0 || ep.total < report.best_total) {
      report.best_epoch = epoch;
      report.best_total = ep.total;
      best = model;
    }
  }

  report.final_fit = report.curve.empty() ? 0.0 : report.curve.back().fit;
  report.checkpoint_best = maybe_save(best, "checkpoint_best.bfck");
  report.checkpoint_final = maybe_save(model, "checkpoint_final.bfck");

  const BrdfEvaluator ev = make_evaluator(model);
  const std::uint64_t mseed = base.fork(5).next_u64();
  report.hri = hri(ev, 4096, mseed);
  report.hci = hci(ev, 4096, mseed + 1);
  report.epi = epi(model, 16, 32, mseed + 2);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return {std::move(model), std::move(report)};
}

}  // namespace brdffield
