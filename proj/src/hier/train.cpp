#include "trajlab/hier/train.hpp"

#include <cmath>

#include "trajlab/core/errors.hpp"

namespace trajlab::hier {

namespace {

enum : std::uint64_t { kBatchStream = 1, kLossStream = 2 };

}  // namespace

double lr_at_step(const TrainOptions& opt, int step) {
  // step is 1-based. Linear warm-up, then cosine decay to zero.
  if (opt.warmup_steps > 0 && step <= opt.warmup_steps) {
    return opt.lr * static_cast<double>(step) /
           static_cast<double>(opt.warmup_steps);
  }
  const int tail = opt.steps - opt.warmup_steps;
  if (tail <= 0) return opt.lr;
  const double progress =
      static_cast<double>(step - opt.warmup_steps) / static_cast<double>(tail);
  constexpr double pi = 3.14159265358979323846;
  return opt.lr * 0.5 * (1.0 + std::cos(pi * std::min(progress, 1.0)));
}

TrainResult train(HierState& state, const std::vector<Trajectory>& data,
                  const TokenCatalog& catalog, const TrainOptions& opt) {
  if (data.empty()) throw DegenerateInputError("train: no trajectories");
  if (opt.steps < 0) throw DegenerateInputError("train: negative step count");

  HierConfig stage_cfg = state.cfg;
  if (opt.stage == 1) {
    stage_cfg.lambda_score_action = 0.0;
    stage_cfg.lambda_score_subgoal = 0.0;
    stage_cfg.lambda_sinkhorn = 0.0;
  }

  const Eigen::Index n_params = total_params(state);
  Vec m = Vec::Zero(n_params);
  Vec v = Vec::Zero(n_params);

  TrainResult result;
  result.loss_history.reserve(static_cast<std::size_t>(opt.steps));

  Rng root(opt.seed);
  for (int step = 1; step <= opt.steps; ++step) {
    Rng step_rng = root.split(static_cast<std::uint64_t>(step));
    Rng batch_rng = step_rng.split(kBatchStream);

    std::vector<Trajectory> batch;
    const int bsz = std::min<int>(opt.batch_size, 1 << 20);
    batch.reserve(static_cast<std::size_t>(bsz));
    for (int i = 0; i < bsz; ++i) {
      batch.push_back(data[batch_rng.uniform_int(data.size())]);
    }

    HierState eval_state = state;
    eval_state.cfg = stage_cfg;
    TotalLossResult loss = total_loss(eval_state, batch, catalog,
                                      step_rng.split(kLossStream));
    if (!std::isfinite(loss.parts.total)) {
      throw NumericError("train: loss diverged (non-finite) at step " +
                         std::to_string(step));
    }
    result.loss_history.push_back(loss.parts.total);
    result.part_history.push_back(loss.parts);

    const double lr = lr_at_step(opt, step);
    const Vec g = state_to_vec(loss.grads);
    Vec theta = state_to_vec(state);
    const double bc1 = 1.0 - std::pow(opt.beta1, step);
    const double bc2 = 1.0 - std::pow(opt.beta2, step);
    for (Eigen::Index i = 0; i < n_params; ++i) {
      m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
      v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      theta[i] -= lr * (m_hat / (std::sqrt(v_hat) + opt.adam_eps) +
                        opt.weight_decay * theta[i]);
    }
    vec_to_state(state, theta);
  }
  return result;
}

}  // namespace trajlab::hier
