#pragma once

#include <cstdint>
#include <vector>

#include "trajlab/hier/losses.hpp"

namespace trajlab::hier {

struct TrainOptions {
  int steps = 1000;
  int stage = 2;  // 1: prediction-only pre-training; 2: full joint objective
  double lr = 1e-4;
  double weight_decay = 0.01;
  int batch_size = 32;
  int warmup_steps = 1000;  // linear warm-up, then cosine decay to zero
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::vector<double> loss_history;          // joint objective per step
  std::vector<LossBreakdown> part_history;   // sampled every log_stride steps
  int log_stride = 1;
};

/// Decoupled-weight-decay adaptive-moment optimization of the joint
/// objective. Stage 1 zeroes the score and transport weights so only the
/// contrastive prediction terms shape the encoders. Batches are sampled with
/// replacement from `data` using per-step split streams. Throws NumericError
/// if the loss turns non-finite.
TrainResult train(HierState& state, const std::vector<Trajectory>& data,
                  const TokenCatalog& catalog, const TrainOptions& opt);

double lr_at_step(const TrainOptions& opt, int step);

}  // namespace trajlab::hier
