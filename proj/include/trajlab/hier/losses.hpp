#pragma once

#include <span>
#include <vector>

#include "trajlab/hier/model.hpp"

namespace trajlab::hier {

/// -log softmax of the positive among {positive} u negatives, with
/// temperature-scaled cosine logits.
double infonce_loss(const Vec& z_hat, const Vec& z_pos,
                    const std::vector<Vec>& z_negs, double tau);

struct InfoNceGrad {
  double loss;
  Vec dz_hat;  // positive and negatives are contrast targets, not updated
};

InfoNceGrad infonce_grad(const Vec& z_hat, const Vec& z_pos,
                         const std::vector<Vec>& z_negs, double tau);

/// normalize(mlp_forward(pred, z)): the cross-level prediction map.
Vec predict_next_level(const MlpParams& pred, const Vec& z);

struct LossBreakdown {
  double pred_action = 0.0;
  double pred_subgoal = 0.0;
  double score_action = 0.0;
  double score_subgoal = 0.0;
  double sinkhorn = 0.0;
  double total = 0.0;
  bool sinkhorn_converged = true;
};

struct TotalLossResult {
  LossBreakdown parts;
  HierState grads;  // same shapes as the state, zero where no gradient flows
};

/// Joint objective over a batch of trajectories:
///   sum_{l in {action, subgoal}} (lambda_pred^l L_pred^l +
///                                 lambda_score^l L_score^l)
///   + lambda_sinkhorn L_sinkhorn
/// with every component averaged across the batch.
///
/// Gradients flow through the predictors, the predicting level's encoder and
/// (for the transport term) the action/prompt encoders. Higher-level targets,
/// contrast negatives and the score networks' data pairs are produced by
/// `targets` and treated as constants, which realizes the detach contract:
/// total_loss(state, ...) simply passes the state itself as targets, while
/// tests may freeze an independent copy so finite differences see exactly the
/// differentiated paths.
TotalLossResult total_loss_with_targets(const HierState& state,
                                        const HierState& targets,
                                        std::span<const Trajectory> batch,
                                        const TokenCatalog& catalog, Rng rng);

TotalLossResult total_loss(const HierState& state,
                           std::span<const Trajectory> batch,
                           const TokenCatalog& catalog, Rng rng);

}  // namespace trajlab::hier
