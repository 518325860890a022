#pragma once

#include <utility>
#include <vector>

#include "trajlab/core/mlp.hpp"
#include "trajlab/core/rng.hpp"
#include "trajlab/core/types.hpp"

namespace trajlab::score {

/// Denoising score network s(z, p): an MLP over concat(z, p) returning a
/// d-dimensional corrective direction, trained to predict -xi/sigma^2 for
/// Gaussian perturbations xi.
struct ScoreNet {
  MlpParams params;  // maps 2d -> d
  double sigma = 0.5;

  Eigen::Index dim() const { return params.out_dim(); }
};

ScoreNet make_score_net(Eigen::Index dim, Eigen::Index hidden, double sigma,
                        Rng& rng);

struct ScorePair {
  Vec z;  // state embedding
  Vec p;  // prompt embedding
};
using ScoreBatch = std::vector<ScorePair>;

/// z + xi with xi ~ N(0, sigma^2 I); returns (z_noisy, xi).
std::pair<Vec, Vec> perturb(const Vec& z, double sigma, Rng& rng);

/// Mean over the batch of || s(z + xi, p) - (-xi / sigma^2) ||^2.
///
/// The rng is taken by value: calling score_loss and score_loss_grad with the
/// same rng uses the same noise draw, which is what makes finite-difference
/// checks of the gradient meaningful.
double score_loss(const ScoreNet& net, const ScoreBatch& batch, Rng rng);

/// Analytic gradient of score_loss in the network parameters, under the same
/// noise draw as the paired score_loss call.
MlpParams score_loss_grad(const ScoreNet& net, const ScoreBatch& batch, Rng rng);

/// s(z, p); deterministic query of the corrective field.
Vec score_query(const ScoreNet& net, const Vec& z, const Vec& p);

}  // namespace trajlab::score
