#pragma once

#include <string>
#include <vector>

#include "trajlab/core/rng.hpp"
#include "trajlab/hier/encoder.hpp"
#include "trajlab/hier/tokens.hpp"
#include "trajlab/hier/trajectory.hpp"
#include "trajlab/ot/sinkhorn.hpp"
#include "trajlab/score/score_field.hpp"

namespace trajlab::hier {

struct WindowSpec {
  int window_len = 4;
  int stride = 1;
};

struct HierConfig {
  int vocab = 0;
  int dim = 32;
  int hidden = 64;
  WindowSpec action_window{4, 1};
  WindowSpec subgoal_window{12, 4};
  double tau = 0.1;   // InfoNCE temperature
  int negatives = 8;  // distractors per positive
  double lambda_pred_action = 0.5;
  double lambda_pred_subgoal = 0.5;
  double lambda_score_action = 0.2;
  double lambda_score_subgoal = 0.2;
  double lambda_sinkhorn = 0.1;
  double score_sigma = 0.5;
  ot::SinkhornOptions sinkhorn{0.05, 500, 1e-9};
};

/// All trainable tensors of the hierarchy: one encoder per level plus the
/// prompt encoder, the two cross-level predictors, and one score network per
/// predicting level. Doubles as the gradient container (see zeros_like).
struct HierState {
  HierConfig cfg;
  LevelEncoder enc_action;
  LevelEncoder enc_subgoal;
  LevelEncoder enc_trajectory;
  LevelEncoder enc_prompt;
  MlpParams pred_action_to_subgoal;  // d -> d
  MlpParams pred_subgoal_to_traj;    // d -> d
  score::ScoreNet score_action;      // 2d -> d
  score::ScoreNet score_subgoal;
};

HierState make_hier_state(const HierConfig& cfg, Rng& rng);
HierState zeros_like(const HierState& s);

/// Named flat view over one tensor's storage; the fixed visitation order is
/// the contract shared by the optimizer, checkpoints and flatten/unflatten.
struct TensorView {
  std::string name;
  double* data;
  Eigen::Index size;
  Eigen::Index rows;
  Eigen::Index cols;
};

std::vector<TensorView> tensor_views(HierState& s);

Eigen::Index total_params(const HierState& s);
Vec state_to_vec(const HierState& s);
void vec_to_state(HierState& s, const Vec& flat);

/// acc += scale * g, tensor by tensor.
void axpy_state(HierState& acc, const HierState& g, double scale);

}  // namespace trajlab::hier
