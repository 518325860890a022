#pragma once

#include <cstdint>
#include <vector>

#include "trajlab/control/plan.hpp"
#include "trajlab/grid/policy.hpp"
#include "trajlab/grid/tasks.hpp"
#include "trajlab/hier/model.hpp"
#include "trajlab/ot/sinkhorn.hpp"

namespace trajlab::ctrl {

struct ControllerConfig {
  int top_k = 3;
  double action_threshold = 0.5;  // tau_a, on raw cosine
  double relax_factor = 0.8;
  int max_retries = 3;
  double subgoal_low = 0.4;    // tau_s
  double subgoal_margin = 0.1;  // m
  double traj_threshold = -0.5;  // tau_t on the negated divergence scale
  int window_len = 4;
  // Ablation switches; with all three off the controller degenerates to
  // taking the highest-logit proposal.
  bool use_action_gate = true;
  bool use_subgoal_switch = true;
  bool use_traj_rescore = true;
  ot::SinkhornOptions rescore_sinkhorn{0.05, 300, 1e-6};
};

/// Per-step embeddings of the realized episode prefix.
struct TrajectoryBuffer {
  std::vector<Vec> embedded;  // trailing-window embedding after each step
  std::vector<hier::StepRecord> raw;
};

/// Encoding of the last (window_len - 1) realized steps plus a hypothetical
/// candidate action token, under the action-level encoder.
Vec candidate_window_embedding(const hier::HierState& state,
                               const TrajectoryBuffer& buffer,
                               int candidate_token, int window_len);

struct ActionDiagnostics {
  int chosen = -1;                      // action token
  std::vector<int> candidates;          // Top-K tokens in logit order
  std::vector<double> candidate_logits;
  std::vector<double> candidate_sims;   // cosine to the subgoal embedding
  double threshold_used = 0.0;
  int retries_used = 0;
  bool fell_back = false;
};

/// Top-K gate with progressive threshold relaxation: accept the first
/// candidate (logit order) whose candidate-conditioned window embedding
/// clears tau_a against the subgoal embedding; relax tau_a by relax_factor up
/// to max_retries times; exhausted retries fall back to the argmax logit.
/// Total for every finite logit vector; ties break to the lower token id.
ActionDiagnostics select_action(const hier::HierState& state,
                                const ControllerConfig& cfg, const Vec& logits,
                                const Vec& subgoal_emb,
                                const TrajectoryBuffer& buffer);

enum class SwitchDecision { stay, advance };

/// Advance iff sim(window, cur) < tau_s and sim(window, next) exceeds it by
/// the margin.
SwitchDecision maybe_switch_subgoal(const Vec& window_emb, const Vec& cur_emb,
                                    const Vec& next_emb,
                                    const ControllerConfig& cfg);

struct RescoreResult {
  int action = -1;
  std::vector<double> scores;  // negated divergence per candidate
  bool fell_back = false;
};

/// Trajectory-level re-ranking: each candidate is scored by appending its
/// hypothetical window embedding to the buffer measure and negating the
/// divergence against the prompt measure. Non-converged solves score -inf.
/// A best score below tau_t falls back to the action-level top choice ranked
/// by equal-weighted logit softmax and rescaled similarity.
RescoreResult rescore_trajectory(const std::vector<int>& candidates,
                                 const TrajectoryBuffer& buffer,
                                 const ot::DiscreteMeasure& prompt_measure,
                                 const hier::HierState& state,
                                 const ControllerConfig& cfg,
                                 const ActionDiagnostics& diag);

/// How episode proposals are produced: an oracle-anchored logit field with
/// optional taxonomy-class corruption bursts (the stand-in action generator
/// whose mistakes the controller is supposed to catch).
struct EpisodeOptions {
  std::uint64_t seed = 0;
  grid::LabelMode mode = grid::LabelMode::deviation;
  grid::NoiseSpec noise{};
  int max_steps = -1;  // -1: the task budget
  double oracle_boost = 6.0;
  double corrupt_boost = 8.0;
  double logit_noise = 0.5;
};

/// Full inference loop: propose -> gate -> rescore -> step -> switch/advance,
/// until the task goal holds or the budget runs out. Pure function of
/// (task, state, cfg, plan, options).
hier::Trajectory run_episode(const grid::TaskSpec& task,
                             const hier::HierState& state,
                             const ControllerConfig& cfg, SubgoalPlan plan,
                             const EpisodeOptions& opt);

}  // namespace trajlab::ctrl
