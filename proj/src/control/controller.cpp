#include "trajlab/control/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trajlab/core/errors.hpp"
#include "trajlab/core/numeric.hpp"
#include "trajlab/core/similarity.hpp"
#include "trajlab/grid/catalog.hpp"

namespace trajlab::ctrl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> top_k_tokens(const Vec& logits, int k) {
  const auto& vocab = grid::domain_vocab();
  const int begin = vocab.catalog.action_token_begin;
  std::vector<int> order(static_cast<std::size_t>(logits.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (logits[a] != logits[b]) return logits[a] > logits[b];
    return a < b;  // lower action id wins ties
  });
  const int k_eff = std::min<int>(k, static_cast<int>(order.size()));
  std::vector<int> tokens(order.begin(), order.begin() + k_eff);
  for (int& t : tokens) t += begin;
  return tokens;
}

}  // namespace

SubgoalPlan decompose_task(int task_id) {
  SubgoalPlan plan = grid::find_task(task_id).plan;
  plan.current_index = 0;
  return plan;
}

Vec candidate_window_embedding(const hier::HierState& state,
                               const TrajectoryBuffer& buffer,
                               int candidate_token, int window_len) {
  std::vector<int> tokens;
  const int history = std::min<int>(window_len - 1,
                                    static_cast<int>(buffer.raw.size()));
  for (std::size_t i = buffer.raw.size() - static_cast<std::size_t>(history);
       i < buffer.raw.size(); ++i) {
    const auto& step = buffer.raw[i];
    tokens.insert(tokens.end(), step.state_tokens.begin(), step.state_tokens.end());
    tokens.push_back(step.action);
  }
  tokens.push_back(candidate_token);
  return encode_window(state.enc_action, tokens);
}

ActionDiagnostics select_action(const hier::HierState& state,
                                const ControllerConfig& cfg, const Vec& logits,
                                const Vec& subgoal_emb,
                                const TrajectoryBuffer& buffer) {
  if (!logits.allFinite()) {
    throw NumericError("select_action: non-finite logits");
  }
  ActionDiagnostics diag;
  diag.candidates = top_k_tokens(logits, cfg.top_k);
  const auto& vocab = grid::domain_vocab();
  for (int tok : diag.candidates) {
    diag.candidate_logits.push_back(
        logits[tok - vocab.catalog.action_token_begin]);
    const Vec emb = candidate_window_embedding(state, buffer, tok, cfg.window_len);
    diag.candidate_sims.push_back(cosine_sim(emb, subgoal_emb, 1.0));
  }

  double threshold = cfg.action_threshold;
  for (int retry = 0; retry <= cfg.max_retries; ++retry) {
    for (std::size_t i = 0; i < diag.candidates.size(); ++i) {
      if (diag.candidate_sims[i] > threshold) {
        diag.chosen = diag.candidates[i];
        diag.threshold_used = threshold;
        diag.retries_used = retry;
        return diag;
      }
    }
    threshold *= cfg.relax_factor;
  }
  diag.chosen = diag.candidates.front();  // argmax-logit fallback
  diag.threshold_used = threshold;
  diag.retries_used = cfg.max_retries;
  diag.fell_back = true;
  return diag;
}

SwitchDecision maybe_switch_subgoal(const Vec& window_emb, const Vec& cur_emb,
                                    const Vec& next_emb,
                                    const ControllerConfig& cfg) {
  const double sim_cur = cosine_sim(window_emb, cur_emb, 1.0);
  const double sim_next = cosine_sim(window_emb, next_emb, 1.0);
  if (sim_cur < cfg.subgoal_low && sim_next > sim_cur + cfg.subgoal_margin) {
    return SwitchDecision::advance;
  }
  return SwitchDecision::stay;
}

RescoreResult rescore_trajectory(const std::vector<int>& candidates,
                                 const TrajectoryBuffer& buffer,
                                 const ot::DiscreteMeasure& prompt_measure,
                                 const hier::HierState& state,
                                 const ControllerConfig& cfg,
                                 const ActionDiagnostics& diag) {
  if (candidates.empty()) {
    throw DegenerateInputError("rescore_trajectory: no candidates");
  }
  RescoreResult res;
  res.scores.reserve(candidates.size());
  int best = -1;
  double best_score = kNegInf;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::vector<Vec> pts = buffer.embedded;
    pts.push_back(candidate_window_embedding(state, buffer, candidates[i],
                                             cfg.window_len));
    const auto mu = ot::DiscreteMeasure::uniform(std::move(pts));
    const ot::OtValue div =
        ot::sinkhorn_divergence(mu, prompt_measure, cfg.rescore_sinkhorn);
    const double score = div.converged ? -div.value : kNegInf;
    res.scores.push_back(score);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    } else if (score == best_score && best >= 0 &&
               candidates[i] < candidates[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(i);
    }
  }

  if (best < 0 || best_score < cfg.traj_threshold) {
    // Action-level fallback: equal-weight combination of the logit softmax
    // and the rescaled gate similarity.
    Vec lg(static_cast<Eigen::Index>(diag.candidate_logits.size()));
    for (Eigen::Index i = 0; i < lg.size(); ++i) {
      lg[i] = diag.candidate_logits[static_cast<std::size_t>(i)];
    }
    const double lse = log_sum_exp(lg);
    int pick = 0;
    double pick_value = kNegInf;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double prob = std::exp(lg[static_cast<Eigen::Index>(i)] - lse);
      const double simn = 0.5 * (diag.candidate_sims[i] + 1.0);
      const double combined = 0.5 * prob + 0.5 * simn;
      if (combined > pick_value ||
          (combined == pick_value && candidates[i] < candidates[static_cast<std::size_t>(pick)])) {
        pick_value = combined;
        pick = static_cast<int>(i);
      }
    }
    res.action = candidates[static_cast<std::size_t>(pick)];
    res.fell_back = true;
    return res;
  }
  res.action = candidates[static_cast<std::size_t>(best)];
  return res;
}

namespace {

enum : std::uint64_t { kNoiseStream = 1, kLogitStream = 2, kCorruptStream = 3 };

}  // namespace

hier::Trajectory run_episode(const grid::TaskSpec& task,
                             const hier::HierState& state,
                             const ControllerConfig& cfg, SubgoalPlan plan,
                             const EpisodeOptions& opt) {
  const auto& vocab = grid::domain_vocab();
  grid::GridEnv env(task, opt.seed, opt.mode);
  Rng root(opt.seed);
  grid::CorruptionProcess process(opt.noise, root.split(kNoiseStream));
  Rng logit_rng = root.split(kLogitStream);
  Rng corrupt_rng = root.split(kCorruptStream);

  const int budget = opt.max_steps >= 0 ? opt.max_steps : task.max_steps;
  const int n_actions = vocab.action_token_count();

  // Prompt-side embeddings are fixed for the whole episode.
  std::vector<Vec> prompt_pts;
  prompt_pts.reserve(task.prompt_tokens.size());
  for (int tok : task.prompt_tokens) {
    prompt_pts.push_back(encode_window(state.enc_prompt, {tok}));
  }
  const auto prompt_measure = ot::DiscreteMeasure::uniform(prompt_pts);
  std::vector<Vec> subgoal_embs;
  subgoal_embs.reserve(plan.subgoals.size());
  for (const Subgoal& sg : plan.subgoals) {
    subgoal_embs.push_back(encode_window(state.enc_prompt, sg.description_tokens));
  }

  TrajectoryBuffer buffer;
  hier::Trajectory traj;
  traj.task_id = task.id;
  traj.prompt_tokens = task.prompt_tokens;
  grid::GridAction last_executed{grid::Verb::noop, -1};

  for (int t = 0; t < budget; ++t) {
    if (grid::goal_satisfied(task, env.state())) break;

    // Oracle-anchored noisy proposal logits over the action vocabulary.
    Vec logits(n_actions);
    for (int i = 0; i < n_actions; ++i) {
      logits[i] = opt.logit_noise * logit_rng.gaussian();
    }
    const grid::GridAction oracle = env.oracle_action_now();
    logits[vocab.action_token(oracle.verb, oracle.object) -
           vocab.catalog.action_token_begin] += opt.oracle_boost;
    const auto cls = process.advance();
    if (cls.has_value()) {
      const grid::GridAction bad =
          grid::corrupted_action(*cls, env, last_executed, corrupt_rng);
      logits[vocab.action_token(bad.verb, bad.object) -
             vocab.catalog.action_token_begin] += opt.corrupt_boost;
    }

    hier::StepRecord rec;
    rec.t = t;
    rec.state_tokens = {vocab.zone_token(env.state().agent),
                        vocab.held_token(env.state().held)};
    rec.subgoal_id = std::min(env.oracle_subgoal_index(),
                              static_cast<int>(task.plan.subgoals.size()) - 1);

    const Vec& subgoal_emb =
        subgoal_embs[static_cast<std::size_t>(plan.current_index)];
    int action_token;
    ActionDiagnostics diag;
    if (cfg.use_action_gate) {
      diag = select_action(state, cfg, logits, subgoal_emb, buffer);
      action_token = diag.chosen;
    } else {
      diag.candidates = top_k_tokens(logits, cfg.top_k);
      for (int tok : diag.candidates) {
        diag.candidate_logits.push_back(
            logits[tok - vocab.catalog.action_token_begin]);
        diag.candidate_sims.push_back(0.0);
      }
      diag.chosen = diag.candidates.front();
      action_token = diag.chosen;
    }
    if (cfg.use_traj_rescore) {
      const RescoreResult rr = rescore_trajectory(
          diag.candidates, buffer, prompt_measure, state, cfg, diag);
      action_token = rr.action;
    }

    // Trailing-window embedding of the step about to be recorded.
    const Vec step_emb =
        candidate_window_embedding(state, buffer, action_token, cfg.window_len);

    const grid::GridAction act = vocab.action_of(action_token);
    const grid::GridEnv::Outcome out = env.apply(act);
    rec.action = action_token;
    rec.error_flag = out.error_flag;
    last_executed = act;

    buffer.raw.push_back(rec);
    buffer.embedded.push_back(step_emb);
    traj.steps.push_back(std::move(rec));

    // Plan bookkeeping: completion predicates always advance; the learned
    // switch may advance early when the window has clearly moved on.
    while (plan.current_index + 1 < static_cast<int>(plan.subgoals.size()) &&
           grid::eval_predicate(
               plan.subgoals[static_cast<std::size_t>(plan.current_index)].done,
               env.state())) {
      plan.current_index += 1;
    }
    if (cfg.use_subgoal_switch && !plan.at_last()) {
      const Vec& window_emb = buffer.embedded.back();
      const auto idx = static_cast<std::size_t>(plan.current_index);
      if (maybe_switch_subgoal(window_emb, subgoal_embs[idx],
                               subgoal_embs[idx + 1],
                               cfg) == SwitchDecision::advance) {
        plan.current_index += 1;
      }
    }

    if (out.done) break;
  }
  return traj;
}

}  // namespace trajlab::ctrl
