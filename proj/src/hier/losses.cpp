#include "trajlab/hier/losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "trajlab/core/errors.hpp"
#include "trajlab/core/numeric.hpp"
#include "trajlab/core/similarity.hpp"
#include "trajlab/hier/negatives.hpp"

namespace trajlab::hier {

namespace {

// Stable per-trajectory stream tags inside total_loss.
enum : std::uint64_t {
  kNegActionStream = 11,
  kNegSubgoalStream = 12,
  kScoreActionStream = 13,
  kScoreSubgoalStream = 14,
};

Vec logits_of(const Vec& z_hat, const Vec& z_pos, const std::vector<Vec>& z_negs,
              double tau) {
  Vec logits(1 + static_cast<Eigen::Index>(z_negs.size()));
  logits[0] = cosine_sim(z_hat, z_pos, tau);
  for (std::size_t j = 0; j < z_negs.size(); ++j) {
    logits[1 + static_cast<Eigen::Index>(j)] = cosine_sim(z_hat, z_negs[j], tau);
  }
  return logits;
}

}  // namespace

double infonce_loss(const Vec& z_hat, const Vec& z_pos,
                    const std::vector<Vec>& z_negs, double tau) {
  if (z_negs.empty()) {
    throw DegenerateInputError("infonce_loss: needs at least one negative");
  }
  const Vec logits = logits_of(z_hat, z_pos, z_negs, tau);
  return log_sum_exp(logits) - logits[0];
}

InfoNceGrad infonce_grad(const Vec& z_hat, const Vec& z_pos,
                         const std::vector<Vec>& z_negs, double tau) {
  if (z_negs.empty()) {
    throw DegenerateInputError("infonce_grad: needs at least one negative");
  }
  const Vec logits = logits_of(z_hat, z_pos, z_negs, tau);
  const double lse = log_sum_exp(logits);

  InfoNceGrad out;
  out.loss = lse - logits[0];
  out.dz_hat = Vec::Zero(z_hat.size());
  // dL/dl_i = softmax_i - [i == positive]
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    double coeff = std::exp(logits[i] - lse);
    if (i == 0) coeff -= 1.0;
    const Vec& other = (i == 0) ? z_pos : z_negs[static_cast<std::size_t>(i - 1)];
    out.dz_hat += coeff * cosine_sim_grad(z_hat, other, tau).da;
  }
  return out;
}

Vec predict_next_level(const MlpParams& pred, const Vec& z) {
  return l2_normalize(mlp_forward(pred, z));
}

namespace {

// ---- total loss internals ------------------------------------------------

struct PredictorGradSink {
  MlpParams* dpred = nullptr;
  const LevelEncoder* enc = nullptr;       // the predicting level's encoder
  EncoderGrads* denc = nullptr;
  const SegmentCollection* seg = nullptr;  // windows feeding that encoder
};

// Midpoint of the real (unpadded) steps a window covers.
double window_center(const SegmentCollection& seg, std::size_t idx, int t_count) {
  const int start = seg.start_steps[idx];
  const int len = std::min(seg.window_len, t_count - start);
  return start + 0.5 * (std::max(len, 1) - 1);
}

// Index of the level-(l+1) window whose center is nearest to the level-l
// window's center; ties resolve to the lower index.
std::size_t target_index(const SegmentCollection& lower, std::size_t i,
                         const SegmentCollection& upper, int t_count) {
  const double c = window_center(lower, i, t_count);
  std::size_t best = 0;
  double best_dist = std::abs(window_center(upper, 0, t_count) - c);
  for (std::size_t j = 1; j < upper.windows.size(); ++j) {
    const double dist = std::abs(window_center(upper, j, t_count) - c);
    if (dist < best_dist - 1e-12) {
      best = j;
      best_dist = dist;
    }
  }
  return best;
}

// InfoNCE over all windows of one level against detached targets; returns the
// mean loss and accumulates gradients through the predictor and the encoder.
double level_pred_loss(const HierState& state, const Trajectory& traj,
                       const SegmentCollection& seg, const std::vector<Vec>& z,
                       const MlpParams& pred,
                       const std::vector<Vec>& targets_by_window,
                       const std::vector<std::size_t>& target_of,
                       const std::vector<std::vector<Vec>>& negs_by_window,
                       double weight, PredictorGradSink sink) {
  const double tau = state.cfg.tau;
  std::vector<double> losses;
  losses.reserve(z.size());
  const double per_window = weight / static_cast<double>(z.size());

  for (std::size_t i = 0; i < z.size(); ++i) {
    const Vec pre = mlp_forward(pred, z[i]);
    const Vec z_hat = l2_normalize(pre);
    const Vec& pos = targets_by_window[target_of[i]];
    const auto& negs = negs_by_window[i];
    if (weight == 0.0) {
      losses.push_back(infonce_loss(z_hat, pos, negs, tau));
      continue;
    }
    InfoNceGrad g = infonce_grad(z_hat, pos, negs, tau);
    losses.push_back(g.loss);
    const Vec dpre = l2_normalize_backward(pre, g.dz_hat);
    MlpBackward bw = mlp_backward(pred, z[i], dpre);
    sink.dpred->w1 += per_window * bw.dparams.w1;
    sink.dpred->b1 += per_window * bw.dparams.b1;
    sink.dpred->w2 += per_window * bw.dparams.w2;
    sink.dpred->b2 += per_window * bw.dparams.b2;
    encode_window_backward(*sink.enc, sink.seg->windows[i],
                           (per_window * bw.dx).eval(), *sink.denc);
  }
  return pairwise_mean(losses);
}

// Debiased divergence with gradients for both supports, reusing one plan per
// pairing instead of re-solving inside each public call.
struct DivergenceWithGrads {
  double value = 0.0;
  bool converged = true;
  std::vector<Vec> da;
  std::vector<Vec> db;
};

double entropic_cost_from_plan(const ot::DiscreteMeasure& a,
                               const ot::DiscreteMeasure& b, const Mat& cost,
                               const Mat& plan, double eps) {
  double transport = 0.0;
  double kl = 0.0;
  double mass = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      const double p = plan(i, j);
      if (p <= 0.0) continue;
      transport += p * cost(i, j);
      kl += p * std::log(p / (a.weights[i] * b.weights[j]));
      mass += p;
    }
  }
  kl += 1.0 - mass;
  return transport + eps * kl;
}

DivergenceWithGrads divergence_with_grads(const ot::DiscreteMeasure& a,
                                          const ot::DiscreteMeasure& b,
                                          const ot::SinkhornOptions& opt) {
  const ot::TransportPlan ab = ot::sinkhorn(a, b, opt);
  const ot::TransportPlan aa = ot::sinkhorn(a, a, opt);
  const ot::TransportPlan bb = ot::sinkhorn(b, b, opt);

  DivergenceWithGrads out;
  out.converged = ab.converged && aa.converged && bb.converged;
  const Mat c_ab = ot::cost_matrix(a.points, b.points);
  const Mat c_aa = ot::cost_matrix(a.points, a.points);
  const Mat c_bb = ot::cost_matrix(b.points, b.points);
  out.value = entropic_cost_from_plan(a, b, c_ab, ab.plan, opt.eps) -
              0.5 * entropic_cost_from_plan(a, a, c_aa, aa.plan, opt.eps) -
              0.5 * entropic_cost_from_plan(b, b, c_bb, bb.plan, opt.eps);

  const Eigen::Index d = a.dim();
  out.da.assign(a.points.size(), Vec::Zero(d));
  out.db.assign(b.points.size(), Vec::Zero(d));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      const Vec diff = 2.0 * ab.plan(i, j) * (a.points[i] - b.points[j]);
      out.da[static_cast<std::size_t>(i)] += diff;
      out.db[static_cast<std::size_t>(j)] -= diff;
    }
  }
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      out.da[static_cast<std::size_t>(i)] -=
          2.0 * aa.plan(i, j) * (a.points[i] - a.points[j]);
    }
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      out.db[static_cast<std::size_t>(i)] -=
          2.0 * bb.plan(i, j) * (b.points[i] - b.points[j]);
    }
  }
  return out;
}

std::vector<int> single_token(int tok) { return {tok}; }

}  // namespace

TotalLossResult total_loss_with_targets(const HierState& state,
                                        const HierState& targets,
                                        std::span<const Trajectory> batch,
                                        const TokenCatalog& catalog, Rng rng) {
  if (batch.empty()) throw DegenerateInputError("total_loss: empty batch");
  const HierConfig& cfg = state.cfg;

  TotalLossResult res;
  res.grads = zeros_like(state);
  EncoderGrads d_enc_action = zero_encoder_grads(state.enc_action);
  EncoderGrads d_enc_subgoal = zero_encoder_grads(state.enc_subgoal);
  EncoderGrads d_enc_prompt = zero_encoder_grads(state.enc_prompt);

  const double batch_scale = 1.0 / static_cast<double>(batch.size());
  std::vector<double> l_pred_a, l_pred_s, l_score_a, l_score_s, l_sink;

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Trajectory& traj = batch[b];
    const int t_count = static_cast<int>(traj.steps.size());
    Rng traj_rng = rng.split(b);

    const SegmentCollection seg_a = window_segments(
        traj, Level::action, cfg.action_window.window_len, cfg.action_window.stride);
    const SegmentCollection seg_s = window_segments(
        traj, Level::subgoal, cfg.subgoal_window.window_len, cfg.subgoal_window.stride);
    const SegmentCollection seg_t = window_segments(traj, Level::trajectory, 1, 1);

    const std::vector<Vec> z_a = encode_level(state.enc_action, seg_a);
    const std::vector<Vec> z_s = encode_level(state.enc_subgoal, seg_s);

    // Detached targets come from the target parameter copy.
    const std::vector<Vec> z_s_tgt = encode_level(targets.enc_subgoal, seg_s);
    const std::vector<Vec> z_t_tgt = encode_level(targets.enc_trajectory, seg_t);

    // --- cross-level prediction, action -> subgoal ---
    {
      Rng neg_rng = traj_rng.split(kNegActionStream);
      const auto neg_colls = generate_negatives(
          traj, Level::subgoal, cfg.negatives, cfg.subgoal_window.window_len,
          cfg.subgoal_window.stride, catalog, neg_rng);
      std::vector<std::vector<Vec>> neg_embs;
      neg_embs.reserve(neg_colls.size());
      for (const auto& coll : neg_colls) {
        neg_embs.push_back(encode_level(targets.enc_subgoal, coll));
      }
      std::vector<std::size_t> target_of(z_a.size());
      std::vector<std::vector<Vec>> negs_by_window(z_a.size());
      for (std::size_t i = 0; i < z_a.size(); ++i) {
        target_of[i] = target_index(seg_a, i, seg_s, t_count);
        auto& negs = negs_by_window[i];
        negs.reserve(neg_embs.size());
        for (const auto& emb : neg_embs) {
          negs.push_back(emb[std::min(target_of[i], emb.size() - 1)]);
        }
      }
      PredictorGradSink sink{&res.grads.pred_action_to_subgoal,
                             &state.enc_action, &d_enc_action, &seg_a};
      l_pred_a.push_back(level_pred_loss(
          state, traj, seg_a, z_a, state.pred_action_to_subgoal, z_s_tgt,
          target_of, negs_by_window, cfg.lambda_pred_action * batch_scale, sink));
    }

    // --- cross-level prediction, subgoal -> trajectory ---
    {
      Rng neg_rng = traj_rng.split(kNegSubgoalStream);
      const auto neg_colls =
          generate_negatives(traj, Level::trajectory, cfg.negatives, 1, 1,
                             catalog, neg_rng);
      std::vector<Vec> neg_embs;
      neg_embs.reserve(neg_colls.size());
      for (const auto& coll : neg_colls) {
        neg_embs.push_back(encode_window(targets.enc_trajectory, coll.windows[0]));
      }
      std::vector<std::size_t> target_of(z_s.size(), 0);
      std::vector<std::vector<Vec>> negs_by_window(z_s.size(), neg_embs);
      PredictorGradSink sink{&res.grads.pred_subgoal_to_traj,
                             &state.enc_subgoal, &d_enc_subgoal, &seg_s};
      l_pred_s.push_back(level_pred_loss(
          state, traj, seg_s, z_s, state.pred_subgoal_to_traj, z_t_tgt,
          target_of, negs_by_window, cfg.lambda_pred_subgoal * batch_scale, sink));
    }

    // --- denoising score alignment (data pairs are detached) ---
    const Vec p_tgt = encode_window(targets.enc_prompt, traj.prompt_tokens);
    {
      const std::vector<Vec> z_a_tgt = encode_level(targets.enc_action, seg_a);
      score::ScoreBatch sb;
      sb.reserve(z_a_tgt.size());
      for (const Vec& z : z_a_tgt) sb.push_back({z, p_tgt});
      Rng srng = traj_rng.split(kScoreActionStream);
      l_score_a.push_back(score::score_loss(state.score_action, sb, srng));
      if (cfg.lambda_score_action != 0.0) {
        MlpParams g = score::score_loss_grad(state.score_action, sb, srng);
        const double w = cfg.lambda_score_action * batch_scale;
        res.grads.score_action.params.w1 += w * g.w1;
        res.grads.score_action.params.b1 += w * g.b1;
        res.grads.score_action.params.w2 += w * g.w2;
        res.grads.score_action.params.b2 += w * g.b2;
      }
    }
    {
      score::ScoreBatch sb;
      sb.reserve(z_s_tgt.size());
      for (const Vec& z : z_s_tgt) sb.push_back({z, p_tgt});
      Rng srng = traj_rng.split(kScoreSubgoalStream);
      l_score_s.push_back(score::score_loss(state.score_subgoal, sb, srng));
      if (cfg.lambda_score_subgoal != 0.0) {
        MlpParams g = score::score_loss_grad(state.score_subgoal, sb, srng);
        const double w = cfg.lambda_score_subgoal * batch_scale;
        res.grads.score_subgoal.params.w1 += w * g.w1;
        res.grads.score_subgoal.params.b1 += w * g.b1;
        res.grads.score_subgoal.params.w2 += w * g.w2;
        res.grads.score_subgoal.params.b2 += w * g.b2;
      }
    }

    // --- transport alignment: action-window measure vs prompt tokens ---
    {
      std::vector<Vec> prompt_pts;
      prompt_pts.reserve(traj.prompt_tokens.size());
      for (int tok : traj.prompt_tokens) {
        prompt_pts.push_back(encode_window(state.enc_prompt, single_token(tok)));
      }
      const auto mu = ot::DiscreteMeasure::uniform(z_a);
      const auto nu = ot::DiscreteMeasure::uniform(prompt_pts);
      const DivergenceWithGrads div = divergence_with_grads(mu, nu, cfg.sinkhorn);
      l_sink.push_back(div.value);
      if (!div.converged) res.parts.sinkhorn_converged = false;
      if (cfg.lambda_sinkhorn != 0.0) {
        const double w = cfg.lambda_sinkhorn * batch_scale;
        for (std::size_t i = 0; i < z_a.size(); ++i) {
          encode_window_backward(state.enc_action, seg_a.windows[i],
                                 (w * div.da[i]).eval(), d_enc_action);
        }
        for (std::size_t j = 0; j < prompt_pts.size(); ++j) {
          encode_window_backward(state.enc_prompt,
                                 single_token(traj.prompt_tokens[j]),
                                 (w * div.db[j]).eval(), d_enc_prompt);
        }
      }
    }
  }

  res.grads.enc_action.token_table += d_enc_action.token_table;
  res.grads.enc_action.head.w1 += d_enc_action.head.w1;
  res.grads.enc_action.head.b1 += d_enc_action.head.b1;
  res.grads.enc_action.head.w2 += d_enc_action.head.w2;
  res.grads.enc_action.head.b2 += d_enc_action.head.b2;
  res.grads.enc_subgoal.token_table += d_enc_subgoal.token_table;
  res.grads.enc_subgoal.head.w1 += d_enc_subgoal.head.w1;
  res.grads.enc_subgoal.head.b1 += d_enc_subgoal.head.b1;
  res.grads.enc_subgoal.head.w2 += d_enc_subgoal.head.w2;
  res.grads.enc_subgoal.head.b2 += d_enc_subgoal.head.b2;
  res.grads.enc_prompt.token_table += d_enc_prompt.token_table;
  res.grads.enc_prompt.head.w1 += d_enc_prompt.head.w1;
  res.grads.enc_prompt.head.b1 += d_enc_prompt.head.b1;
  res.grads.enc_prompt.head.w2 += d_enc_prompt.head.w2;
  res.grads.enc_prompt.head.b2 += d_enc_prompt.head.b2;

  res.parts.pred_action = pairwise_mean(l_pred_a);
  res.parts.pred_subgoal = pairwise_mean(l_pred_s);
  res.parts.score_action = pairwise_mean(l_score_a);
  res.parts.score_subgoal = pairwise_mean(l_score_s);
  res.parts.sinkhorn = pairwise_mean(l_sink);
  res.parts.total = cfg.lambda_pred_action * res.parts.pred_action +
                    cfg.lambda_pred_subgoal * res.parts.pred_subgoal +
                    cfg.lambda_score_action * res.parts.score_action +
                    cfg.lambda_score_subgoal * res.parts.score_subgoal +
                    cfg.lambda_sinkhorn * res.parts.sinkhorn;
  if (!std::isfinite(res.parts.total)) {
    throw NumericError("total_loss: non-finite objective");
  }
  return res;
}

TotalLossResult total_loss(const HierState& state,
                           std::span<const Trajectory> batch,
                           const TokenCatalog& catalog, Rng rng) {
  return total_loss_with_targets(state, state, batch, catalog, rng);
}

}  // namespace trajlab::hier
