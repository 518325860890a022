#include "trajlab/hier/model.hpp"

#include "trajlab/core/errors.hpp"

namespace trajlab::hier {

namespace {

// Stable split tags for state initialization.
enum : std::uint64_t {
  kInitEncAction = 101,
  kInitEncSubgoal = 102,
  kInitEncTrajectory = 103,
  kInitEncPrompt = 104,
  kInitPredA2S = 201,
  kInitPredS2T = 202,
  kInitScoreAction = 301,
  kInitScoreSubgoal = 302,
};

void push_mlp(std::vector<TensorView>& out, const std::string& prefix,
              MlpParams& p) {
  out.push_back({prefix + ".w1", p.w1.data(), p.w1.size(), p.w1.rows(), p.w1.cols()});
  out.push_back({prefix + ".b1", p.b1.data(), p.b1.size(), p.b1.size(), 1});
  out.push_back({prefix + ".w2", p.w2.data(), p.w2.size(), p.w2.rows(), p.w2.cols()});
  out.push_back({prefix + ".b2", p.b2.data(), p.b2.size(), p.b2.size(), 1});
}

void push_encoder(std::vector<TensorView>& out, const std::string& prefix,
                  LevelEncoder& e) {
  out.push_back({prefix + ".tokens", e.token_table.data(), e.token_table.size(),
                 e.token_table.rows(), e.token_table.cols()});
  push_mlp(out, prefix + ".head", e.head);
}

}  // namespace

HierState make_hier_state(const HierConfig& cfg, Rng& rng) {
  if (cfg.vocab <= 1) throw DegenerateInputError("make_hier_state: vocab too small");
  HierState s;
  s.cfg = cfg;
  Rng r_ea = rng.split(kInitEncAction);
  Rng r_es = rng.split(kInitEncSubgoal);
  Rng r_et = rng.split(kInitEncTrajectory);
  Rng r_ep = rng.split(kInitEncPrompt);
  Rng r_pa = rng.split(kInitPredA2S);
  Rng r_ps = rng.split(kInitPredS2T);
  Rng r_sa = rng.split(kInitScoreAction);
  Rng r_ss = rng.split(kInitScoreSubgoal);
  s.enc_action = make_level_encoder(cfg.vocab, cfg.dim, cfg.hidden, r_ea);
  s.enc_subgoal = make_level_encoder(cfg.vocab, cfg.dim, cfg.hidden, r_es);
  s.enc_trajectory = make_level_encoder(cfg.vocab, cfg.dim, cfg.hidden, r_et);
  s.enc_prompt = make_level_encoder(cfg.vocab, cfg.dim, cfg.hidden, r_ep);
  s.pred_action_to_subgoal = MlpParams::glorot(cfg.dim, cfg.hidden, cfg.dim, r_pa);
  s.pred_subgoal_to_traj = MlpParams::glorot(cfg.dim, cfg.hidden, cfg.dim, r_ps);
  s.score_action = score::make_score_net(cfg.dim, cfg.hidden, cfg.score_sigma, r_sa);
  s.score_subgoal = score::make_score_net(cfg.dim, cfg.hidden, cfg.score_sigma, r_ss);
  return s;
}

HierState zeros_like(const HierState& s) {
  HierState z = s;
  for (TensorView& tv : tensor_views(z)) {
    Eigen::Map<Vec>(tv.data, tv.size).setZero();
  }
  return z;
}

std::vector<TensorView> tensor_views(HierState& s) {
  std::vector<TensorView> out;
  out.reserve(36);
  push_encoder(out, "enc_action", s.enc_action);
  push_encoder(out, "enc_subgoal", s.enc_subgoal);
  push_encoder(out, "enc_trajectory", s.enc_trajectory);
  push_encoder(out, "enc_prompt", s.enc_prompt);
  push_mlp(out, "pred_action_to_subgoal", s.pred_action_to_subgoal);
  push_mlp(out, "pred_subgoal_to_traj", s.pred_subgoal_to_traj);
  push_mlp(out, "score_action", s.score_action.params);
  push_mlp(out, "score_subgoal", s.score_subgoal.params);
  return out;
}

Eigen::Index total_params(const HierState& s) {
  Eigen::Index n = 0;
  for (const TensorView& tv : tensor_views(const_cast<HierState&>(s))) n += tv.size;
  return n;
}

Vec state_to_vec(const HierState& s) {
  auto& mut = const_cast<HierState&>(s);
  Vec flat(total_params(s));
  Eigen::Index off = 0;
  for (const TensorView& tv : tensor_views(mut)) {
    flat.segment(off, tv.size) = Eigen::Map<const Vec>(tv.data, tv.size);
    off += tv.size;
  }
  return flat;
}

void vec_to_state(HierState& s, const Vec& flat) {
  if (flat.size() != total_params(s)) {
    throw DimensionError("vec_to_state: size mismatch");
  }
  Eigen::Index off = 0;
  for (const TensorView& tv : tensor_views(s)) {
    Eigen::Map<Vec>(tv.data, tv.size) = flat.segment(off, tv.size);
    off += tv.size;
  }
}

void axpy_state(HierState& acc, const HierState& g, double scale) {
  auto avs = tensor_views(acc);
  auto gvs = tensor_views(const_cast<HierState&>(g));
  if (avs.size() != gvs.size()) throw DimensionError("axpy_state: shape mismatch");
  for (std::size_t i = 0; i < avs.size(); ++i) {
    if (avs[i].size != gvs[i].size) throw DimensionError("axpy_state: shape mismatch");
    Eigen::Map<Vec>(avs[i].data, avs[i].size) +=
        scale * Eigen::Map<const Vec>(gvs[i].data, gvs[i].size);
  }
}

}  // namespace trajlab::hier
