#include "trajlab/io/config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "trajlab/core/errors.hpp"
#include "trajlab/grid/catalog.hpp"

namespace trajlab::io {

namespace {

using nlohmann::json;

// Overlay one section; every key must be known.
template <typename Fn>
void section(const json& root, const char* name, Fn fn) {
  if (!root.contains(name)) return;
  const json& s = root.at(name);
  if (!s.is_object()) throw DataError(std::string("config: section '") + name +
                                      "' must be an object");
  fn(s);
}

template <typename T>
void take(const json& s, const char* key, T& out, std::vector<std::string>& seen) {
  seen.push_back(key);
  if (s.contains(key)) out = s.at(key).get<T>();
}

void check_known(const json& s, const std::vector<std::string>& seen,
                 const char* section_name) {
  for (auto it = s.begin(); it != s.end(); ++it) {
    bool known = false;
    for (const auto& k : seen) known = known || k == it.key();
    if (!known) {
      throw DataError(std::string("config: unknown key '") + it.key() +
                      "' in section '" + section_name + "'");
    }
  }
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  cfg.hier.vocab = grid::domain_vocab().catalog.vocab_size;
  cfg.epr.max_lag = 10;
  cfg.epr.n_boot = 1000;
  cfg.pac.max_lag = 10;
  cfg.pac.n_boot = 1000;
  return cfg;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("config: cannot open: " + path);
  json root;
  try {
    root = json::parse(is);
  } catch (const json::exception& e) {
    throw DataError(std::string("config: parse error in ") + path + ": " + e.what());
  }
  if (!root.is_object()) throw DataError("config: top level must be an object");

  std::vector<std::string> top_seen = {"seed",       "threads", "label_mode",
                                       "hier",       "train",   "controller",
                                       "noise",      "epr",     "pac"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    bool known = false;
    for (const auto& k : top_seen) known = known || k == it.key();
    if (!known) throw DataError("config: unknown top-level key '" + it.key() + "'");
  }
  if (root.contains("seed")) cfg.seed = root.at("seed").get<std::uint64_t>();
  if (root.contains("threads")) cfg.threads = root.at("threads").get<int>();
  if (root.contains("label_mode")) {
    cfg.label_mode =
        grid::label_mode_from_name(root.at("label_mode").get<std::string>());
  }

  section(root, "hier", [&](const json& s) {
    std::vector<std::string> seen;
    take(s, "dim", cfg.hier.dim, seen);
    take(s, "hidden", cfg.hier.hidden, seen);
    take(s, "tau", cfg.hier.tau, seen);
    take(s, "negatives", cfg.hier.negatives, seen);
    take(s, "lambda_pred_action", cfg.hier.lambda_pred_action, seen);
    take(s, "lambda_pred_subgoal", cfg.hier.lambda_pred_subgoal, seen);
    take(s, "lambda_score_action", cfg.hier.lambda_score_action, seen);
    take(s, "lambda_score_subgoal", cfg.hier.lambda_score_subgoal, seen);
    take(s, "lambda_sinkhorn", cfg.hier.lambda_sinkhorn, seen);
    take(s, "score_sigma", cfg.hier.score_sigma, seen);
    take(s, "action_window_len", cfg.hier.action_window.window_len, seen);
    take(s, "action_window_stride", cfg.hier.action_window.stride, seen);
    take(s, "subgoal_window_len", cfg.hier.subgoal_window.window_len, seen);
    take(s, "subgoal_window_stride", cfg.hier.subgoal_window.stride, seen);
    take(s, "sinkhorn_eps", cfg.hier.sinkhorn.eps, seen);
    take(s, "sinkhorn_max_iter", cfg.hier.sinkhorn.max_iter, seen);
    take(s, "sinkhorn_tol", cfg.hier.sinkhorn.tol, seen);
    check_known(s, seen, "hier");
  });
  section(root, "train", [&](const json& s) {
    std::vector<std::string> seen;
    take(s, "steps", cfg.train.steps, seen);
    take(s, "stage", cfg.train.stage, seen);
    take(s, "lr", cfg.train.lr, seen);
    take(s, "weight_decay", cfg.train.weight_decay, seen);
    take(s, "batch_size", cfg.train.batch_size, seen);
    take(s, "warmup_steps", cfg.train.warmup_steps, seen);
    check_known(s, seen, "train");
  });
  section(root, "controller", [&](const json& s) {
    std::vector<std::string> seen;
    take(s, "top_k", cfg.controller.top_k, seen);
    take(s, "action_threshold", cfg.controller.action_threshold, seen);
    take(s, "relax_factor", cfg.controller.relax_factor, seen);
    take(s, "max_retries", cfg.controller.max_retries, seen);
    take(s, "subgoal_low", cfg.controller.subgoal_low, seen);
    take(s, "subgoal_margin", cfg.controller.subgoal_margin, seen);
    take(s, "traj_threshold", cfg.controller.traj_threshold, seen);
    take(s, "window_len", cfg.controller.window_len, seen);
    take(s, "use_action_gate", cfg.controller.use_action_gate, seen);
    take(s, "use_subgoal_switch", cfg.controller.use_subgoal_switch, seen);
    take(s, "use_traj_rescore", cfg.controller.use_traj_rescore, seen);
    check_known(s, seen, "controller");
  });
  section(root, "noise", [&](const json& s) {
    std::vector<std::string> seen;
    take(s, "rate", cfg.noise.rate, seen);
    take(s, "persist", cfg.noise.persist, seen);
    seen.push_back("mix");
    if (s.contains("mix")) {
      const auto mix = s.at("mix").get<std::vector<double>>();
      if (mix.size() != 4) throw DataError("config: noise.mix needs 4 weights");
      for (int i = 0; i < 4; ++i) cfg.noise.mix[static_cast<std::size_t>(i)] = mix[static_cast<std::size_t>(i)];
    }
    check_known(s, seen, "noise");
  });
  section(root, "epr", [&](const json& s) {
    std::vector<std::string> seen;
    take(s, "max_lag", cfg.epr.max_lag, seen);
    take(s, "n_boot", cfg.epr.n_boot, seen);
    take(s, "ci_level", cfg.epr.ci_level, seen);
    take(s, "ipcw", cfg.epr.ipcw, seen);
    check_known(s, seen, "epr");
  });
  section(root, "pac", [&](const json& s) {
    std::vector<std::string> seen;
    take(s, "max_lag", cfg.pac.max_lag, seen);
    take(s, "n_boot", cfg.pac.n_boot, seen);
    take(s, "ci_level", cfg.pac.ci_level, seen);
    take(s, "eps_reg", cfg.pac.eps_reg, seen);
    take(s, "fit_lo", cfg.pac.fit_lo, seen);
    take(s, "fit_hi", cfg.pac.fit_hi, seen);
    check_known(s, seen, "pac");
  });
}

void load_config_layer(RunConfig& cfg, const std::string& explicit_path) {
  if (!explicit_path.empty()) {
    apply_config_file(cfg, explicit_path);
    return;
  }
  if (const char* env = std::getenv("TRAJLAB_CONFIG")) {
    if (env[0] != '\0') apply_config_file(cfg, env);
  }
}

}  // namespace trajlab::io
