#include "trajlab/grid/policy.hpp"

#include "trajlab/core/errors.hpp"

namespace trajlab::grid {

CorruptionProcess::CorruptionProcess(const NoiseSpec& spec, Rng rng)
    : spec_(spec), rng_(rng) {
  if (spec.rate < 0.0 || spec.rate > 1.0) {
    throw DegenerateInputError("NoiseSpec: rate outside [0,1]");
  }
  if (spec.persist < 0.0 || spec.persist >= 1.0) {
    throw DegenerateInputError("NoiseSpec: persist outside [0,1)");
  }
}

FailureClass CorruptionProcess::draw_class() {
  double total = 0.0;
  for (double w : spec_.mix) total += w;
  if (total <= 0.0) return FailureClass::ordering;
  double u = rng_.uniform() * total;
  for (int i = 0; i < 4; ++i) {
    u -= spec_.mix[static_cast<std::size_t>(i)];
    if (u < 0.0) return static_cast<FailureClass>(i);
  }
  return FailureClass::looping;
}

std::optional<FailureClass> CorruptionProcess::advance() {
  const double rate = spec_.rate;
  // Stay-corrupt and enter-corrupt probabilities chosen so the stationary
  // corrupted fraction equals `rate` for any persistence level.
  const double p_stay = rate >= 1.0 ? 1.0 : rate + spec_.persist * (1.0 - rate);
  const double p_enter =
      rate >= 1.0 ? 1.0 : rate * (1.0 - p_stay) / (1.0 - rate);

  const bool was_active = active_;
  if (!started_) {
    started_ = true;
    active_ = rng_.bernoulli(rate);
  } else {
    active_ = rng_.bernoulli(was_active ? p_stay : p_enter);
  }
  if (!active_) return std::nullopt;
  if (!was_active) cls_ = draw_class();
  return cls_;
}

GridAction corrupted_action(FailureClass cls, const GridEnv& env,
                            const GridAction& last_executed, Rng& rng) {
  const GridAction oracle = env.oracle_action_now();
  GridAction bad{Verb::noop, -1};

  switch (cls) {
    case FailureClass::ordering: {
      // Jump ahead: act for the next pending subgoal as if the current one
      // were already done (close-the-fridge-before-taking-the-milk pattern).
      bad = env.oracle_action_for(env.oracle_subgoal_index() + 1);
      break;
    }
    case FailureClass::grounding: {
      // Pursue or manipulate a same-category distractor instead.
      if (oracle.object >= 0) {
        const auto& kind = object_kind(oracle.object);
        int swap = -1;
        for (int o = 0; o < kObjectCount; ++o) {
          if (o == oracle.object) continue;
          const auto& other = object_kind(o);
          if (other.portable == kind.portable && other.category == kind.category &&
              env.state().objects[static_cast<std::size_t>(o)].present) {
            swap = o;
            break;
          }
        }
        if (swap >= 0) {
          bad = {oracle.verb, swap};
          break;
        }
      }
      // Objectless oracle step: walk toward some present portable distractor.
      for (int o = 0; o < kObjectCount; ++o) {
        if (!object_kind(o).portable) continue;
        if (!env.state().objects[static_cast<std::size_t>(o)].present) continue;
        const GridAction toward = move_toward(env.state(), env.state().effective_pos(o));
        if (!(toward == oracle)) {
          bad = toward;
          break;
        }
      }
      break;
    }
    case FailureClass::premature:
      bad = {Verb::noop, -1};
      break;
    case FailureClass::looping:
      bad = last_executed;
      break;
  }

  if (bad == oracle) {
    bad = {Verb::noop, -1};
  }
  if (bad == oracle) {
    // Oracle itself is a NOOP; any move is a deviation.
    bad = {rng.bernoulli(0.5) ? Verb::move_n : Verb::move_e, -1};
  }
  return bad;
}

Policy oracle_policy() {
  return [](const GridEnv& env) { return env.oracle_action_now(); };
}

Policy noisy_policy(const NoiseSpec& spec, std::uint64_t noise_seed) {
  struct State {
    CorruptionProcess process;
    Rng rng;
    GridAction last{Verb::noop, -1};
  };
  auto st = std::make_shared<State>(
      State{CorruptionProcess(spec, Rng(noise_seed)), Rng(noise_seed + 1)});
  return [st](const GridEnv& env) {
    const auto cls = st->process.advance();
    GridAction a = cls.has_value()
                       ? corrupted_action(*cls, env, st->last, st->rng)
                       : env.oracle_action_now();
    st->last = a;
    return a;
  };
}

hier::Trajectory rollout(const TaskSpec& task, std::uint64_t seed,
                         LabelMode mode, const Policy& policy,
                         int max_steps_override) {
  const auto& vocab = domain_vocab();
  GridEnv env(task, seed, mode);
  const int budget = max_steps_override >= 0 ? max_steps_override : task.max_steps;

  hier::Trajectory traj;
  traj.task_id = task.id;
  traj.prompt_tokens = task.prompt_tokens;

  for (int t = 0; t < budget; ++t) {
    if (goal_satisfied(task, env.state())) break;
    hier::StepRecord rec;
    rec.t = t;
    rec.state_tokens = {vocab.zone_token(env.state().agent),
                        vocab.held_token(env.state().held)};
    rec.subgoal_id = std::min(env.oracle_subgoal_index(),
                              static_cast<int>(task.plan.subgoals.size()) - 1);
    const GridAction a = policy(env);
    const int token = vocab.action_token(a.verb, a.object);
    if (token < 0) throw DegenerateInputError("rollout: action outside domain");
    rec.action = token;
    const GridEnv::Outcome out = env.apply(a);
    rec.error_flag = out.error_flag;
    traj.steps.push_back(std::move(rec));
    if (out.done) break;
  }
  return traj;
}

}  // namespace trajlab::grid
