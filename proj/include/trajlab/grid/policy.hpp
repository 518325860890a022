#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>

#include "trajlab/core/rng.hpp"
#include "trajlab/grid/world.hpp"
#include "trajlab/hier/negatives.hpp"
#include "trajlab/hier/trajectory.hpp"

namespace trajlab::grid {

using hier::FailureClass;

/// Step-level corruption parameters. `rate` is the stationary fraction of
/// corrupted steps; `persist` in [0,1) stretches corruptions into bursts
/// while keeping that marginal fixed (persist = 0 gives i.i.d. corruption,
/// the null fixture for propagation diagnostics).
struct NoiseSpec {
  double rate = 0.0;
  double persist = 0.0;
  std::array<double, 4> mix{1.0, 1.0, 1.0, 1.0};  // taxonomy class weights
};

/// Two-state burst chain over {clean, corrupt} with stationary marginal
/// `rate`; the active failure class is drawn from `mix` at burst entry.
class CorruptionProcess {
 public:
  CorruptionProcess(const NoiseSpec& spec, Rng rng);

  /// Advance one step; the engaged class, or nullopt for a clean step.
  std::optional<FailureClass> advance();

 private:
  NoiseSpec spec_;
  Rng rng_;
  bool started_ = false;
  bool active_ = false;
  FailureClass cls_ = FailureClass::ordering;

  FailureClass draw_class();
};

/// The action a corruption of the given class replaces the oracle action
/// with; guaranteed to differ from the current oracle action.
GridAction corrupted_action(FailureClass cls, const GridEnv& env,
                            const GridAction& last_executed, Rng& rng);

using Policy = std::function<GridAction(const GridEnv&)>;

Policy oracle_policy();

/// Oracle policy wrapped with taxonomy-class corruption at the given spec;
/// stateful and seeded, so rollouts are reproducible.
Policy noisy_policy(const NoiseSpec& spec, std::uint64_t noise_seed);

/// Run one episode: reset(task, seed), then policy/step until the goal
/// predicate holds or max_steps is exhausted. Emits the full trajectory with
/// per-step tokens, subgoal ids (the environment's oracle stage) and error
/// flags under the chosen labeling mode.
hier::Trajectory rollout(const TaskSpec& task, std::uint64_t seed,
                         LabelMode mode, const Policy& policy,
                         int max_steps_override = -1);

}  // namespace trajlab::grid
