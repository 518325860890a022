#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "trajlab/control/plan.hpp"
#include "trajlab/grid/catalog.hpp"
#include "trajlab/grid/predicates.hpp"

namespace trajlab::grid {

enum class LabelMode { constraint, deviation };

const char* label_mode_name(LabelMode m);
LabelMode label_mode_from_name(const std::string& name);

struct ObjectInstance {
  bool present = false;
  Eigen::Vector2i pos{0, 0};
  bool open = false;   // meaningful for openable containers
  int inside = -1;     // containing object id, -1 when on the floor
  bool washed = false;
};

struct GridState {
  int n = 8;
  Eigen::Vector2i agent{0, 0};
  std::vector<ObjectInstance> objects;  // indexed by global object id
  int held = -1;
  int step_count = 0;

  /// Cell the object currently occupies: agent cell when held, its
  /// container's cell when contained, its own cell otherwise.
  Eigen::Vector2i effective_pos(int obj) const;
  bool adjacent(const Eigen::Vector2i& cell) const;
};

struct TaskSpec {
  int id = 0;
  std::string name;
  struct Placement {
    int object;
    Eigen::Vector2i pos;
    int inside = -1;
  };
  std::vector<Placement> placements;
  std::vector<int> distractors;  // floor objects whose position is seed-jittered
  Eigen::Vector2i agent_start{0, 0};
  std::vector<Predicate> goal;  // conjunction
  ctrl::SubgoalPlan plan;
  int max_steps = 60;
  std::vector<int> prompt_tokens;
};

/// Deterministic initial state for (task, seed); distractor floor positions
/// are the only seed-dependent part.
GridState reset(const TaskSpec& task, std::uint64_t seed);

bool goal_satisfied(const TaskSpec& task, const GridState& s);

/// One environment instance: applies precondition-checked actions, labels
/// each applied action under the chosen mode, and tracks the oracle's own
/// subgoal progression for deviation labeling.
class GridEnv {
 public:
  GridEnv(const TaskSpec& task, std::uint64_t seed, LabelMode mode);

  struct Outcome {
    int error_flag = 0;
    bool violated = false;  // precondition failure (constraint view)
    bool done = false;
  };

  /// Invalid actions are no-ops with a raised flag, never exceptions.
  Outcome apply(const GridAction& a);

  /// Scripted correct action for the current oracle subgoal.
  GridAction oracle_action_now() const;
  /// Same, for an arbitrary plan position (used by corruption processes).
  GridAction oracle_action_for(int subgoal_index) const;

  const GridState& state() const { return state_; }
  const TaskSpec& task() const { return *task_; }
  LabelMode mode() const { return mode_; }
  int oracle_subgoal_index() const { return oracle_index_; }
  bool done() const;

 private:
  const TaskSpec* task_;
  GridState state_;
  LabelMode mode_;
  int oracle_index_ = 0;

  void advance_oracle_index();
};

/// Precondition-checked transition; returns whether the action violated a
/// constraint (in which case the state is unchanged).
bool apply_action(GridState& s, const GridAction& a);

/// Deterministic shortest-path step toward adjacency with `target_cell`
/// (east/west preferred over north/south, lower token id on ties).
GridAction move_toward(const GridState& s, const Eigen::Vector2i& target_cell);

}  // namespace trajlab::grid
