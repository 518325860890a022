#pragma once

#include <vector>

#include "trajlab/grid/predicates.hpp"

namespace trajlab::ctrl {

struct Subgoal {
  int id = 0;
  std::vector<int> description_tokens;  // e.g. [word TAKE, word MILK]
  grid::Predicate done;
};

struct SubgoalPlan {
  std::vector<Subgoal> subgoals;
  int current_index = 0;

  bool at_last() const {
    return current_index + 1 >= static_cast<int>(subgoals.size());
  }
};

/// Scripted decomposition: the hand-authored plan registered for the task.
/// Throws DegenerateInputError for an unknown task id.
SubgoalPlan decompose_task(int task_id);

}  // namespace trajlab::ctrl
