#pragma once

namespace trajlab::grid {

struct GridState;

enum class PredKind {
  agent_adjacent,  // agent within distance 1 of object's effective cell
  is_open,
  is_closed,
  holding,
  contained_in,
};

/// Environment-state completion check; stands in for language "completion
/// markers" as an exact, machine-checkable condition.
struct Predicate {
  PredKind kind = PredKind::agent_adjacent;
  int object = -1;
  int container = -1;  // only for contained_in
};

bool eval_predicate(const Predicate& p, const GridState& s);

}  // namespace trajlab::grid
