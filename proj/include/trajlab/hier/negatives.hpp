#pragma once

#include <vector>

#include "trajlab/core/rng.hpp"
#include "trajlab/hier/tokens.hpp"
#include "trajlab/hier/trajectory.hpp"

namespace trajlab::hier {

/// The four failure classes corruptions are drawn from.
enum class FailureClass { ordering = 0, grounding = 1, premature = 2, looping = 3 };

const char* failure_class_name(FailureClass c);

/// One corrupted copy of `traj` in the given class:
///  - ordering:  two dependent contiguous subgoal blocks swapped
///  - grounding: an object-bearing action replaced by a same-category distractor
///  - premature: steps from the final subgoal block onward dropped
///  - looping:   an already-completed action block duplicated in place
/// Guarantees the step/action token stream differs from the original.
/// Throws DegenerateInputError when the trajectory is too short to corrupt.
Trajectory corrupt_trajectory(const Trajectory& traj, FailureClass cls,
                              const TokenCatalog& catalog, Rng& rng);

/// k corrupted variants of the trajectory, each windowed at the given level
/// with the same parameters as the positive collection. Classes are drawn
/// uniformly; every returned collection differs from the positive in at
/// least one token.
std::vector<SegmentCollection> generate_negatives(const Trajectory& traj,
                                                  Level level, int k,
                                                  int window_len, int stride,
                                                  const TokenCatalog& catalog,
                                                  Rng& rng);

}  // namespace trajlab::hier
