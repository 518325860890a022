#pragma once

#include <vector>

#include "trajlab/grid/world.hpp"

namespace trajlab::grid {

/// The six shipped household tasks. Layouts, plans and prompts are fixed;
/// only distractor floor positions vary with the reset seed.
const std::vector<TaskSpec>& task_registry();

/// Throws DegenerateInputError for an unknown id.
const TaskSpec& find_task(int task_id);

}  // namespace trajlab::grid
