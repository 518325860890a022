#pragma once

#include <string>
#include <vector>

#include "trajlab/grid/world.hpp"
#include "trajlab/hier/trajectory.hpp"
#include "trajlab/metrics/epr_pac.hpp"

namespace trajlab::io {

/// Line-delimited log: one schema header line, then one flat record per step.
/// Field order is fixed so identical runs produce byte-identical files.
struct LogFile {
  grid::LabelMode mode = grid::LabelMode::deviation;
  std::vector<hier::Trajectory> trajectories;
};

void emit_log(const std::string& path, const LogFile& log);

/// Strict parse: malformed lines, duplicate (episode, t) pairs and gaps in t
/// raise DataError with the offending line number. Episodes come back
/// grouped and time-ordered; prompts are reattached from the task registry.
LogFile parse_log(const std::string& path);

/// Error-series view of a trajectory for the propagation diagnostics.
metrics::EpisodeErrors episode_errors_of(const hier::Trajectory& traj);

}  // namespace trajlab::io
