#pragma once

#include <string>
#include <vector>

namespace trajlab::hier {

/// Reserved padding token id, masked out of every encoder mean.
inline constexpr int kPadToken = 0;

struct StepRecord {
  int t = 0;
  std::vector<int> state_tokens;
  int action = 0;
  int subgoal_id = 0;
  int error_flag = 0;
};

struct Trajectory {
  std::string episode_id;
  int task_id = 0;
  std::vector<StepRecord> steps;
  std::vector<int> prompt_tokens;
};

enum class Level { action, subgoal, trajectory };

const char* level_name(Level level);

/// Sliding-window slices of one trajectory at one hierarchy level. Window
/// tokens interleave each covered step's state tokens with its action token.
struct SegmentCollection {
  Level level = Level::action;
  std::vector<std::vector<int>> windows;
  std::vector<int> start_steps;  // first step index of each window
  int window_len = 0;            // in steps
  int stride = 0;                // in steps
};

/// Full windows start at every multiple of `stride` with start + len <= T;
/// if trailing steps remain uncovered, one PAD-padded tail window is added.
/// Level::trajectory always yields a single whole-episode window.
/// Throws DegenerateInputError on an empty trajectory.
SegmentCollection window_segments(const Trajectory& traj, Level level,
                                  int window_len, int stride);

}  // namespace trajlab::hier
