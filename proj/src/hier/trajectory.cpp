#include "trajlab/hier/trajectory.hpp"

#include "trajlab/core/errors.hpp"

namespace trajlab::hier {

const char* level_name(Level level) {
  switch (level) {
    case Level::action: return "action";
    case Level::subgoal: return "subgoal";
    case Level::trajectory: return "trajectory";
  }
  return "?";
}

namespace {

// Tokens of steps [first, first+len), padded with kPadToken when the range
// runs past the end of the episode.
std::vector<int> window_tokens(const Trajectory& traj, int first, int len) {
  std::vector<int> toks;
  const int tokens_per_step =
      static_cast<int>(traj.steps.front().state_tokens.size()) + 1;
  toks.reserve(static_cast<std::size_t>(len) * tokens_per_step);
  const int t_count = static_cast<int>(traj.steps.size());
  for (int s = first; s < first + len; ++s) {
    if (s < t_count) {
      const StepRecord& step = traj.steps[s];
      toks.insert(toks.end(), step.state_tokens.begin(), step.state_tokens.end());
      toks.push_back(step.action);
    } else {
      for (int k = 0; k < tokens_per_step; ++k) toks.push_back(kPadToken);
    }
  }
  return toks;
}

}  // namespace

SegmentCollection window_segments(const Trajectory& traj, Level level,
                                  int window_len, int stride) {
  if (traj.steps.empty()) {
    throw DegenerateInputError("window_segments: empty trajectory");
  }
  if (window_len < 1 || stride < 1) {
    throw DegenerateInputError("window_segments: window_len and stride must be >= 1");
  }
  const int t_count = static_cast<int>(traj.steps.size());

  SegmentCollection seg;
  seg.level = level;

  if (level == Level::trajectory) {
    seg.window_len = t_count;
    seg.stride = t_count;
    seg.windows.push_back(window_tokens(traj, 0, t_count));
    seg.start_steps.push_back(0);
    return seg;
  }

  seg.window_len = window_len;
  seg.stride = stride;

  int covered_end = 0;
  int start = 0;
  for (; start + window_len <= t_count; start += stride) {
    seg.windows.push_back(window_tokens(traj, start, window_len));
    seg.start_steps.push_back(start);
    covered_end = start + window_len;
  }
  if (seg.windows.empty() || covered_end < t_count) {
    // Tail window for steps no full window reached; padded and masked later.
    seg.windows.push_back(window_tokens(traj, start, window_len));
    seg.start_steps.push_back(start);
  }
  return seg;
}

}  // namespace trajlab::hier
