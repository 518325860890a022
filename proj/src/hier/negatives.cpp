#include "trajlab/hier/negatives.hpp"

#include <algorithm>

#include "trajlab/core/errors.hpp"

namespace trajlab::hier {

const char* failure_class_name(FailureClass c) {
  switch (c) {
    case FailureClass::ordering: return "ordering";
    case FailureClass::grounding: return "grounding";
    case FailureClass::premature: return "premature";
    case FailureClass::looping: return "looping";
  }
  return "?";
}

namespace {

// Contiguous runs of equal subgoal_id: [first, last) step ranges.
std::vector<std::pair<int, int>> subgoal_blocks(const Trajectory& traj) {
  std::vector<std::pair<int, int>> blocks;
  const int n = static_cast<int>(traj.steps.size());
  int first = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || traj.steps[i].subgoal_id != traj.steps[first].subgoal_id) {
      blocks.emplace_back(first, i);
      first = i;
    }
  }
  return blocks;
}

void renumber_steps(Trajectory& traj) {
  for (int i = 0; i < static_cast<int>(traj.steps.size()); ++i) {
    traj.steps[i].t = i;
  }
}

bool same_token_stream(const Trajectory& a, const Trajectory& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].action != b.steps[i].action) return false;
    if (a.steps[i].state_tokens != b.steps[i].state_tokens) return false;
  }
  return true;
}

Trajectory corrupt_ordering(const Trajectory& traj, Rng& rng) {
  Trajectory out = traj;
  const auto blocks = subgoal_blocks(traj);
  if (blocks.size() >= 2) {
    // Swap a block with its successor; dependent order by construction.
    const auto bi = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::uint64_t>(blocks.size() - 1)));
    const auto [a0, a1] = blocks[bi];
    const auto [b0, b1] = blocks[bi + 1];
    out.steps.clear();
    out.steps.insert(out.steps.end(), traj.steps.begin(), traj.steps.begin() + a0);
    out.steps.insert(out.steps.end(), traj.steps.begin() + b0, traj.steps.begin() + b1);
    out.steps.insert(out.steps.end(), traj.steps.begin() + a0, traj.steps.begin() + a1);
    out.steps.insert(out.steps.end(), traj.steps.begin() + b1, traj.steps.end());
  } else {
    // Single block: degenerate ordering error, swap two distinct steps.
    const int n = static_cast<int>(out.steps.size());
    const int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
    std::swap(out.steps[i], out.steps[i + 1]);
  }
  renumber_steps(out);
  return out;
}

Trajectory corrupt_grounding(const Trajectory& traj, const TokenCatalog& catalog,
                             Rng& rng) {
  Trajectory out = traj;
  // Candidate steps whose action token has a same-category distractor.
  std::vector<int> candidates;
  for (int i = 0; i < static_cast<int>(out.steps.size()); ++i) {
    if (!catalog.grounding_alternatives(out.steps[i].action).empty()) {
      candidates.push_back(i);
    }
  }
  if (candidates.empty()) {
    // No groundable action in this segment; fall back to an ordering slip.
    return corrupt_ordering(traj, rng);
  }
  const int step = candidates[static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::uint64_t>(candidates.size())))];
  const auto alts = catalog.grounding_alternatives(out.steps[step].action);
  out.steps[step].action = alts[static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::uint64_t>(alts.size())))];
  return out;
}

Trajectory corrupt_premature(const Trajectory& traj, Rng& rng) {
  Trajectory out = traj;
  const auto blocks = subgoal_blocks(traj);
  int cut;
  if (blocks.size() >= 2) {
    cut = blocks.back().first;  // stop before the final subgoal begins
  } else {
    const int n = static_cast<int>(traj.steps.size());
    cut = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
  }
  out.steps.resize(static_cast<std::size_t>(cut));
  renumber_steps(out);
  return out;
}

Trajectory corrupt_looping(const Trajectory& traj, Rng& rng) {
  Trajectory out = traj;
  const auto blocks = subgoal_blocks(traj);
  // Duplicate a completed block (any but the last) right after itself, or a
  // single step when there is only one block.
  int b0;
  int b1;
  if (blocks.size() >= 2) {
    const auto bi = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::uint64_t>(blocks.size() - 1)));
    b0 = blocks[bi].first;
    b1 = blocks[bi].second;
  } else {
    const int n = static_cast<int>(traj.steps.size());
    b0 = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    b1 = b0 + 1;
  }
  std::vector<StepRecord> dup(traj.steps.begin() + b0, traj.steps.begin() + b1);
  out.steps.insert(out.steps.begin() + b1, dup.begin(), dup.end());
  renumber_steps(out);
  return out;
}

}  // namespace

Trajectory corrupt_trajectory(const Trajectory& traj, FailureClass cls,
                              const TokenCatalog& catalog, Rng& rng) {
  if (traj.steps.size() < 2) {
    throw DegenerateInputError("corrupt_trajectory: trajectory too short to corrupt");
  }
  Trajectory out;
  switch (cls) {
    case FailureClass::ordering: out = corrupt_ordering(traj, rng); break;
    case FailureClass::grounding: out = corrupt_grounding(traj, catalog, rng); break;
    case FailureClass::premature: out = corrupt_premature(traj, rng); break;
    case FailureClass::looping: out = corrupt_looping(traj, rng); break;
  }
  if (same_token_stream(out, traj)) {
    // Content-identical corruption (e.g. swapped twin steps); force a
    // visible difference by dropping the final step.
    out.steps.pop_back();
    if (out.steps.empty()) out.steps.push_back(traj.steps.front());
  }
  return out;
}

std::vector<SegmentCollection> generate_negatives(const Trajectory& traj,
                                                  Level level, int k,
                                                  int window_len, int stride,
                                                  const TokenCatalog& catalog,
                                                  Rng& rng) {
  if (k < 1) throw DegenerateInputError("generate_negatives: k must be >= 1");
  std::vector<SegmentCollection> negs;
  negs.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto cls = static_cast<FailureClass>(rng.uniform_int(4));
    const Trajectory corrupted = corrupt_trajectory(traj, cls, catalog, rng);
    negs.push_back(window_segments(corrupted, level, window_len, stride));
  }
  return negs;
}

}  // namespace trajlab::hier
