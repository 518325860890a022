#include "trajlab/grid/world.hpp"

#include <cmath>

#include "trajlab/core/errors.hpp"
#include "trajlab/core/rng.hpp"

namespace trajlab::grid {

const char* label_mode_name(LabelMode m) {
  return m == LabelMode::constraint ? "constraint" : "deviation";
}

LabelMode label_mode_from_name(const std::string& name) {
  if (name == "constraint") return LabelMode::constraint;
  if (name == "deviation") return LabelMode::deviation;
  throw DataError("unknown label mode: " + name);
}

Eigen::Vector2i GridState::effective_pos(int obj) const {
  if (obj == held) return agent;
  const ObjectInstance& o = objects[static_cast<std::size_t>(obj)];
  if (o.inside >= 0) return objects[static_cast<std::size_t>(o.inside)].pos;
  return o.pos;
}

bool GridState::adjacent(const Eigen::Vector2i& cell) const {
  return (agent - cell).cwiseAbs().sum() <= 1;
}

bool eval_predicate(const Predicate& p, const GridState& s) {
  switch (p.kind) {
    case PredKind::agent_adjacent:
      return s.adjacent(s.effective_pos(p.object));
    case PredKind::is_open:
      return s.objects[static_cast<std::size_t>(p.object)].open;
    case PredKind::is_closed:
      return !s.objects[static_cast<std::size_t>(p.object)].open;
    case PredKind::holding:
      return s.held == p.object;
    case PredKind::contained_in:
      return s.objects[static_cast<std::size_t>(p.object)].inside == p.container;
  }
  return false;
}

GridState reset(const TaskSpec& task, std::uint64_t seed) {
  GridState s;
  s.n = 8;
  s.agent = task.agent_start;
  s.objects.assign(kObjectCount, ObjectInstance{});
  for (const auto& pl : task.placements) {
    ObjectInstance& o = s.objects[static_cast<std::size_t>(pl.object)];
    o.present = true;
    o.pos = pl.pos;
    o.inside = pl.inside;
    o.open = false;
    o.washed = false;
  }
  // Distractors land on a seed-chosen free cell away from furniture.
  Rng rng(seed);
  for (int obj : task.distractors) {
    ObjectInstance& o = s.objects[static_cast<std::size_t>(obj)];
    for (int tries = 0; tries < 64; ++tries) {
      Eigen::Vector2i cell(static_cast<int>(rng.uniform_int(8)),
                           static_cast<int>(rng.uniform_int(8)));
      bool clash = cell == task.agent_start;
      for (const auto& pl : task.placements) clash = clash || cell == pl.pos;
      if (!clash) {
        o.present = true;
        o.pos = cell;
        o.inside = -1;
        break;
      }
    }
  }
  return s;
}

bool goal_satisfied(const TaskSpec& task, const GridState& s) {
  for (const Predicate& p : task.goal) {
    if (!eval_predicate(p, s)) return false;
  }
  return true;
}

bool apply_action(GridState& s, const GridAction& a) {
  auto in_bounds = [&](const Eigen::Vector2i& c) {
    return c.x() >= 0 && c.x() < s.n && c.y() >= 0 && c.y() < s.n;
  };
  auto obj_ok = [&](int obj) {
    return obj >= 0 && obj < kObjectCount &&
           s.objects[static_cast<std::size_t>(obj)].present;
  };

  switch (a.verb) {
    case Verb::noop:
      return false;
    case Verb::move_n:
    case Verb::move_e:
    case Verb::move_s:
    case Verb::move_w: {
      Eigen::Vector2i next = s.agent;
      if (a.verb == Verb::move_n) next.y() -= 1;
      if (a.verb == Verb::move_s) next.y() += 1;
      if (a.verb == Verb::move_e) next.x() += 1;
      if (a.verb == Verb::move_w) next.x() -= 1;
      if (!in_bounds(next)) return true;
      s.agent = next;
      return false;
    }
    case Verb::open:
    case Verb::close: {
      if (!obj_ok(a.object) || !object_kind(a.object).openable) return true;
      ObjectInstance& o = s.objects[static_cast<std::size_t>(a.object)];
      if (!s.adjacent(o.pos)) return true;
      const bool want_open = a.verb == Verb::open;
      if (o.open == want_open) return true;
      o.open = want_open;
      return false;
    }
    case Verb::pick: {
      if (!obj_ok(a.object) || !object_kind(a.object).portable) return true;
      if (s.held >= 0) return true;
      ObjectInstance& o = s.objects[static_cast<std::size_t>(a.object)];
      if (!s.adjacent(s.effective_pos(a.object))) return true;
      if (o.inside >= 0) {
        const ObjectInstance& c = s.objects[static_cast<std::size_t>(o.inside)];
        if (object_kind(o.inside).openable && !c.open) return true;
      }
      o.inside = -1;
      s.held = a.object;
      return false;
    }
    case Verb::place: {
      if (!obj_ok(a.object) || !object_kind(a.object).receptacle) return true;
      if (s.held < 0) return true;
      ObjectInstance& target = s.objects[static_cast<std::size_t>(a.object)];
      if (!s.adjacent(target.pos)) return true;
      if (object_kind(a.object).openable && !target.open) return true;
      ObjectInstance& item = s.objects[static_cast<std::size_t>(s.held)];
      if (a.object == kRack && !item.washed) return true;  // dry only after wash
      item.inside = a.object;
      item.pos = target.pos;
      if (a.object == kSink) item.washed = true;
      s.held = -1;
      return false;
    }
  }
  return true;
}

GridAction move_toward(const GridState& s, const Eigen::Vector2i& target_cell) {
  const int dx = target_cell.x() - s.agent.x();
  const int dy = target_cell.y() - s.agent.y();
  if (std::abs(dx) >= std::abs(dy) && dx != 0) {
    return {dx > 0 ? Verb::move_e : Verb::move_w, -1};
  }
  if (dy != 0) return {dy > 0 ? Verb::move_s : Verb::move_n, -1};
  if (dx != 0) return {dx > 0 ? Verb::move_e : Verb::move_w, -1};
  return {Verb::noop, -1};
}

GridEnv::GridEnv(const TaskSpec& task, std::uint64_t seed, LabelMode mode)
    : task_(&task), state_(reset(task, seed)), mode_(mode) {
  advance_oracle_index();
}

void GridEnv::advance_oracle_index() {
  const auto& subgoals = task_->plan.subgoals;
  while (oracle_index_ < static_cast<int>(subgoals.size()) &&
         eval_predicate(subgoals[static_cast<std::size_t>(oracle_index_)].done,
                        state_)) {
    ++oracle_index_;
  }
}

GridAction GridEnv::oracle_action_for(int subgoal_index) const {
  const auto& subgoals = task_->plan.subgoals;
  if (subgoal_index >= static_cast<int>(subgoals.size())) {
    return {Verb::noop, -1};
  }
  const Predicate& goal = subgoals[static_cast<std::size_t>(subgoal_index)].done;
  const GridState& s = state_;
  if (eval_predicate(goal, s)) return {Verb::noop, -1};

  switch (goal.kind) {
    case PredKind::agent_adjacent:
      return move_toward(s, s.effective_pos(goal.object));
    case PredKind::is_open: {
      const auto& o = s.objects[static_cast<std::size_t>(goal.object)];
      if (!s.adjacent(o.pos)) return move_toward(s, o.pos);
      return {Verb::open, goal.object};
    }
    case PredKind::is_closed: {
      const auto& o = s.objects[static_cast<std::size_t>(goal.object)];
      if (!s.adjacent(o.pos)) return move_toward(s, o.pos);
      return {Verb::close, goal.object};
    }
    case PredKind::holding: {
      const Eigen::Vector2i cell = s.effective_pos(goal.object);
      if (!s.adjacent(cell)) return move_toward(s, cell);
      const auto& o = s.objects[static_cast<std::size_t>(goal.object)];
      if (o.inside >= 0 && object_kind(o.inside).openable &&
          !s.objects[static_cast<std::size_t>(o.inside)].open) {
        return {Verb::open, o.inside};
      }
      return {Verb::pick, goal.object};
    }
    case PredKind::contained_in: {
      if (s.held != goal.object) {
        // Acquire the item first (plans normally order this explicitly).
        const Eigen::Vector2i cell = s.effective_pos(goal.object);
        if (!s.adjacent(cell)) return move_toward(s, cell);
        const auto& o = s.objects[static_cast<std::size_t>(goal.object)];
        if (o.inside >= 0 && object_kind(o.inside).openable &&
            !s.objects[static_cast<std::size_t>(o.inside)].open) {
          return {Verb::open, o.inside};
        }
        return {Verb::pick, goal.object};
      }
      const auto& target = s.objects[static_cast<std::size_t>(goal.container)];
      if (!s.adjacent(target.pos)) return move_toward(s, target.pos);
      if (object_kind(goal.container).openable && !target.open) {
        return {Verb::open, goal.container};
      }
      return {Verb::place, goal.container};
    }
  }
  return {Verb::noop, -1};
}

GridAction GridEnv::oracle_action_now() const {
  return oracle_action_for(oracle_index_);
}

GridEnv::Outcome GridEnv::apply(const GridAction& a) {
  Outcome out;
  const GridAction oracle = oracle_action_now();
  out.violated = apply_action(state_, a);
  if (mode_ == LabelMode::constraint) {
    out.error_flag = out.violated ? 1 : 0;
  } else {
    out.error_flag = (a == oracle) ? 0 : 1;
  }
  state_.step_count += 1;
  advance_oracle_index();
  out.done = done();
  return out;
}

bool GridEnv::done() const {
  return goal_satisfied(*task_, state_) || state_.step_count >= task_->max_steps;
}

}  // namespace trajlab::grid
