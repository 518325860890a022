#include "trajlab/grid/tasks.hpp"

#include "trajlab/core/errors.hpp"

namespace trajlab::grid {

namespace {

using ctrl::Subgoal;
using ctrl::SubgoalPlan;

Subgoal reach(int id, int obj) {
  const auto& v = domain_vocab();
  return {id,
          {v.word_verb(WordVerb::reach), v.word_object(obj)},
          {PredKind::agent_adjacent, obj, -1}};
}
Subgoal open_sg(int id, int obj) {
  const auto& v = domain_vocab();
  return {id,
          {v.word_verb(WordVerb::open), v.word_object(obj)},
          {PredKind::is_open, obj, -1}};
}
Subgoal close_sg(int id, int obj) {
  const auto& v = domain_vocab();
  return {id,
          {v.word_verb(WordVerb::close), v.word_object(obj)},
          {PredKind::is_closed, obj, -1}};
}
Subgoal take(int id, int obj) {
  const auto& v = domain_vocab();
  return {id,
          {v.word_verb(WordVerb::take), v.word_object(obj)},
          {PredKind::holding, obj, -1}};
}
Subgoal put(int id, int obj, int container) {
  const auto& v = domain_vocab();
  return {id,
          {v.word_verb(WordVerb::put), v.word_object(obj), v.word_object(container)},
          {PredKind::contained_in, obj, container}};
}

TaskSpec finish(TaskSpec t, std::vector<Subgoal> subgoals) {
  t.plan.subgoals = std::move(subgoals);
  t.plan.current_index = 0;
  for (const Subgoal& sg : t.plan.subgoals) {
    t.prompt_tokens.insert(t.prompt_tokens.end(), sg.description_tokens.begin(),
                           sg.description_tokens.end());
  }
  return t;
}

std::vector<TaskSpec> build_tasks() {
  std::vector<TaskSpec> tasks;

  {
    // Classic fridge-milk errand.
    TaskSpec t;
    t.id = 1;
    t.name = "fridge_milk";
    t.agent_start = {1, 1};
    t.placements = {{kFridge, {6, 2}}, {kMilk, {6, 2}, kFridge},
                    {kJuice, {6, 2}, kFridge}};
    t.distractors = {kApple};
    t.goal = {{PredKind::holding, kMilk, -1}, {PredKind::is_closed, kFridge, -1}};
    tasks.push_back(finish(std::move(t),
                           {reach(0, kFridge), open_sg(1, kFridge), take(2, kMilk),
                            close_sg(3, kFridge)}));
  }
  {
    // Two pick-place dependencies: milk and apple both end up on the table.
    TaskSpec t;
    t.id = 2;
    t.name = "fridge_pantry";
    t.agent_start = {0, 0};
    t.placements = {{kFridge, {6, 2}},  {kMilk, {6, 2}, kFridge},
                    {kJuice, {6, 2}, kFridge}, {kCupboard, {1, 6}},
                    {kApple, {1, 6}, kCupboard}, {kBread, {1, 6}, kCupboard},
                    {kTable, {4, 4}}};
    t.goal = {{PredKind::contained_in, kMilk, kTable},
              {PredKind::contained_in, kApple, kTable}};
    tasks.push_back(finish(std::move(t),
                           {reach(0, kFridge), open_sg(1, kFridge), take(2, kMilk),
                            put(3, kMilk, kTable), reach(4, kCupboard),
                            open_sg(5, kCupboard), take(6, kApple),
                            put(7, kApple, kTable)}));
  }
  {
    // Two deliveries: plate to the sink, cup onto the shelf.
    TaskSpec t;
    t.id = 3;
    t.name = "dish_pair";
    t.agent_start = {0, 0};
    t.placements = {{kPlate, {2, 3}}, {kCup, {5, 1}}, {kSink, {7, 7}},
                    {kShelf, {0, 7}}};
    t.distractors = {kBread};
    t.goal = {{PredKind::contained_in, kPlate, kSink},
              {PredKind::contained_in, kCup, kShelf}};
    tasks.push_back(finish(std::move(t),
                           {take(0, kPlate), put(1, kPlate, kSink), take(2, kCup),
                            open_sg(3, kShelf), put(4, kCup, kShelf)}));
  }
  {
    // Order-sensitive: the rack only accepts washed items.
    TaskSpec t;
    t.id = 4;
    t.name = "wash_dry";
    t.agent_start = {0, 0};
    t.placements = {{kPlate, {2, 2}}, {kSink, {5, 5}}, {kRack, {6, 6}}};
    t.distractors = {kCup, kApple};
    t.goal = {{PredKind::contained_in, kPlate, kRack}};
    tasks.push_back(finish(std::move(t),
                           {take(0, kPlate), put(1, kPlate, kSink), take(2, kPlate),
                            put(3, kPlate, kRack)}));
  }
  {
    // Long haul across the grid and back.
    TaskSpec t;
    t.id = 5;
    t.name = "far_fetch";
    t.agent_start = {0, 0};
    t.placements = {{kBread, {7, 7}}, {kTable, {1, 0}}};
    t.distractors = {kApple, kJuice};
    t.goal = {{PredKind::contained_in, kBread, kTable}};
    tasks.push_back(finish(std::move(t), {reach(0, kBread), take(1, kBread),
                                          put(2, kBread, kTable)}));
  }
  {
    // Fetch from a far closed shelf, deliver to the opposite corner.
    TaskSpec t;
    t.id = 6;
    t.name = "shelf_run";
    t.agent_start = {3, 3};
    t.placements = {{kShelf, {7, 0}}, {kCup, {7, 0}, kShelf}, {kSink, {0, 7}}};
    t.distractors = {kPlate, kMilk};
    t.goal = {{PredKind::contained_in, kCup, kSink}};
    tasks.push_back(finish(std::move(t),
                           {reach(0, kShelf), open_sg(1, kShelf), take(2, kCup),
                            put(3, kCup, kSink)}));
  }
  return tasks;
}

}  // namespace

const std::vector<TaskSpec>& task_registry() {
  static const std::vector<TaskSpec> tasks = build_tasks();
  return tasks;
}

const TaskSpec& find_task(int task_id) {
  for (const TaskSpec& t : task_registry()) {
    if (t.id == task_id) return t;
  }
  throw DegenerateInputError("find_task: unknown task id " + std::to_string(task_id));
}

}  // namespace trajlab::grid
