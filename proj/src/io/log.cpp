#include "trajlab/io/log.hpp"

#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "trajlab/core/errors.hpp"
#include "trajlab/grid/tasks.hpp"

namespace trajlab::io {

namespace {

constexpr int kSchemaVersion = 1;

using ordered_json = nlohmann::ordered_json;

}  // namespace

void emit_log(const std::string& path, const LogFile& log) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("emit_log: cannot open for writing: " + path);

  ordered_json header;
  header["schema"] = "trajlog";
  header["version"] = kSchemaVersion;
  header["label_mode"] = grid::label_mode_name(log.mode);
  os << header.dump() << '\n';

  for (const hier::Trajectory& traj : log.trajectories) {
    for (const hier::StepRecord& step : traj.steps) {
      ordered_json rec;
      rec["episode_id"] = traj.episode_id;
      rec["task_id"] = traj.task_id;
      rec["t"] = step.t;
      rec["state_tokens"] = step.state_tokens;
      rec["action"] = step.action;
      rec["subgoal_id"] = step.subgoal_id;
      rec["error_flag"] = step.error_flag;
      rec["mode"] = grid::label_mode_name(log.mode);
      os << rec.dump() << '\n';
    }
  }
  if (!os) throw DataError("emit_log: write failed: " + path);
}

LogFile parse_log(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("parse_log: cannot open: " + path);

  LogFile out;
  std::string line;
  int line_no = 0;

  auto fail = [&](const std::string& what) {
    throw DataError("parse_log: " + path + ":" + std::to_string(line_no) + ": " +
                    what);
  };

  if (!std::getline(is, line)) return out;  // empty file: empty list
  line_no = 1;
  ordered_json header;
  try {
    header = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("bad header: ") + e.what());
  }
  if (header.value("schema", "") != "trajlog" ||
      header.value("version", -1) != kSchemaVersion) {
    fail("unknown schema header");
  }
  out.mode = grid::label_mode_from_name(header.value("label_mode", ""));

  std::unordered_map<std::string, std::size_t> index_of;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json rec;
    try {
      rec = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("bad record: ") + e.what());
    }
    hier::StepRecord step;
    std::string episode_id;
    int task_id = 0;
    try {
      episode_id = rec.at("episode_id").get<std::string>();
      task_id = rec.at("task_id").get<int>();
      step.t = rec.at("t").get<int>();
      step.state_tokens = rec.at("state_tokens").get<std::vector<int>>();
      step.action = rec.at("action").get<int>();
      step.subgoal_id = rec.at("subgoal_id").get<int>();
      step.error_flag = rec.at("error_flag").get<int>();
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("missing or mistyped field: ") + e.what());
    }
    if (step.error_flag != 0 && step.error_flag != 1) {
      fail("error_flag must be 0 or 1");
    }

    auto it = index_of.find(episode_id);
    if (it == index_of.end()) {
      hier::Trajectory traj;
      traj.episode_id = episode_id;
      traj.task_id = task_id;
      traj.prompt_tokens = grid::find_task(task_id).prompt_tokens;
      index_of.emplace(episode_id, out.trajectories.size());
      out.trajectories.push_back(std::move(traj));
      it = index_of.find(episode_id);
    }
    hier::Trajectory& traj = out.trajectories[it->second];
    if (traj.task_id != task_id) fail("episode spans multiple task ids");
    const int expected = static_cast<int>(traj.steps.size());
    if (step.t < expected) fail("duplicate (episode, t)");
    if (step.t > expected) fail("gap in t");
    traj.steps.push_back(std::move(step));
  }
  return out;
}

metrics::EpisodeErrors episode_errors_of(const hier::Trajectory& traj) {
  metrics::EpisodeErrors ep;
  ep.episode_id = traj.episode_id;
  ep.task_id = traj.task_id;
  ep.flags.reserve(traj.steps.size());
  ep.subgoal_ids.reserve(traj.steps.size());
  for (const hier::StepRecord& step : traj.steps) {
    ep.flags.push_back(static_cast<std::uint8_t>(step.error_flag));
    ep.subgoal_ids.push_back(step.subgoal_id);
  }
  return ep;
}

}  // namespace trajlab::io
