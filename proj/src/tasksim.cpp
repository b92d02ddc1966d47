#include "enslsr/tasksim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>

#include "enslsr/rng.hpp"
#include "json.hpp"

namespace enslsr {

using nlohmann::json;

namespace {

struct Grid {
  int width;
  int height;
};

Grid grid_for(Task task) {
  return task == Task::Stacking ? Grid{3, 3} : Grid{4, 2};
}

bool in_grid(Task task, CellCoord c) {
  const Grid g = grid_for(task);
  return c.x >= 0 && c.x < g.width && c.y >= 0 && c.y < g.height;
}

// Harvesting: y = 0 is the vine row, y = 1 the box row.
bool is_box_cell(CellCoord c) { return c.y == 1; }

int object_at(const SystemState& s, CellCoord c) {
  for (int o = 0; o < kNumObjects; ++o)
    if (s.cells[o] == c) return o;
  return -1;
}

double jitter_amplitude(Task task) {
  return task == Task::Stacking ? 0.15 : 0.125;
}

// Core rule predicate; `picked` is the object being moved (already chosen).
bool valid_move(const SystemState& s, CellCoord pick, CellCoord rel) {
  if (!in_grid(s.task, pick) || !in_grid(s.task, rel)) return false;
  const int obj = object_at(s, pick);
  if (obj < 0) return false;
  if (rel == pick) return false;
  if (object_at(s, rel) >= 0) return false;  // only one object per cell
  if (s.task == Task::Stacking) {
    // A box can be picked only if the cell above is empty.
    const CellCoord above{pick.x, pick.y + 1};
    if (in_grid(s.task, above) && object_at(s, above) >= 0) return false;
    // Release needs ground or support below, evaluated after removal.
    if (rel.y > 0) {
      const CellCoord below{rel.x, rel.y - 1};
      if (below == pick) return false;  // support would be the moved box
      if (object_at(s, below) < 0) return false;
    }
  } else {
    // Bunches can only be placed inside the box.
    if (!is_box_cell(rel)) return false;
  }
  return true;
}

std::int64_t round_half_down(double v) {
  // Nearest integer, ties broken toward the lower index.
  return static_cast<std::int64_t>(std::ceil(v - 0.5));
}

}  // namespace

std::string task_name(Task task) {
  return task == Task::Stacking ? "stacking" : "harvesting";
}

Task task_from_name(const std::string& name) {
  if (name == "stacking") return Task::Stacking;
  if (name == "harvesting") return Task::Harvesting;
  throw std::runtime_error("unknown task: " + name);
}

std::string canonical_state(const SystemState& s) {
  std::string out = s.task == Task::Stacking ? "S" : "H";
  for (int o = 0; o < kNumObjects; ++o) {
    out += '|';
    out += std::to_string(s.cells[o].x);
    out += ',';
    out += std::to_string(s.cells[o].y);
  }
  return out;
}

bool is_valid_state(const SystemState& s) {
  for (int o = 0; o < kNumObjects; ++o) {
    if (!in_grid(s.task, s.cells[o])) return false;
    for (int p = o + 1; p < kNumObjects; ++p)
      if (s.cells[o] == s.cells[p]) return false;
  }
  if (s.task == Task::Stacking) {
    // Boxes cannot float.
    for (int o = 0; o < kNumObjects; ++o) {
      const CellCoord c = s.cells[o];
      if (c.y > 0 && object_at(s, {c.x, c.y - 1}) < 0) return false;
    }
  }
  return true;
}

std::pair<CellCoord, CellCoord> snap_action(const Action& a) {
  return {CellCoord{static_cast<int>(round_half_down(a.pick.x)),
                    static_cast<int>(round_half_down(a.pick.y))},
          CellCoord{static_cast<int>(round_half_down(a.release.x)),
                    static_cast<int>(round_half_down(a.release.y))}};
}

std::vector<Action> valid_actions(const SystemState& s) {
  std::vector<Action> out;
  const Grid g = grid_for(s.task);
  for (int o = 0; o < kNumObjects; ++o) {
    const CellCoord pick = s.cells[o];
    for (int ry = 0; ry < g.height; ++ry) {
      for (int rx = 0; rx < g.width; ++rx) {
        const CellCoord rel{rx, ry};
        if (valid_move(s, pick, rel))
          out.push_back({cell_center(pick), cell_center(rel)});
      }
    }
  }
  return out;
}

SystemState apply_action(const SystemState& s, const Action& a) {
  const auto [pick, rel] = snap_action(a);
  if (!valid_move(s, pick, rel))
    throw InvalidAction("move from (" + std::to_string(pick.x) + "," +
                        std::to_string(pick.y) + ") to (" +
                        std::to_string(rel.x) + "," + std::to_string(rel.y) +
                        ") violates the task rules");
  SystemState next = s;
  next.cells[object_at(s, pick)] = rel;
  return next;
}

const std::vector<SystemState>& enumerate_states(Task task) {
  static std::vector<SystemState> stacking_states;
  static std::vector<SystemState> harvesting_states;
  auto& cache = task == Task::Stacking ? stacking_states : harvesting_states;
  if (!cache.empty()) return cache;

  const Grid g = grid_for(task);
  std::vector<CellCoord> cells;
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) cells.push_back({x, y});

  const int n = static_cast<int>(cells.size());
  std::array<int, kNumObjects> idx{};
  // All assignments of the four distinct objects to distinct cells.
  for (idx[0] = 0; idx[0] < n; ++idx[0])
    for (idx[1] = 0; idx[1] < n; ++idx[1])
      for (idx[2] = 0; idx[2] < n; ++idx[2])
        for (idx[3] = 0; idx[3] < n; ++idx[3]) {
          SystemState s;
          s.task = task;
          for (int o = 0; o < kNumObjects; ++o) s.cells[o] = cells[idx[o]];
          if (is_valid_state(s)) cache.push_back(s);
        }
  return cache;
}

std::optional<std::vector<Action>> bfs_plan(const SystemState& start,
                                            const SystemState& goal) {
  if (start == goal) return std::vector<Action>{};
  std::map<std::string, std::pair<std::string, Action>> parent;
  std::queue<SystemState> frontier;
  frontier.push(start);
  parent[canonical_state(start)] = {"", Action{}};
  const std::string goal_key = canonical_state(goal);
  while (!frontier.empty()) {
    const SystemState cur = frontier.front();
    frontier.pop();
    const std::string cur_key = canonical_state(cur);
    for (const Action& a : valid_actions(cur)) {
      const SystemState next = apply_action(cur, a);
      const std::string key = canonical_state(next);
      if (parent.contains(key)) continue;
      parent[key] = {cur_key, a};
      if (key == goal_key) {
        std::vector<Action> plan;
        std::string k = key;
        while (k != canonical_state(start)) {
          plan.push_back(parent[k].second);
          k = parent[k].first;
        }
        std::reverse(plan.begin(), plan.end());
        return plan;
      }
      frontier.push(next);
    }
  }
  return std::nullopt;
}

bool verify_actions(const Observation& start, const Observation& goal,
                    std::span<const Action> actions) {
  SystemState cur = start.state;
  for (const Action& a : actions) {
    try {
      cur = apply_action(cur, a);
    } catch (const InvalidAction&) {
      return false;
    }
  }
  return cur == goal.state;
}

Observation make_observation(const SystemState& s, std::int64_t index,
                             std::uint64_t nuisance_seed) {
  Observation obs;
  obs.index = index;
  obs.state = s;
  Rng rng(nuisance_seed);
  const double amp = jitter_amplitude(s.task);
  for (int o = 0; o < kNumObjects; ++o) {
    obs.nuisance.jitter[o].x = rng.next_real(-amp, amp);
    obs.nuisance.jitter[o].y = rng.next_real(-amp, amp);
  }
  obs.nuisance.lighting = rng.next_real();
  if (s.task == Task::Harvesting) {
    for (int o = 0; o < kNumObjects; ++o) {
      obs.nuisance.scale[o] = rng.next_real(0.9, 1.1);
      obs.nuisance.orientation[o] = rng.next_real(-180.0, 180.0);
      obs.nuisance.variant[o] = rng.next_bernoulli(0.5) ? 1 : 0;
    }
  } else {
    for (int o = 0; o < kNumObjects; ++o) {
      obs.nuisance.scale[o] = 1.0;
      obs.nuisance.orientation[o] = 0.0;
      obs.nuisance.variant[o] = 0;
    }
  }
  return obs;
}

std::vector<TransitionTuple> generate_dataset(const DatasetConfig& cfg) {
  if (cfg.n_tuples <= 0) throw std::runtime_error("n_tuples must be > 0");
  if (cfg.frac_no_action < 0.0 || cfg.frac_no_action >= 1.0)
    throw std::runtime_error("frac_no_action must be in [0, 1)");

  const auto& states = enumerate_states(cfg.task);
  Rng rng(hash_combine(cfg.seed, cfg.task == Task::Stacking ? 1 : 2));

  std::vector<TransitionTuple> out;
  out.reserve(cfg.n_tuples);
  std::int64_t next_index = 0;

  auto fresh = [&](const SystemState& s) {
    return make_observation(s, next_index++, rng.next_u64());
  };

  SystemState cur_state = states[rng.next_below(states.size())];
  Observation cur_obs = fresh(cur_state);
  int steps = 0;

  while (static_cast<int>(out.size()) < cfg.n_tuples) {
    if (rng.next_bernoulli(cfg.frac_no_action)) {
      Observation obs2 = fresh(cur_state);
      out.push_back({cur_obs, obs2, ActionInfo{false, {}}});
      cur_obs = obs2;
      continue;
    }
    std::vector<Action> acts = valid_actions(cur_state);
    if (acts.empty() || steps >= cfg.walk_length) {
      cur_state = states[rng.next_below(states.size())];
      cur_obs = fresh(cur_state);
      steps = 0;
      acts = valid_actions(cur_state);
      if (acts.empty()) continue;
    }
    const Action act = acts[rng.next_below(acts.size())];
    const SystemState next_state = apply_action(cur_state, act);
    Observation obs2 = fresh(next_state);

    // Record the action at the noisy object positions so that edge
    // averaging denoises toward the cell centers.
    const auto [pick_cell, rel_cell] = snap_action(act);
    const int obj = object_at(cur_state, pick_cell);
    Action noisy = act;
    noisy.pick.x += cur_obs.nuisance.jitter[obj].x;
    noisy.pick.y += cur_obs.nuisance.jitter[obj].y;
    noisy.release.x += obs2.nuisance.jitter[obj].x;
    noisy.release.y += obs2.nuisance.jitter[obj].y;

    out.push_back({cur_obs, obs2, ActionInfo{true, noisy}});
    cur_state = next_state;
    cur_obs = obs2;
    ++steps;
  }
  return out;
}

std::pair<Observation, Observation> sample_eval_pair(Task task,
                                                     std::uint64_t seed,
                                                     std::int64_t index_base) {
  const auto& states = enumerate_states(task);
  Rng rng(hash_combine(seed, task == Task::Stacking ? 11 : 12));
  for (;;) {
    const SystemState& start = states[rng.next_below(states.size())];
    const SystemState& goal = states[rng.next_below(states.size())];
    if (start == goal) continue;
    if (!bfs_plan(start, goal).has_value()) continue;
    Observation so = make_observation(start, index_base, rng.next_u64());
    Observation go = make_observation(goal, index_base + 1, rng.next_u64());
    return {so, go};
  }
}

namespace {

json state_to_json(const SystemState& s) {
  json arr = json::array();
  for (int o = 0; o < kNumObjects; ++o)
    arr.push_back({s.cells[o].x, s.cells[o].y});
  return arr;
}

SystemState state_from_json(Task task, const json& arr) {
  SystemState s;
  s.task = task;
  for (int o = 0; o < kNumObjects; ++o)
    s.cells[o] = {arr.at(o).at(0).get<int>(), arr.at(o).at(1).get<int>()};
  return s;
}

json nuisance_to_json(const Nuisance& n) {
  json j;
  json jit = json::array();
  for (const Vec2& v : n.jitter) jit.push_back({v.x, v.y});
  j["jitter"] = jit;
  j["lighting"] = n.lighting;
  j["scale"] = n.scale;
  j["orientation"] = n.orientation;
  j["variant"] = n.variant;
  return j;
}

Nuisance nuisance_from_json(const json& j) {
  Nuisance n;
  for (int o = 0; o < kNumObjects; ++o) {
    n.jitter[o] = {j.at("jitter").at(o).at(0).get<double>(),
                   j.at("jitter").at(o).at(1).get<double>()};
    n.scale[o] = j.at("scale").at(o).get<double>();
    n.orientation[o] = j.at("orientation").at(o).get<double>();
    n.variant[o] = j.at("variant").at(o).get<std::uint8_t>();
  }
  n.lighting = j.at("lighting").get<double>();
  return n;
}

}  // namespace

void write_dataset(std::ostream& os, const DatasetConfig& cfg,
                   const std::vector<TransitionTuple>& tuples) {
  json header;
  header["task"] = task_name(cfg.task);
  header["seed"] = cfg.seed;
  header["n_tuples"] = tuples.size();
  header["format_version"] = 1;
  os << header.dump() << '\n';
  for (const TransitionTuple& t : tuples) {
    json rec;
    rec["i_index"] = t.first.index;
    rec["j_index"] = t.second.index;
    rec["i_state"] = state_to_json(t.first.state);
    rec["j_state"] = state_to_json(t.second.state);
    rec["i_nuisance"] = nuisance_to_json(t.first.nuisance);
    rec["j_nuisance"] = nuisance_to_json(t.second.nuisance);
    rec["a"] = t.rho.has_action ? 1 : 0;
    rec["u"] = {t.rho.u.pick.x, t.rho.u.pick.y, t.rho.u.release.x,
                t.rho.u.release.y};
    os << rec.dump() << '\n';
  }
}

std::vector<TransitionTuple> read_dataset(std::istream& is,
                                          DatasetConfig* cfg_out) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("dataset file is empty");
  const json header = json::parse(line);
  if (header.at("format_version").get<int>() != 1)
    throw std::runtime_error("unsupported dataset format_version");
  const Task task = task_from_name(header.at("task").get<std::string>());
  if (cfg_out) {
    cfg_out->task = task;
    cfg_out->seed = header.at("seed").get<std::uint64_t>();
    cfg_out->n_tuples = header.at("n_tuples").get<int>();
  }
  std::vector<TransitionTuple> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    TransitionTuple t;
    t.first.index = rec.at("i_index").get<std::int64_t>();
    t.second.index = rec.at("j_index").get<std::int64_t>();
    t.first.state = state_from_json(task, rec.at("i_state"));
    t.second.state = state_from_json(task, rec.at("j_state"));
    t.first.nuisance = nuisance_from_json(rec.at("i_nuisance"));
    t.second.nuisance = nuisance_from_json(rec.at("j_nuisance"));
    t.rho.has_action = rec.at("a").get<int>() == 1;
    const auto& u = rec.at("u");
    t.rho.u = {{u.at(0).get<double>(), u.at(1).get<double>()},
               {u.at(2).get<double>(), u.at(3).get<double>()}};
    out.push_back(std::move(t));
  }
  return out;
}

std::string observation_to_json(const Observation& obs) {
  json j;
  j["index"] = obs.index;
  j["task"] = task_name(obs.state.task);
  j["state"] = state_to_json(obs.state);
  j["nuisance"] = nuisance_to_json(obs.nuisance);
  return j.dump();
}

Observation observation_from_json(const std::string& text) {
  const json j = json::parse(text);
  Observation obs;
  obs.index = j.at("index").get<std::int64_t>();
  const Task task = task_from_name(j.at("task").get<std::string>());
  obs.state = state_from_json(task, j.at("state"));
  obs.nuisance = nuisance_from_json(j.at("nuisance"));
  return obs;
}

}  // namespace enslsr
