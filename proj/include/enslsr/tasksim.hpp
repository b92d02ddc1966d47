#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Box stacking and grape harvesting task simulators: states, rules,
// pick-and-place action semantics, dataset generation and the ground-truth
// plan-correctness oracle. Everything here is pure and seed-deterministic.

namespace enslsr {

enum class Task { Stacking, Harvesting };

constexpr int kNumObjects = 4;

std::string task_name(Task task);
Task task_from_name(const std::string& name);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct CellCoord {
  int x = 0;
  int y = 0;  // row/level for stacking, 0 = vine / 1 = box for harvesting
  friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

// Cell centers sit at integer coordinates (x, y).
inline Vec2 cell_center(CellCoord c) {
  return {static_cast<double>(c.x), static_cast<double>(c.y)};
}

struct Action {
  Vec2 pick;
  Vec2 release;
};

struct ActionInfo {
  bool has_action = false;  // the binary indicator a
  Action u;                 // ignored when has_action is false
};

struct SystemState {
  Task task = Task::Stacking;
  std::array<CellCoord, kNumObjects> cells{};  // object id -> cell

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

// Canonical textual encoding, used as hashing key and for serialization.
std::string canonical_state(const SystemState& s);

bool is_valid_state(const SystemState& s);

struct Nuisance {
  std::array<Vec2, kNumObjects> jitter{};  // positional noise per object
  double lighting = 0.0;
  // Harvesting only:
  std::array<double, kNumObjects> scale{};
  std::array<double, kNumObjects> orientation{};
  std::array<std::uint8_t, kNumObjects> variant{};
};

struct Observation {
  std::int64_t index = 0;
  SystemState state;
  Nuisance nuisance;
};

struct TransitionTuple {
  Observation first;
  Observation second;
  ActionInfo rho;
};

class InvalidAction : public std::runtime_error {
 public:
  explicit InvalidAction(const std::string& what) : std::runtime_error(what) {}
};

// Snapped pick/release cells: nearest cell center, ties toward lower index.
std::pair<CellCoord, CellCoord> snap_action(const Action& a);

// Discrete cell-center actions permitted by the task rules, in a fixed
// deterministic order.
std::vector<Action> valid_actions(const SystemState& s);

// Moves one object according to the snapped action. Throws InvalidAction if
// the snapped action is not permitted.
SystemState apply_action(const SystemState& s, const Action& a);

// All states satisfying the task invariants (288 for stacking, 1680 for
// harvesting), in canonical order. Cached per task.
const std::vector<SystemState>& enumerate_states(Task task);

// Breadth-first search over ground-truth states; returns a shortest action
// sequence, or nullopt when the goal is unreachable.
std::optional<std::vector<Action>> bfs_plan(const SystemState& start,
                                            const SystemState& goal);

// True iff replaying `actions` from start.state is valid at every step and
// ends in goal.state. A zero-length sequence is true iff the states match.
bool verify_actions(const Observation& start, const Observation& goal,
                    std::span<const Action> actions);

struct DatasetConfig {
  Task task = Task::Stacking;
  int n_tuples = 2500;
  double frac_no_action = 0.2;
  std::uint64_t seed = 0;
  int walk_length = 10;  // actions per random walk before restarting
};

// Random-walk dataset; deterministic in the config. Observation indices are
// consecutive 0..N-1 in emission order.
std::vector<TransitionTuple> generate_dataset(const DatasetConfig& cfg);

// Fresh observation of a given state with seeded nuisance factors.
Observation make_observation(const SystemState& s, std::int64_t index,
                             std::uint64_t nuisance_seed);

// Start/goal observations with distinct states, feasibility-certified by
// BFS over ground-truth states. Holdout indices start at `index_base`
// (default 10^6, disjoint from any training dataset).
std::pair<Observation, Observation> sample_eval_pair(
    Task task, std::uint64_t seed, std::int64_t index_base = 1000000);

// Dataset persistence: header line then one record per tuple (JSON lines).
void write_dataset(std::ostream& os, const DatasetConfig& cfg,
                   const std::vector<TransitionTuple>& tuples);
std::vector<TransitionTuple> read_dataset(std::istream& is,
                                          DatasetConfig* cfg_out = nullptr);

// Observation (de)serialization for start/goal files.
std::string observation_to_json(const Observation& obs);
Observation observation_from_json(const std::string& text);

}  // namespace enslsr
