#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "enslsr/mapping.hpp"
#include "enslsr/roadmap.hpp"
#include "enslsr/tasksim.hpp"

// Single-member planning: map start/goal observations into a roadmap,
// enumerate all hop-minimal paths, and assemble visual action plans.

namespace enslsr {

struct VisualActionPlan {
  int member_id = 0;
  int path_id = 0;
  std::vector<int> node_sequence;
  std::vector<std::vector<double>> latent_plan;  // node centroids
  std::vector<Action> action_plan;               // edge mean actions
  std::vector<Observation> visual_plan;          // decoded centroids
  std::vector<std::vector<std::int64_t>> node_compositions;
  std::vector<std::int64_t> composition_union;   // sorted
};

struct PlanSet {
  int member_id = 0;
  std::vector<VisualActionPlan> plans;
  bool truncated = false;
};

constexpr int kDefaultMaxPaths = 50;

// Node with minimum centroid distance to z; ties go to the lowest node_id.
int nearest_node(const Roadmap& rm, const std::vector<double>& z);

struct ShortestPaths {
  bool found = false;
  std::vector<std::vector<int>> paths;  // lexicographic by node sequence
  bool truncated = false;
};

// All simple paths of minimal hop count from src to dst, respecting edge
// direction when rm.directed. src == dst yields the single path [src].
ShortestPaths all_shortest_paths(const Roadmap& rm, int src, int dst,
                                 int max_paths = kDefaultMaxPaths);

struct Member {
  MappingModule module;
  Roadmap roadmap;
};

PlanSet plan_member(const Member& member, int member_id,
                    const Observation& start, const Observation& goal,
                    int max_paths = kDefaultMaxPaths);

}  // namespace enslsr
