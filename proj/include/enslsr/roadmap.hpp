#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "enslsr/mapping.hpp"
#include "enslsr/tasksim.hpp"

// Latent Space Roadmap construction: single-linkage clustering of the
// training latents, small-cluster pruning, nodes with centroids and
// compositions, action-averaged edges, and the epsilon sweep that maximizes
// the edge count subject to a weakly-connected-component bound c_max.

namespace enslsr {

struct RoadmapNode {
  int node_id = 0;
  std::vector<double> centroid;           // mean of member latent points
  std::vector<std::int64_t> composition;  // sorted training obs indices
};

struct RoadmapEdge {
  int from = 0;
  int to = 0;
  Action mean_action;
  int support_count = 0;
};

struct Roadmap {
  bool directed = false;
  int c_max = 1;
  double epsilon_used = 0.0;
  std::vector<RoadmapNode> nodes;
  std::vector<RoadmapEdge> edges;

  // node_id -> outgoing (neighbor, edge index), sorted by neighbor id.
  std::vector<std::vector<std::pair<int, int>>> adjacency() const;
};

class NoFeasibleEpsilon : public std::runtime_error {
 public:
  explicit NoFeasibleEpsilon(const std::string& what)
      : std::runtime_error(what) {}
};

// Single-linkage partition: connected components of the graph joining
// points at Euclidean distance <= epsilon. `points` is row-major n x d.
// Returns a cluster label per point; labels are contiguous 0..k-1, ordered
// by the lowest point index in each cluster.
std::vector<int> cluster_at(const std::vector<double>& points, std::size_t d,
                            double epsilon);

struct RoadmapBuildConfig {
  int c_max = 20;
  int min_cluster_size = 1;
  bool directed = false;
  int n_eps = 50;
};

Roadmap build_roadmap(const std::vector<TransitionTuple>& dataset,
                      const MappingModule& module,
                      const RoadmapBuildConfig& cfg);

// Connected components ignoring edge direction.
int wcc_count(const Roadmap& rm);

void write_roadmap(std::ostream& os, const Roadmap& rm);
Roadmap read_roadmap(std::istream& is);

}  // namespace enslsr
