#include "enslsr/planner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "enslsr/kernels.hpp"

namespace enslsr {

int nearest_node(const Roadmap& rm, const std::vector<double>& z) {
  if (rm.nodes.empty()) throw std::runtime_error("roadmap has no nodes");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const RoadmapNode& n : rm.nodes) {
    const double d =
        kernels::sq_l2(z.data(), n.centroid.data(), n.centroid.size());
    if (d < best_d) {
      best_d = d;
      best = n.node_id;
    }
  }
  return best;
}

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();

std::vector<int> bfs_distances(
    const std::vector<std::vector<std::pair<int, int>>>& adj, int src) {
  std::vector<int> dist(adj.size(), kUnreached);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& [v, ei] : adj[u]) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

}  // namespace

ShortestPaths all_shortest_paths(const Roadmap& rm, int src, int dst,
                                 int max_paths) {
  ShortestPaths out;
  const int n = static_cast<int>(rm.nodes.size());
  if (src < 0 || src >= n || dst < 0 || dst >= n)
    throw std::runtime_error("invalid node id");
  if (src == dst) {
    out.found = true;
    out.paths = {{src}};
    return out;
  }

  const auto adj = rm.adjacency();
  std::vector<std::vector<std::pair<int, int>>> radj(n);
  for (const RoadmapEdge& e : rm.edges) radj[e.to].push_back({e.from, 0});

  const std::vector<int> d_src = bfs_distances(adj, src);
  const std::vector<int> d_dst = bfs_distances(radj, dst);
  if (d_src[dst] == kUnreached) return out;  // no path
  const int total = d_src[dst];

  // Depth-first expansion over the shortest-path DAG; neighbors are visited
  // in ascending node_id, so the enumeration is lexicographic.
  out.found = true;
  std::vector<int> path{src};
  std::vector<std::size_t> cursor{0};
  while (!path.empty()) {
    const int u = path.back();
    if (u == dst) {
      if (static_cast<int>(out.paths.size()) == max_paths) {
        // One path beyond the cap proves the enumeration was cut short.
        out.truncated = true;
        return out;
      }
      out.paths.push_back(path);
      path.pop_back();
      cursor.pop_back();
      continue;
    }
    bool advanced = false;
    for (std::size_t& c = cursor.back(); c < adj[u].size();) {
      const auto [v, ei] = adj[u][c++];
      if (d_src[u] + 1 == d_src[v] &&
          d_src[v] + d_dst[v] == total) {
        path.push_back(v);
        cursor.push_back(0);
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      path.pop_back();
      cursor.pop_back();
    }
  }
  return out;
}

PlanSet plan_member(const Member& member, int member_id,
                    const Observation& start, const Observation& goal,
                    int max_paths) {
  PlanSet set;
  set.member_id = member_id;
  const Roadmap& rm = member.roadmap;
  if (rm.nodes.empty()) return set;

  const std::vector<double> zs = member.module.encode(start);
  const std::vector<double> zg = member.module.encode(goal);
  const int src = nearest_node(rm, zs);
  const int dst = nearest_node(rm, zg);

  const ShortestPaths sp = all_shortest_paths(rm, src, dst, max_paths);
  if (!sp.found) return set;  // NoPath becomes an empty plan set
  set.truncated = sp.truncated;

  // Edge lookup for action assembly.
  std::map<std::pair<int, int>, const RoadmapEdge*> edge_of;
  for (const RoadmapEdge& e : rm.edges) edge_of[{e.from, e.to}] = &e;

  int path_id = 0;
  for (const std::vector<int>& nodes : sp.paths) {
    VisualActionPlan plan;
    plan.member_id = member_id;
    plan.path_id = path_id++;
    plan.node_sequence = nodes;
    std::set<std::int64_t> comp_union;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const RoadmapNode& node = rm.nodes[nodes[i]];
      plan.latent_plan.push_back(node.centroid);
      plan.visual_plan.push_back(member.module.decode(node.centroid));
      plan.node_compositions.push_back(node.composition);
      comp_union.insert(node.composition.begin(), node.composition.end());
      if (i + 1 < nodes.size())
        plan.action_plan.push_back(
            edge_of.at({nodes[i], nodes[i + 1]})->mean_action);
    }
    plan.composition_union.assign(comp_union.begin(), comp_union.end());
    set.plans.push_back(std::move(plan));
  }
  return set;
}

}  // namespace enslsr
