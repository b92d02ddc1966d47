#include "enslsr/planner.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "doctest.h"
#include "enslsr/rng.hpp"

using namespace enslsr;

namespace {

Roadmap graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                         bool directed) {
  Roadmap rm;
  rm.directed = directed;
  rm.nodes.resize(n);
  for (int i = 0; i < n; ++i) {
    rm.nodes[i].node_id = i;
    rm.nodes[i].centroid = {static_cast<double>(i)};
    rm.nodes[i].composition = {i};
  }
  for (const auto& [a, b] : edges) {
    rm.edges.push_back({a, b, {}, 1});
    if (!directed) rm.edges.push_back({b, a, {}, 1});
  }
  return rm;
}

// Brute-force: all simple paths, keep the hop-minimal ones, sorted.
std::vector<std::vector<int>> brute_force_shortest(const Roadmap& rm, int src,
                                                   int dst) {
  std::set<std::pair<int, int>> edge_set;
  for (const RoadmapEdge& e : rm.edges) edge_set.insert({e.from, e.to});
  std::vector<std::vector<int>> found;
  std::vector<int> path{src};
  std::vector<bool> used(rm.nodes.size(), false);
  used[src] = true;
  auto rec = [&](auto&& self, int v) -> void {
    if (v == dst) {
      found.push_back(path);
      return;
    }
    for (int w = 0; w < static_cast<int>(rm.nodes.size()); ++w) {
      if (used[w] || !edge_set.count({v, w})) continue;
      used[w] = true;
      path.push_back(w);
      self(self, w);
      path.pop_back();
      used[w] = false;
    }
  };
  rec(rec, src);
  if (found.empty()) return {};
  std::size_t best = 1e9;
  for (const auto& p : found) best = std::min(best, p.size());
  std::vector<std::vector<int>> out;
  for (const auto& p : found)
    if (p.size() == best) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

MappingConfig clean_config() {
  MappingConfig cfg;
  cfg.sigma_noise = 0.0;
  cfg.p_merge = 0.0;
  cfg.p_split = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("nearest node: exact hit and tie to lowest id") {
  Roadmap rm;
  rm.nodes.resize(3);
  rm.nodes[0] = {0, {0.0, 0.0}, {0}};
  rm.nodes[1] = {1, {2.0, 0.0}, {1}};
  rm.nodes[2] = {2, {0.0, 2.0}, {2}};
  CHECK(nearest_node(rm, {2.0, 0.0}) == 1);
  CHECK(nearest_node(rm, {1.0, 1.0}) == 0);  // equidistant to all three
}

TEST_CASE("src = dst yields the single zero-hop path") {
  const Roadmap rm = graph_from_edges(3, {{0, 1}, {1, 2}}, false);
  const auto sp = all_shortest_paths(rm, 1, 1);
  CHECK(sp.found);
  CHECK(sp.paths == std::vector<std::vector<int>>{{1}});
  CHECK(!sp.truncated);
}

TEST_CASE("diamond graph yields both two-hop paths and nothing longer") {
  const Roadmap rm = graph_from_edges(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}}, true);
  const auto sp = all_shortest_paths(rm, 0, 3);
  CHECK(sp.found);
  CHECK(sp.paths == std::vector<std::vector<int>>{{0, 1, 3}, {0, 2, 3}});
}

TEST_CASE("directed edges are never traversed backwards") {
  const Roadmap rm = graph_from_edges(3, {{0, 1}, {2, 1}}, true);
  const auto sp = all_shortest_paths(rm, 0, 2);
  CHECK(!sp.found);
  CHECK(sp.paths.empty());
}

TEST_CASE("path enumeration equals brute force on random graphs") {
  Rng rng(41);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_below(11));
    const bool directed = rng.next_bernoulli(0.5);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b && rng.next_bernoulli(0.3) && (directed || a < b))
          edges.push_back({a, b});
    const Roadmap rm = graph_from_edges(n, edges, directed);
    const int src = static_cast<int>(rng.next_below(n));
    const int dst = static_cast<int>(rng.next_below(n));
    const auto sp = all_shortest_paths(rm, src, dst, 1 << 20);
    const auto oracle = brute_force_shortest(rm, src, dst);
    CHECK(sp.found == !oracle.empty());
    CHECK(sp.paths == oracle);
    CHECK(!sp.truncated);
  }
}

TEST_CASE("truncation caps the path list and raises the flag") {
  // Four independent diamonds in series: 2^4 = 16 shortest paths.
  std::vector<std::pair<int, int>> edges;
  int base = 0;
  for (int k = 0; k < 4; ++k) {
    edges.push_back({base, base + 1});
    edges.push_back({base, base + 2});
    edges.push_back({base + 1, base + 3});
    edges.push_back({base + 2, base + 3});
    base += 3;
  }
  const Roadmap rm = graph_from_edges(base + 1, edges, true);
  const auto full = all_shortest_paths(rm, 0, base);
  CHECK(full.paths.size() == 16);
  CHECK(!full.truncated);
  const auto capped = all_shortest_paths(rm, 0, base, 5);
  CHECK(capped.truncated);
  CHECK(capped.paths.size() == 5);
  // Exactly max_paths available -> no truncation flag.
  const auto exact = all_shortest_paths(rm, 0, base, 16);
  CHECK(!exact.truncated);
  CHECK(exact.paths.size() == 16);
}

TEST_CASE("noise-free member produces verified plans") {
  // Large enough that the train subset covers the whole state space.
  const auto data = generate_dataset({Task::Stacking, 4000, 0.2, 21, 10});
  const auto mod = MappingModule::make(data, 3, clean_config());
  RoadmapBuildConfig rcfg;
  const Member member{mod, build_roadmap(data, mod, rcfg)};
  int planned = 0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto [start, goal] = sample_eval_pair(Task::Stacking, seed);
    const PlanSet ps = plan_member(member, 0, start, goal);
    for (const VisualActionPlan& p : ps.plans) {
      ++planned;
      CHECK(verify_actions(start, goal, p.action_plan));
      // Structural invariants.
      CHECK(p.latent_plan.size() == p.node_sequence.size());
      CHECK(p.visual_plan.size() == p.node_sequence.size());
      CHECK(p.action_plan.size() + 1 == p.node_sequence.size());
      CHECK(p.node_compositions.size() == p.node_sequence.size());
      std::set<std::int64_t> uni;
      for (const auto& comp : p.node_compositions)
        uni.insert(comp.begin(), comp.end());
      CHECK(std::vector<std::int64_t>(uni.begin(), uni.end()) ==
            p.composition_union);
      CHECK(p.member_id == 0);
    }
    // All plans in a set share one hop count.
    for (const VisualActionPlan& p : ps.plans)
      CHECK(p.node_sequence.size() == ps.plans.front().node_sequence.size());
  }
  CHECK(planned > 0);
}

TEST_CASE("start and goal on the same node give one zero-length plan") {
  const auto data = generate_dataset({Task::Stacking, 600, 0.2, 22, 10});
  const auto mod = MappingModule::make(data, 3, clean_config());
  RoadmapBuildConfig rcfg;
  const Member member{mod, build_roadmap(data, mod, rcfg)};
  const Observation o = member.module.train_observations().front();
  const Observation o2 = make_observation(o.state, 999999, 5);
  const PlanSet ps = plan_member(member, 2, o, o2);
  REQUIRE(ps.plans.size() == 1);
  CHECK(ps.plans.front().action_plan.empty());
  CHECK(ps.plans.front().node_sequence.size() == 1);
  CHECK(ps.plans.front().member_id == 2);
}

TEST_CASE("unreachable goal yields an empty plan set") {
  // Two disconnected nodes reached via a hand-built member roadmap.
  Roadmap rm = graph_from_edges(2, {}, true);
  rm.nodes[0].centroid = {0.0};
  rm.nodes[1].centroid = {10.0};
  const auto sp = all_shortest_paths(rm, 0, 1);
  CHECK(!sp.found);
}
