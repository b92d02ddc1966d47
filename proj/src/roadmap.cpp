#include "enslsr/roadmap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>

#include "enslsr/kernels.hpp"
#include "enslsr/parallel.hpp"
#include "json.hpp"

namespace enslsr {

using nlohmann::json;

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Contiguous cluster labels ordered by lowest member index.
std::vector<int> labels_from_uf(UnionFind& uf) {
  const std::size_t n = uf.parent.size();
  std::vector<int> labels(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int r = uf.find(static_cast<int>(i));
    if (labels[r] < 0) labels[r] = next++;
    labels[i] = labels[r];
  }
  return labels;
}

struct ActionLink {
  int from_pos;  // positions into the training observation array
  int to_pos;
  Action u;
};

struct SweepResult {
  bool feasible = false;
  long edge_count = -1;
  int wcc = 0;
};

// Cluster labels at `epsilon` from the condensed squared-distance array.
std::vector<int> cluster_condensed(const std::vector<float>& sq_dist,
                                   std::size_t n, double epsilon) {
  const float eps2 = static_cast<float>(epsilon * epsilon);
  UnionFind uf(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k)
      if (sq_dist[k] <= eps2) uf.unite(static_cast<int>(i), static_cast<int>(j));
  return labels_from_uf(uf);
}

// Per-epsilon evaluation: prune small clusters, count distinct edges and
// weakly connected components of the resulting roadmap graph.
SweepResult evaluate_epsilon(const std::vector<int>& labels,
                             const std::vector<ActionLink>& links,
                             int min_cluster_size, bool directed, int c_max) {
  const int n_clusters =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> sizes(n_clusters, 0);
  for (int l : labels) ++sizes[l];

  std::vector<int> node_of(n_clusters, -1);
  int n_nodes = 0;
  for (int c = 0; c < n_clusters; ++c)
    if (sizes[c] >= min_cluster_size) node_of[c] = n_nodes++;

  std::set<std::pair<int, int>> pairs;
  for (const ActionLink& link : links) {
    const int a = node_of[labels[link.from_pos]];
    const int b = node_of[labels[link.to_pos]];
    if (a < 0 || b < 0 || a == b) continue;
    pairs.insert({a, b});
    if (!directed) pairs.insert({b, a});
  }

  UnionFind uf(n_nodes);
  for (const auto& [a, b] : pairs) uf.unite(a, b);
  std::set<int> roots;
  for (int v = 0; v < n_nodes; ++v) roots.insert(uf.find(v));

  SweepResult r;
  r.edge_count = static_cast<long>(pairs.size());
  r.wcc = static_cast<int>(roots.size());
  r.feasible = n_nodes > 0 && r.wcc <= c_max;
  return r;
}

}  // namespace

std::vector<int> cluster_at(const std::vector<double>& points, std::size_t d,
                            double epsilon) {
  if (epsilon <= 0.0) throw std::runtime_error("epsilon must be > 0");
  const std::size_t n = d == 0 ? 0 : points.size() / d;
  UnionFind uf(n);
  const double eps2 = epsilon * epsilon;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (kernels::sq_l2(points.data() + i * d, points.data() + j * d, d) <=
          eps2)
        uf.unite(static_cast<int>(i), static_cast<int>(j));
  return labels_from_uf(uf);
}

Roadmap build_roadmap(const std::vector<TransitionTuple>& dataset,
                      const MappingModule& module,
                      const RoadmapBuildConfig& cfg) {
  if (cfg.c_max < 1) throw std::runtime_error("c_max must be >= 1");
  const auto& obs = module.train_observations();
  const auto& lat = module.train_latents();
  const std::size_t n = obs.size();
  const std::size_t d = static_cast<std::size_t>(module.config().d);
  if (n == 0) throw std::runtime_error("module has no training observations");

  std::unordered_map<std::int64_t, int> pos_of;
  pos_of.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pos_of[obs[i].index] = static_cast<int>(i);

  std::vector<ActionLink> links;
  for (std::size_t ti : module.train_subset()) {
    const TransitionTuple& t = dataset[ti];
    if (!t.rho.has_action) continue;
    links.push_back(
        {pos_of.at(t.first.index), pos_of.at(t.second.index), t.rho.u});
  }

  // Condensed pairwise squared distances.
  std::vector<float> sq_dist(n * (n - 1) / 2);
  parallel_for(n, [&](std::size_t i) {
    std::size_t k = i * n - i * (i + 1) / 2 - i - 1;
    for (std::size_t j = i + 1; j < n; ++j)
      sq_dist[k + j] = static_cast<float>(
          kernels::sq_l2(lat.data() + i * d, lat.data() + j * d, d));
  });

  // Epsilon grid from the minimum pairwise distance up to the 95th
  // percentile. The grid must start at the minimum: in high dimension the
  // bulk of the pairwise-distance distribution sits above the single-linkage
  // percolation threshold, so any grid anchored at an interior percentile
  // would merge everything at its very first value.
  std::vector<double> eps_grid;
  double max_dist = 0.0;
  {
    std::vector<float> copy = sq_dist;
    const std::size_t m = copy.size();
    double dmin = 0.0, d95 = 0.0;
    if (m > 0) {
      const std::size_t i95 = static_cast<std::size_t>(0.95 * (m - 1));
      dmin = std::sqrt(
          static_cast<double>(*std::min_element(copy.begin(), copy.end())));
      std::nth_element(copy.begin(), copy.begin() + i95, copy.end());
      d95 = std::sqrt(static_cast<double>(copy[i95]));
      max_dist = std::sqrt(
          static_cast<double>(*std::max_element(copy.begin(), copy.end())));
    }
    const double lo = std::max(dmin, 1e-12);
    const double hi = std::max(d95, lo);
    for (int i = 0; i < cfg.n_eps; ++i)
      eps_grid.push_back(cfg.n_eps == 1
                             ? lo
                             : lo + (hi - lo) * i / (cfg.n_eps - 1));
  }

  auto sweep = [&](const std::vector<double>& grid,
                   int& best_idx) -> std::vector<std::vector<int>> {
    std::vector<std::vector<int>> all_labels(grid.size());
    std::vector<SweepResult> results(grid.size());
    parallel_for(grid.size(), [&](std::size_t gi) {
      all_labels[gi] = cluster_condensed(sq_dist, n, grid[gi]);
      results[gi] = evaluate_epsilon(all_labels[gi], links,
                                     cfg.min_cluster_size, cfg.directed,
                                     cfg.c_max);
    });
    best_idx = -1;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      // Ties on edge count go to the smaller epsilon.
      if (results[gi].feasible &&
          (best_idx < 0 || results[gi].edge_count > results[best_idx].edge_count))
        best_idx = static_cast<int>(gi);
    }
    return all_labels;
  };

  int best = -1;
  std::vector<std::vector<int>> labels = sweep(eps_grid, best);
  if (best < 0) {
    // Extend the sweep up to the maximum pairwise distance, where a single
    // cluster satisfies any c_max >= 1.
    std::vector<double> ext_grid;
    const double lo = eps_grid.back();
    for (int i = 1; i <= cfg.n_eps; ++i)
      ext_grid.push_back(lo + (max_dist - lo) * i / cfg.n_eps);
    labels = sweep(ext_grid, best);
    if (best < 0)
      throw NoFeasibleEpsilon("no epsilon satisfies the c_max constraint");
    eps_grid = ext_grid;
  }

  const std::vector<int>& lab = labels[best];
  const int n_clusters =
      *std::max_element(lab.begin(), lab.end()) + 1;
  std::vector<int> sizes(n_clusters, 0);
  for (int l : lab) ++sizes[l];
  std::vector<int> node_of(n_clusters, -1);
  int n_nodes = 0;
  for (int c = 0; c < n_clusters; ++c)
    if (sizes[c] >= cfg.min_cluster_size) node_of[c] = n_nodes++;

  Roadmap rm;
  rm.directed = cfg.directed;
  rm.c_max = cfg.c_max;
  rm.epsilon_used = eps_grid[best];
  rm.nodes.resize(n_nodes);
  for (int v = 0; v < n_nodes; ++v) {
    rm.nodes[v].node_id = v;
    rm.nodes[v].centroid.assign(d, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int v = node_of[lab[i]];
    if (v < 0) continue;
    rm.nodes[v].composition.push_back(obs[i].index);
    for (std::size_t k = 0; k < d; ++k)
      rm.nodes[v].centroid[k] += lat[i * d + k];
  }
  for (RoadmapNode& node : rm.nodes) {
    std::sort(node.composition.begin(), node.composition.end());
    const double inv = 1.0 / static_cast<double>(node.composition.size());
    for (double& c : node.centroid) c *= inv;
  }

  struct EdgeAccum {
    double px = 0, py = 0, rx = 0, ry = 0;
    int count = 0;
  };
  std::map<std::pair<int, int>, EdgeAccum> accum;
  auto add = [&](int a, int b, const Action& u) {
    EdgeAccum& e = accum[{a, b}];
    e.px += u.pick.x;
    e.py += u.pick.y;
    e.rx += u.release.x;
    e.ry += u.release.y;
    ++e.count;
  };
  for (const ActionLink& link : links) {
    const int a = node_of[lab[link.from_pos]];
    const int b = node_of[lab[link.to_pos]];
    if (a < 0 || b < 0 || a == b) continue;
    add(a, b, link.u);
    if (!cfg.directed)
      add(b, a, Action{link.u.release, link.u.pick});  // reversed action
  }
  for (const auto& [key, e] : accum) {
    const double inv = 1.0 / e.count;
    rm.edges.push_back({key.first, key.second,
                        Action{{e.px * inv, e.py * inv}, {e.rx * inv, e.ry * inv}},
                        e.count});
  }
  return rm;
}

std::vector<std::vector<std::pair<int, int>>> Roadmap::adjacency() const {
  std::vector<std::vector<std::pair<int, int>>> adj(nodes.size());
  for (std::size_t ei = 0; ei < edges.size(); ++ei)
    adj[edges[ei].from].push_back({edges[ei].to, static_cast<int>(ei)});
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

int wcc_count(const Roadmap& rm) {
  UnionFind uf(rm.nodes.size());
  for (const RoadmapEdge& e : rm.edges) uf.unite(e.from, e.to);
  std::set<int> roots;
  for (std::size_t v = 0; v < rm.nodes.size(); ++v)
    roots.insert(uf.find(static_cast<int>(v)));
  return static_cast<int>(roots.size());
}

void write_roadmap(std::ostream& os, const Roadmap& rm) {
  json j;
  j["directed"] = rm.directed;
  j["c_max"] = rm.c_max;
  j["epsilon_used"] = rm.epsilon_used;
  j["format_version"] = 1;
  json nodes = json::array();
  for (const RoadmapNode& n : rm.nodes) {
    json jn;
    jn["node_id"] = n.node_id;
    jn["centroid"] = n.centroid;
    jn["composition"] = n.composition;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const RoadmapEdge& e : rm.edges) {
    json je;
    je["from"] = e.from;
    je["to"] = e.to;
    je["mean_action"] = {e.mean_action.pick.x, e.mean_action.pick.y,
                         e.mean_action.release.x, e.mean_action.release.y};
    je["support_count"] = e.support_count;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  os << j.dump() << '\n';
}

Roadmap read_roadmap(std::istream& is) {
  json j;
  is >> j;
  if (j.at("format_version").get<int>() != 1)
    throw std::runtime_error("unsupported roadmap format_version");
  Roadmap rm;
  rm.directed = j.at("directed").get<bool>();
  rm.c_max = j.at("c_max").get<int>();
  rm.epsilon_used = j.at("epsilon_used").get<double>();
  for (const json& jn : j.at("nodes")) {
    RoadmapNode n;
    n.node_id = jn.at("node_id").get<int>();
    n.centroid = jn.at("centroid").get<std::vector<double>>();
    n.composition = jn.at("composition").get<std::vector<std::int64_t>>();
    rm.nodes.push_back(std::move(n));
  }
  for (const json& je : j.at("edges")) {
    RoadmapEdge e;
    e.from = je.at("from").get<int>();
    e.to = je.at("to").get<int>();
    const auto& u = je.at("mean_action");
    e.mean_action = {{u.at(0).get<double>(), u.at(1).get<double>()},
                     {u.at(2).get<double>(), u.at(3).get<double>()}};
    e.support_count = je.at("support_count").get<int>();
    rm.edges.push_back(e);
  }
  return rm;
}

}  // namespace enslsr
