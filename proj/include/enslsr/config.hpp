#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enslsr/ensemble.hpp"
#include "enslsr/mapping.hpp"
#include "enslsr/tasksim.hpp"

// Single config file driving every CLI command. Omitted fields take the
// documented defaults; unknown fields are a hard error.

namespace enslsr {

struct RunConfig {
  Task task = Task::Stacking;

  struct Dataset {
    int n_tuples = 2500;
    double frac_no_action = 0.2;
    std::uint64_t seed = 0;
    int walk_length = 10;
  } dataset;

  struct Mapping {
    int d = 16;
    double sigma_noise = 0.25;
    double p_merge = 0.02;
    double p_split = 0.02;
    double subset_fraction = 0.85;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  } mapping;

  struct RoadmapCfg {
    std::vector<int> c_max = {20};
    int min_cluster_size = 1;
    int n_eps = 50;
    bool directed = false;
    bool directed_set = false;  // defaults to task == harvesting when unset
  } roadmap;

  struct Planner {
    int max_paths = 50;
  } planner;

  struct Ensemble {
    std::string measure = "cosine+jaccard";
    double substitution_cost = 1.0;
    double tau = 0.5;
    double insertion_cost = 0.5;
    double deletion_cost = 1.0;
  } ensemble;

  struct Eval {
    int n_pairs = 1000;
    std::uint64_t harness_seed = 0;
  } eval;

  struct Io {
    std::string output_dir = "out";
  } io;

  bool directed() const {
    return roadmap.directed_set ? roadmap.directed : task == Task::Harvesting;
  }
  MappingConfig mapping_config() const;
  EditCosts edit_costs() const;
  MeasureConfig measure_config() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Throws ConfigError naming the offending field on invalid or unknown input.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

}  // namespace enslsr
