#include "enslsr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace enslsr {

using nlohmann::json;

MappingConfig RunConfig::mapping_config() const {
  return {mapping.d, mapping.sigma_noise, mapping.p_merge, mapping.p_split,
          mapping.subset_fraction};
}

EditCosts RunConfig::edit_costs() const {
  return {ensemble.insertion_cost, ensemble.deletion_cost,
          ensemble.substitution_cost, ensemble.tau};
}

MeasureConfig RunConfig::measure_config() const {
  return {measure_from_name(ensemble.measure), edit_costs()};
}

namespace {

void check_fields(const json& j, const std::string& scope,
                  const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw ConfigError(scope + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key))
      throw ConfigError("unknown config field: " + scope + "." + key);
}

template <typename T>
void read_field(const json& j, const std::string& scope, const char* name,
                T& out) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for config field " + scope + "." + name);
  }
}

void require_fraction(double v, const std::string& field, bool allow_one) {
  if (v < 0.0 || v > 1.0 || (!allow_one && v == 1.0))
    throw ConfigError(field + " must be in [0, 1" +
                      (allow_one ? "]" : ")"));
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_fields(j, "config",
               {"task", "dataset", "mapping", "roadmap", "planner", "ensemble",
                "eval", "io"});

  RunConfig cfg;
  if (j.contains("task")) {
    try {
      cfg.task = task_from_name(j.at("task").get<std::string>());
    } catch (const std::exception&) {
      throw ConfigError("task must be \"stacking\" or \"harvesting\"");
    }
  }

  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    check_fields(d, "dataset",
                 {"n_tuples", "frac_no_action", "seed", "walk_length"});
    read_field(d, "dataset", "n_tuples", cfg.dataset.n_tuples);
    read_field(d, "dataset", "frac_no_action", cfg.dataset.frac_no_action);
    read_field(d, "dataset", "seed", cfg.dataset.seed);
    read_field(d, "dataset", "walk_length", cfg.dataset.walk_length);
    if (cfg.dataset.n_tuples <= 0)
      throw ConfigError("dataset.n_tuples must be > 0");
    require_fraction(cfg.dataset.frac_no_action, "dataset.frac_no_action",
                     false);
    if (cfg.dataset.walk_length <= 0)
      throw ConfigError("dataset.walk_length must be > 0");
  }

  if (j.contains("mapping")) {
    const json& m = j.at("mapping");
    check_fields(m, "mapping",
                 {"d", "sigma_noise", "p_merge", "p_split", "subset_fraction",
                  "seeds"});
    read_field(m, "mapping", "d", cfg.mapping.d);
    read_field(m, "mapping", "sigma_noise", cfg.mapping.sigma_noise);
    read_field(m, "mapping", "p_merge", cfg.mapping.p_merge);
    read_field(m, "mapping", "p_split", cfg.mapping.p_split);
    read_field(m, "mapping", "subset_fraction", cfg.mapping.subset_fraction);
    read_field(m, "mapping", "seeds", cfg.mapping.seeds);
    if (cfg.mapping.d <= 0) throw ConfigError("mapping.d must be > 0");
    if (cfg.mapping.sigma_noise < 0.0)
      throw ConfigError("mapping.sigma_noise must be >= 0");
    require_fraction(cfg.mapping.p_merge, "mapping.p_merge", true);
    require_fraction(cfg.mapping.p_split, "mapping.p_split", true);
    if (cfg.mapping.subset_fraction <= 0.0 ||
        cfg.mapping.subset_fraction > 1.0)
      throw ConfigError("mapping.subset_fraction must be in (0, 1]");
    if (cfg.mapping.seeds.empty())
      throw ConfigError("mapping.seeds must be nonempty");
  }

  if (j.contains("roadmap")) {
    const json& r = j.at("roadmap");
    check_fields(r, "roadmap",
                 {"c_max", "min_cluster_size", "n_eps", "directed"});
    read_field(r, "roadmap", "c_max", cfg.roadmap.c_max);
    read_field(r, "roadmap", "min_cluster_size", cfg.roadmap.min_cluster_size);
    read_field(r, "roadmap", "n_eps", cfg.roadmap.n_eps);
    if (r.contains("directed")) {
      read_field(r, "roadmap", "directed", cfg.roadmap.directed);
      cfg.roadmap.directed_set = true;
    }
    if (cfg.roadmap.c_max.empty())
      throw ConfigError("roadmap.c_max must be nonempty");
    for (int c : cfg.roadmap.c_max)
      if (c < 1) throw ConfigError("roadmap.c_max values must be >= 1");
    if (cfg.roadmap.min_cluster_size < 1)
      throw ConfigError("roadmap.min_cluster_size must be >= 1");
    if (cfg.roadmap.n_eps < 1) throw ConfigError("roadmap.n_eps must be >= 1");
  }

  if (j.contains("planner")) {
    const json& p = j.at("planner");
    check_fields(p, "planner", {"max_paths"});
    read_field(p, "planner", "max_paths", cfg.planner.max_paths);
    if (cfg.planner.max_paths < 1)
      throw ConfigError("planner.max_paths must be >= 1");
  }

  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    check_fields(e, "ensemble",
                 {"measure", "substitution_cost", "tau", "insertion_cost",
                  "deletion_cost"});
    read_field(e, "ensemble", "measure", cfg.ensemble.measure);
    read_field(e, "ensemble", "substitution_cost",
               cfg.ensemble.substitution_cost);
    read_field(e, "ensemble", "tau", cfg.ensemble.tau);
    read_field(e, "ensemble", "insertion_cost", cfg.ensemble.insertion_cost);
    read_field(e, "ensemble", "deletion_cost", cfg.ensemble.deletion_cost);
    try {
      measure_from_name(cfg.ensemble.measure);
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("ensemble.measure: ") + ex.what());
    }
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    check_fields(e, "eval", {"n_pairs", "harness_seed"});
    read_field(e, "eval", "n_pairs", cfg.eval.n_pairs);
    read_field(e, "eval", "harness_seed", cfg.eval.harness_seed);
    if (cfg.eval.n_pairs <= 0) throw ConfigError("eval.n_pairs must be > 0");
  }

  if (j.contains("io")) {
    const json& io = j.at("io");
    check_fields(io, "io", {"output_dir"});
    read_field(io, "io", "output_dir", cfg.io.output_dir);
  }

  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace enslsr
