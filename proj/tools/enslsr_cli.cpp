// Command-line entry point: dataset generation, S-LSR building, ensemble
// planning and the evaluation sweeps, all driven by one JSON config.
//
// Exit codes: 0 ok, 2 config error, 3 I/O error, 4 no plan found.

#include <filesystem>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "enslsr/config.hpp"
#include "enslsr/ensemble.hpp"
#include "enslsr/eval.hpp"
#include "enslsr/parallel.hpp"
#include "enslsr/planner.hpp"
#include "enslsr/roadmap.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace enslsr;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoPlan = 4;

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class NoPlanError : public std::runtime_error {
 public:
  NoPlanError() : std::runtime_error("no member found a plan") {}
};

std::vector<TransitionTuple> load_dataset(const std::string& path,
                                          DatasetConfig* cfg = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  return read_dataset(in, cfg);
}

void cmd_gen_dataset(const RunConfig& cfg, const std::string& out_path) {
  DatasetConfig dcfg{cfg.task, cfg.dataset.n_tuples, cfg.dataset.frac_no_action,
                     cfg.dataset.seed, cfg.dataset.walk_length};
  const auto tuples = generate_dataset(dcfg);
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write dataset file: " + out_path);
  write_dataset(out, dcfg, tuples);
  if (!out) throw IoError("write failed: " + out_path);
  std::cout << "wrote " << tuples.size() << " tuples to " << out_path << "\n";
}

void cmd_build(const RunConfig& cfg, const std::string& dataset_path,
               const std::string& out_dir) {
  DatasetConfig dcfg;
  const auto dataset = load_dataset(dataset_path, &dcfg);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output dir: " + out_dir);

  json manifest;
  manifest["dataset"] = dataset_path;
  manifest["format_version"] = 1;
  json entries = json::array();

  for (std::uint64_t seed : cfg.mapping.seeds) {
    const MappingModule module =
        MappingModule::make(dataset, seed, cfg.mapping_config());
    const std::string module_file = "module_s" + std::to_string(seed) + ".json";
    {
      std::ofstream out(fs::path(out_dir) / module_file);
      if (!out) throw IoError("cannot write module file");
      module.save(out);
    }
    for (int c_max : cfg.roadmap.c_max) {
      RoadmapBuildConfig rcfg{c_max, cfg.roadmap.min_cluster_size,
                              cfg.directed(), cfg.roadmap.n_eps};
      const Roadmap rm = build_roadmap(dataset, module, rcfg);
      if (wcc_count(rm) > c_max)
        throw std::runtime_error("built roadmap violates its c_max bound");
      const std::string roadmap_file = "roadmap_s" + std::to_string(seed) +
                                       "_c" + std::to_string(c_max) + ".json";
      std::ofstream out(fs::path(out_dir) / roadmap_file);
      if (!out) throw IoError("cannot write roadmap file");
      write_roadmap(out, rm);
      json entry;
      entry["seed"] = seed;
      entry["c_max"] = c_max;
      entry["module"] = module_file;
      entry["roadmap"] = roadmap_file;
      entries.push_back(std::move(entry));
      std::cout << "built seed=" << seed << " c_max=" << c_max
                << " nodes=" << rm.nodes.size() << " edges=" << rm.edges.size()
                << " eps=" << rm.epsilon_used << "\n";
    }
  }
  manifest["entries"] = std::move(entries);
  std::ofstream out(fs::path(out_dir) / "manifest.json");
  if (!out) throw IoError("cannot write manifest");
  out << manifest.dump(2) << "\n";
}

struct LoadedModels {
  std::vector<TransitionTuple> dataset;
  DatasetConfig dataset_cfg;
  std::vector<Member> members;
  std::vector<std::uint64_t> seeds;
  std::vector<int> cmaxes;
};

LoadedModels load_models(const std::string& models_dir) {
  const fs::path dir(models_dir);
  std::ifstream min(dir / "manifest.json");
  if (!min) throw IoError("cannot open manifest in " + models_dir);
  json manifest;
  min >> manifest;

  std::string dataset_path = manifest.at("dataset").get<std::string>();
  if (!fs::exists(dataset_path)) {
    const fs::path alt = dir / fs::path(dataset_path).filename();
    if (fs::exists(alt)) dataset_path = alt.string();
  }
  LoadedModels out;
  out.dataset = load_dataset(dataset_path, &out.dataset_cfg);

  for (const json& entry : manifest.at("entries")) {
    std::ifstream ms(dir / entry.at("module").get<std::string>());
    if (!ms) throw IoError("cannot open module file");
    MappingModule module = MappingModule::load(ms, out.dataset);
    std::ifstream rs(dir / entry.at("roadmap").get<std::string>());
    if (!rs) throw IoError("cannot open roadmap file");
    Roadmap rm = read_roadmap(rs);
    out.members.push_back({std::move(module), std::move(rm)});
    out.seeds.push_back(entry.at("seed").get<std::uint64_t>());
    out.cmaxes.push_back(entry.at("c_max").get<int>());
  }
  if (out.members.empty()) throw IoError("models dir contains no members");
  return out;
}

void print_plan(const VisualActionPlan& plan, double score, bool with_score) {
  json j;
  j["member"] = plan.member_id;
  j["path"] = plan.path_id;
  j["nodes"] = plan.node_sequence;
  json actions = json::array();
  for (const Action& u : plan.action_plan)
    actions.push_back({u.pick.x, u.pick.y, u.release.x, u.release.y});
  j["actions"] = std::move(actions);
  json states = json::array();
  for (const Observation& obs : plan.visual_plan) {
    json cells = json::array();
    for (const CellCoord& c : obs.state.cells) cells.push_back({c.x, c.y});
    states.push_back(std::move(cells));
  }
  j["states"] = std::move(states);
  if (with_score) j["score"] = score;
  std::cout << j.dump() << "\n";
}

void cmd_plan(const RunConfig& cfg, const std::string& models_dir,
              const std::string& start_file, const std::string& goal_file,
              bool naive, bool trace) {
  const LoadedModels models = load_models(models_dir);
  auto read_obs = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open observation file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return observation_from_json(ss.str());
  };
  const Observation start = read_obs(start_file);
  const Observation goal = read_obs(goal_file);

  std::vector<PlanSet> sets;
  for (std::size_t i = 0; i < models.members.size(); ++i)
    sets.push_back(plan_member(models.members[i], static_cast<int>(i), start,
                               goal, cfg.planner.max_paths));

  if (naive) {
    const auto all = naive_select(sets);
    if (all.empty()) throw NoPlanError();
    for (const auto& plan : all) print_plan(plan, 0.0, false);
    return;
  }

  const SelectionResult sel = select_plans(sets, cfg.measure_config());
  if (sel.selected.empty()) throw NoPlanError();
  if (trace) {
    for (std::size_t i = 0; i < sel.score_table.size(); ++i) {
      const ScoredPlan& sp = sel.score_table[i];
      json j;
      j["i"] = sp.member_id;
      j["j"] = sp.path_id;
      j["c"] = sp.score;
      json best = json::array();
      for (const BestMatch& bm : sel.trace[i])
        best.push_back({{"k", bm.peer_member},
                        {"l", bm.peer_path},
                        {"s_u", bm.s_u},
                        {"s_n", bm.s_n},
                        {"s", bm.s}});
      j["per_member_best"] = std::move(best);
      std::cout << "trace " << j.dump() << "\n";
    }
  }
  std::map<std::pair<int, int>, double> score_of;
  for (const ScoredPlan& sp : sel.score_table)
    score_of[{sp.member_id, sp.path_id}] = sp.score;
  for (const auto& plan : sel.selected)
    print_plan(plan, score_of[{plan.member_id, plan.path_id}], true);
}

void cmd_eval(const RunConfig& cfg, const std::string& models_dir,
              const std::string& sweep, const std::string& out_csv) {
  const LoadedModels models = load_models(models_dir);
  const Task task = models.dataset_cfg.task;
  const auto pairs =
      make_eval_pairs(task, cfg.eval.n_pairs, cfg.eval.harness_seed);

  std::vector<CsvRow> rows;
  if (sweep == "members" || sweep == "similarity") {
    // One member per mapping seed at the first configured c_max.
    const int c_max = cfg.roadmap.c_max.front();
    std::vector<Member> members;
    for (std::size_t i = 0; i < models.members.size(); ++i)
      if (models.cmaxes[i] == c_max) members.push_back(models.members[i]);
    if (members.empty())
      throw IoError("no built members match roadmap.c_max[0]");
    if (sweep == "members")
      rows = sweep_members(members, pairs, c_max, cfg.eval.harness_seed,
                           cfg.measure_config(), cfg.planner.max_paths);
    else
      rows = sweep_similarity(members, pairs, c_max, cfg.eval.harness_seed,
                              cfg.edit_costs(), cfg.planner.max_paths);
  } else if (sweep == "cmax") {
    // One mapping module (the first seed) across all c_max values.
    const std::uint64_t seed = cfg.mapping.seeds.front();
    std::vector<Member> members;
    std::vector<int> cmaxes;
    for (std::size_t i = 0; i < models.members.size(); ++i)
      if (models.seeds[i] == seed) {
        members.push_back(models.members[i]);
        cmaxes.push_back(models.cmaxes[i]);
      }
    if (members.empty())
      throw IoError("no built members match mapping.seeds[0]");
    rows = sweep_cmax(members, cmaxes, pairs, cfg.eval.harness_seed,
                      cfg.measure_config(), cfg.planner.max_paths);
  } else {
    throw ConfigError("unknown sweep: " + sweep);
  }

  std::ofstream out(out_csv);
  if (!out) throw IoError("cannot write CSV: " + out_csv);
  write_csv(out, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out_csv << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble latent-space-roadmap visual action planning"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread count");

  std::string config_path;
  std::string out_path;
  std::string dataset_path;
  std::string models_dir;
  std::string start_file;
  std::string goal_file;
  std::string sweep;
  bool naive = false;
  bool trace = false;

  CLI::App* gen = app.add_subcommand("gen-dataset", "Generate a dataset file");
  gen->add_option("--config", config_path)->required();
  gen->add_option("--out", out_path)->required();

  CLI::App* build = app.add_subcommand("build", "Build modules and roadmaps");
  build->add_option("--config", config_path)->required();
  build->add_option("--dataset", dataset_path)->required();
  build->add_option("--out", out_path)->required();

  CLI::App* plan = app.add_subcommand("plan", "Plan between two observations");
  plan->add_option("--config", config_path);
  plan->add_option("--models", models_dir)->required();
  plan->add_option("--start", start_file)->required();
  plan->add_option("--goal", goal_file)->required();
  plan->add_flag("--naive", naive, "Output all members' plans unselected");
  plan->add_flag("--trace", trace, "Dump the full score table");

  CLI::App* eval = app.add_subcommand("eval", "Run an evaluation sweep");
  eval->add_option("--config", config_path)->required();
  eval->add_option("--models", models_dir)->required();
  eval->add_option("--sweep", sweep)
      ->required()
      ->check(CLI::IsMember({"members", "cmax", "similarity"}));
  eval->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_thread_count(threads);

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      // An unreadable file is an I/O failure; a malformed one is a config
      // error.
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open config file: " + config_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      cfg = parse_config(ss.str());
    }
    if (gen->parsed()) cmd_gen_dataset(cfg, out_path);
    if (build->parsed()) cmd_build(cfg, dataset_path, out_path);
    if (plan->parsed())
      cmd_plan(cfg, models_dir, start_file, goal_file, naive, trace);
    if (eval->parsed()) cmd_eval(cfg, models_dir, sweep, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NoPlanError& e) {
    std::cerr << e.what() << "\n";
    return kExitNoPlan;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
