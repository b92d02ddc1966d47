#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "enslsr/tasksim.hpp"

// Black-box tests of the command-line binary; its path arrives as argv[1].

namespace {

std::string g_cli;
std::filesystem::path g_dir;

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = g_cli + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file;
  cmd += " 2> " + (g_dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::filesystem::path cfg_path() { return g_dir / "config.json"; }

}  // namespace

TEST_CASE("gen-dataset writes a deterministic dataset of the right size") {
  spit(cfg_path(), R"({
    "task": "harvesting",
    "dataset": {"n_tuples": 400, "seed": 3},
    "mapping": {"sigma_noise": 0.0, "p_merge": 0.0, "p_split": 0.0,
                "seeds": [1, 2]},
    "eval": {"n_pairs": 10, "harness_seed": 1}
  })");
  const auto ds = (g_dir / "data.jsonl").string();
  REQUIRE(run("gen-dataset --config " + cfg_path().string() + " --out " + ds) ==
          0);
  std::ifstream in(ds);
  const auto tuples = enslsr::read_dataset(in);
  CHECK(tuples.size() == 400);
  const std::string first = slurp(ds);
  REQUIRE(run("gen-dataset --config " + cfg_path().string() + " --out " + ds) ==
          0);
  CHECK(slurp(ds) == first);  // byte-identical rerun
}

TEST_CASE("build emits one module per seed and one roadmap per pair") {
  const auto ds = (g_dir / "data.jsonl").string();
  const auto models = (g_dir / "models").string();
  REQUIRE(run("build --config " + cfg_path().string() + " --dataset " + ds +
              " --out " + models) == 0);
  for (const char* f : {"module_s1.json", "module_s2.json",
                        "roadmap_s1_c20.json", "roadmap_s2_c20.json",
                        "manifest.json"})
    CHECK(std::filesystem::exists(std::filesystem::path(models) / f));
}

TEST_CASE("plan prints plans forward and exits 4 against the task arrow") {
  const auto ds = (g_dir / "data.jsonl").string();
  const auto models = (g_dir / "models").string();
  std::ifstream in(ds);
  const auto tuples = enslsr::read_dataset(in);
  // A vine->box transition: forward is plannable, backward is impossible.
  const enslsr::TransitionTuple* moved = nullptr;
  for (const auto& t : tuples)
    if (t.rho.has_action && !(t.first.state == t.second.state)) {
      moved = &t;
      break;
    }
  REQUIRE(moved != nullptr);
  spit(g_dir / "start.json", enslsr::observation_to_json(moved->first));
  spit(g_dir / "goal.json", enslsr::observation_to_json(moved->second));
  const std::string fwd = "plan --models " + models + " --start " +
                          (g_dir / "start.json").string() + " --goal " +
                          (g_dir / "goal.json").string();
  REQUIRE(run(fwd, (g_dir / "plan.txt").string()) == 0);
  CHECK(!slurp(g_dir / "plan.txt").empty());
  // --naive and --trace also succeed.
  CHECK(run(fwd + " --naive", (g_dir / "naive.txt").string()) == 0);
  CHECK(run(fwd + " --trace", (g_dir / "trace.txt").string()) == 0);
  CHECK(slurp(g_dir / "trace.txt").size() >= slurp(g_dir / "plan.txt").size());

  // Reversed direction: bunches cannot leave the box, so no member can plan.
  const std::string bwd = "plan --models " + models + " --start " +
                          (g_dir / "goal.json").string() + " --goal " +
                          (g_dir / "start.json").string();
  CHECK(run(bwd) == 4);
}

TEST_CASE("eval writes the documented csv schema deterministically") {
  const auto models = (g_dir / "models").string();
  const auto csv = (g_dir / "out.csv").string();
  REQUIRE(run("eval --config " + cfg_path().string() + " --models " + models +
              " --sweep members --out " + csv) == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("experiment,system,m,c_max,measure,seed,pct_all,pct_any,"
                   "pct_exists,n_pairs,n_truncated\n",
                   0) == 0);
  CHECK(text.find("\nens-lsr,") == std::string::npos);  // experiment first
  CHECK(text.find("members,ens-lsr,") != std::string::npos);
  REQUIRE(run("eval --config " + cfg_path().string() + " --models " + models +
              " --sweep members --out " + csv) == 0);
  CHECK(slurp(csv) == text);
}

TEST_CASE("config errors exit 2 and name the offending field") {
  spit(g_dir / "bad.json", R"({"dataset":{"frac_no_action":1.5}})");
  CHECK(run("gen-dataset --config " + (g_dir / "bad.json").string() +
            " --out " + (g_dir / "x.jsonl").string()) == 2);
  CHECK(slurp(g_dir / "stderr.txt").find("frac_no_action") !=
        std::string::npos);
  spit(g_dir / "unknown.json", R"({"dataset":{"n_tuple":5}})");
  CHECK(run("gen-dataset --config " + (g_dir / "unknown.json").string() +
            " --out " + (g_dir / "x.jsonl").string()) == 2);
}

TEST_CASE("i/o failures exit 3") {
  CHECK(run("gen-dataset --config " + (g_dir / "absent.json").string() +
            " --out " + (g_dir / "x.jsonl").string()) == 3);
  CHECK(run("build --config " + cfg_path().string() + " --dataset " +
            (g_dir / "missing.jsonl").string() + " --out " +
            (g_dir / "m2").string()) == 3);
}

int main(int argc, char** argv) {
  doctest::Context context;
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary>\n");
    return 1;
  }
  g_cli = argv[1];
  g_dir = std::filesystem::temp_directory_path() / "enslsr_cli_test";
  std::filesystem::remove_all(g_dir);
  std::filesystem::create_directories(g_dir);
  const int rc = context.run();
  std::filesystem::remove_all(g_dir);
  return rc;
}
