#include "enslsr/eval.hpp"

#include <set>
#include <sstream>

#include "doctest.h"
#include "enslsr/roadmap.hpp"

using namespace enslsr;

namespace {

std::vector<Member> build_members(Task task, int n_members,
                                  const MappingConfig& mc, int c_max,
                                  int n_tuples = 500) {
  const auto data = generate_dataset({task, n_tuples, 0.2, 1, 10});
  std::vector<Member> members;
  RoadmapBuildConfig rcfg;
  rcfg.c_max = c_max;
  rcfg.directed = task == Task::Harvesting;
  for (int i = 0; i < n_members; ++i) {
    auto mod = MappingModule::make(data, static_cast<std::uint64_t>(i + 1), mc);
    auto rm = build_roadmap(data, mod, rcfg);
    members.push_back({std::move(mod), std::move(rm)});
  }
  return members;
}

MappingConfig clean_config() {
  MappingConfig cfg;
  cfg.sigma_noise = 0.0;
  cfg.p_merge = 0.0;
  cfg.p_split = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("eval pairs are deterministic with distinct ids and indices") {
  const auto p1 = make_eval_pairs(Task::Stacking, 40, 3);
  const auto p2 = make_eval_pairs(Task::Stacking, 40, 3);
  REQUIRE(p1.size() == 40);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i].pair_id == static_cast<int>(i));
    CHECK(p1[i].start.state == p2[i].start.state);
    CHECK(p1[i].goal.state == p2[i].goal.state);
    CHECK(p1[i].start.index != p1[i].goal.index);
    CHECK(p1[i].start.index >= 1000000);
  }
  // A different harness seed moves the pairs.
  const auto p3 = make_eval_pairs(Task::Stacking, 40, 4);
  bool any_diff = false;
  for (std::size_t i = 0; i < p1.size(); ++i)
    if (!(p1[i].start.state == p3[i].start.state)) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("metric ordering holds and summaries count correctly") {
  std::vector<EvalRecord> recs(4);
  // found+all, found+any-only, found+none, no path.
  recs[0] = {0, 2, true, true, true, false, {2, 2}};
  recs[1] = {1, 2, false, true, true, false, {2, 2}};
  recs[2] = {2, 1, false, false, true, true, {3}};
  recs[3] = {3, 0, false, false, false, false, {}};
  const MetricSummary s = summarize("x", recs);
  CHECK(s.pct_all == doctest::Approx(25.0));
  CHECK(s.pct_any == doctest::Approx(50.0));
  CHECK(s.pct_exists == doctest::Approx(75.0));
  CHECK(s.n == 4);
  CHECK(s.n_truncated == 1);
  CHECK(s.pct_all <= s.pct_any);
  CHECK(s.pct_any <= s.pct_exists);
}

TEST_CASE("judge_plans distinguishes all/any/exists") {
  const auto pairs = make_eval_pairs(Task::Stacking, 1, 9);
  const EvalPair& pr = pairs.front();
  // A correct plan from the ground-truth oracle plus a wrong (empty) one.
  const auto oracle = bfs_plan(pr.start.state, pr.goal.state);
  REQUIRE(oracle.has_value());
  VisualActionPlan good;
  good.action_plan = *oracle;
  VisualActionPlan bad;  // zero-length, states differ -> wrong
  const EvalRecord both = judge_plans(pr, {good, bad}, false);
  CHECK(both.path_found);
  CHECK(both.any_correct);
  CHECK(!both.all_correct);
  const EvalRecord only_good = judge_plans(pr, {good}, false);
  CHECK(only_good.all_correct);
  const EvalRecord none = judge_plans(pr, {}, false);
  CHECK(!none.path_found);
  CHECK(!none.any_correct);
}

TEST_CASE("noise-free single member scores perfectly on stacking") {
  // 4000 tuples so the train subset covers and connects all 288 states.
  const auto members =
      build_members(Task::Stacking, 1, clean_config(), 20, 4000);
  const auto pairs = make_eval_pairs(Task::Stacking, 50, 1);
  const auto plan_sets = compute_plan_sets(members, pairs);
  const auto recs = eval_single_member(plan_sets, pairs, 0);
  const MetricSummary s = summarize("single", recs);
  CHECK(s.pct_all == 100.0);
  CHECK(s.pct_exists == 100.0);
}

TEST_CASE("ensemble finds a path exactly when some member does") {
  MappingConfig mc;
  mc.sigma_noise = 0.25;
  mc.p_merge = 0.002;
  mc.p_split = 0.02;
  const auto members = build_members(Task::Harvesting, 4, mc, 10);
  const auto pairs = make_eval_pairs(Task::Harvesting, 60, 2);
  const auto plan_sets = compute_plan_sets(members, pairs);
  const auto ens = eval_ensemble(plan_sets, pairs, 4);
  const auto naive = eval_naive(plan_sets, pairs, 4);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    bool member_found = false;
    for (int i = 0; i < 4; ++i)
      if (!plan_sets[p][i].plans.empty()) member_found = true;
    CHECK(ens[p].path_found == member_found);
    CHECK(naive[p].path_found == member_found);
  }
}

TEST_CASE("sweep_members emits the documented row block per m") {
  MappingConfig mc;
  mc.sigma_noise = 0.25;
  const auto members = build_members(Task::Stacking, 5, mc, 20);
  const auto pairs = make_eval_pairs(Task::Stacking, 30, 5);
  const auto rows = sweep_members(members, pairs, 20, 5);
  // m runs 3..5; five systems per m.
  REQUIRE(rows.size() == 3 * 5);
  std::size_t r = 0;
  for (int m = 3; m <= 5; ++m)
    for (const std::string& sys :
         {"ens-lsr", "naive", "indiv-mean", "indiv-min", "indiv-max"}) {
      CHECK(rows[r].system == sys);
      CHECK(rows[r].m == m);
      CHECK(rows[r].experiment == "members");
      CHECK(rows[r].n_pairs == 30);
      CHECK(rows[r].seed == 5);
      ++r;
    }
  // Individual min <= mean <= max per block.
  for (std::size_t base = 0; base < rows.size(); base += 5) {
    CHECK(rows[base + 3].pct_all <= rows[base + 2].pct_all + 1e-12);
    CHECK(rows[base + 2].pct_all <= rows[base + 4].pct_all + 1e-12);
  }
}

TEST_CASE("sweep_cmax labels members by their c_max and prepends ensemble") {
  const auto data = generate_dataset({Task::Harvesting, 400, 0.2, 2, 10});
  MappingConfig mc;
  mc.sigma_noise = 0.25;
  const auto mod = MappingModule::make(data, 1, mc);
  const std::vector<int> cmaxes{1, 10, 20};
  std::vector<Member> members;
  for (int c : cmaxes) {
    RoadmapBuildConfig rcfg;
    rcfg.c_max = c;
    rcfg.directed = true;
    members.push_back({mod, build_roadmap(data, mod, rcfg)});
  }
  const auto pairs = make_eval_pairs(Task::Harvesting, 30, 7);
  const auto rows = sweep_cmax(members, cmaxes, pairs, 7);
  REQUIRE(rows.size() == 1 + cmaxes.size());
  CHECK(rows[0].system == "ens-lsr");
  CHECK(rows[0].c_max == -1);
  for (std::size_t i = 0; i < cmaxes.size(); ++i) {
    CHECK(rows[1 + i].system == "s-lsr");
    CHECK(rows[1 + i].c_max == cmaxes[i]);
    CHECK(rows[0].pct_exists >= rows[1 + i].pct_exists);  // ensemble union
  }
}

TEST_CASE("sweep_similarity emits six measures per m") {
  MappingConfig mc;
  mc.sigma_noise = 0.25;
  const auto members = build_members(Task::Stacking, 3, mc, 20);
  const auto pairs = make_eval_pairs(Task::Stacking, 20, 11);
  const auto rows = sweep_similarity(members, pairs, 20, 11);
  REQUIRE(rows.size() == 6);  // m fixed at 3 here: one block
  std::set<std::string> measures;
  for (const CsvRow& r : rows) {
    measures.insert(r.measure);
    CHECK(r.experiment == "similarity");
    CHECK(r.m == 3);
  }
  CHECK(measures.size() == 6);
}

TEST_CASE("csv output is stable, ordered and headed") {
  CsvRow row;
  row.experiment = "members";
  row.system = "ens-lsr";
  row.m = 10;
  row.c_max = 20;
  row.measure = "cosine+jaccard";
  row.seed = 3;
  row.pct_all = 98.7654321;
  row.pct_any = 99.0;
  row.pct_exists = 100.0;
  row.n_pairs = 1000;
  row.n_truncated = 2;
  std::ostringstream os;
  write_csv(os, {row});
  CHECK(os.str() ==
        "experiment,system,m,c_max,measure,seed,pct_all,pct_any,pct_exists,"
        "n_pairs,n_truncated\n"
        "members,ens-lsr,10,20,cosine+jaccard,3,98.7654,99.0000,100.0000,"
        "1000,2\n");
}

TEST_CASE("sweeps are byte-identical across reruns") {
  MappingConfig mc;
  mc.sigma_noise = 0.25;
  const auto members = build_members(Task::Stacking, 3, mc, 20, 300);
  const auto pairs = make_eval_pairs(Task::Stacking, 20, 13);
  std::ostringstream a, b;
  write_csv(a, sweep_members(members, pairs, 20, 13));
  write_csv(b, sweep_members(members, pairs, 20, 13));
  CHECK(a.str() == b.str());
}
