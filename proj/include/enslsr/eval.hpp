#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "enslsr/ensemble.hpp"
#include "enslsr/planner.hpp"

// Desk-scale planning experiments: % all / % any / % exists
// metrics, member-count sweeps, c_max sweeps and similarity ablations,
// with deterministic CSV output.

namespace enslsr {

struct EvalPair {
  int pair_id = 0;
  Observation start;
  Observation goal;
};

struct EvalRecord {
  int pair_id = 0;
  int n_plans = 0;
  bool all_correct = false;
  bool any_correct = false;
  bool path_found = false;
  bool truncated = false;
  std::vector<int> plan_lengths;
};

struct MetricSummary {
  std::string system;
  double pct_all = 0.0;
  double pct_any = 0.0;
  double pct_exists = 0.0;
  int n = 0;
  int n_truncated = 0;
};

struct CsvRow {
  std::string experiment;
  std::string system;
  int m = 0;
  int c_max = 0;
  std::string measure;
  std::uint64_t seed = 0;
  double pct_all = 0.0;
  double pct_any = 0.0;
  double pct_exists = 0.0;
  int n_pairs = 0;
  int n_truncated = 0;
};

std::vector<EvalPair> make_eval_pairs(Task task, int n_pairs,
                                      std::uint64_t harness_seed);

// Per-pair plan sets for every member, computed in parallel over pairs;
// result[pair][member].
std::vector<std::vector<PlanSet>> compute_plan_sets(
    const std::vector<Member>& members, const std::vector<EvalPair>& pairs,
    int max_paths = kDefaultMaxPaths);

EvalRecord judge_plans(const EvalPair& pair,
                       const std::vector<VisualActionPlan>& plans,
                       bool truncated);

MetricSummary summarize(const std::string& system,
                        const std::vector<EvalRecord>& records);

// Systems over precomputed plan sets. `m` uses the first m members.
std::vector<EvalRecord> eval_single_member(
    const std::vector<std::vector<PlanSet>>& plan_sets,
    const std::vector<EvalPair>& pairs, int member_idx);
std::vector<EvalRecord> eval_ensemble(
    const std::vector<std::vector<PlanSet>>& plan_sets,
    const std::vector<EvalPair>& pairs, int m, const MeasureConfig& cfg = {});
std::vector<EvalRecord> eval_naive(
    const std::vector<std::vector<PlanSet>>& plan_sets,
    const std::vector<EvalPair>& pairs, int m);

std::vector<CsvRow> sweep_members(const std::vector<Member>& members,
                                  const std::vector<EvalPair>& pairs,
                                  int c_max, std::uint64_t harness_seed,
                                  const MeasureConfig& cfg = {},
                                  int max_paths = kDefaultMaxPaths);

// `cmax_values[i]` labels members[i]; all members share one mapping module.
std::vector<CsvRow> sweep_cmax(const std::vector<Member>& members,
                               const std::vector<int>& cmax_values,
                               const std::vector<EvalPair>& pairs,
                               std::uint64_t harness_seed,
                               const MeasureConfig& cfg = {},
                               int max_paths = kDefaultMaxPaths);

std::vector<CsvRow> sweep_similarity(const std::vector<Member>& members,
                                     const std::vector<EvalPair>& pairs,
                                     int c_max, std::uint64_t harness_seed,
                                     const EditCosts& edit_costs = {},
                                     int max_paths = kDefaultMaxPaths);

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);

}  // namespace enslsr
