#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "enslsr/planner.hpp"

// Similarity measures over visual action plans and the ensemble selection
// algorithm (per-member best-match cumulative scoring), plus the naive
// baseline that returns every proposed plan.

namespace enslsr {

// Flat (p_x, p_y, r_x, r_y) per action, shorter vector zero-padded at the
// tail to the longer one's length.
std::pair<std::vector<double>, std::vector<double>> preprocess_action_pair(
    const std::vector<Action>& a, const std::vector<Action>& b);

// 0.5 * (1 + cos angle); both zero -> 1, exactly one zero -> 0.
double action_sim_cosine(const std::vector<double>& a,
                         const std::vector<double>& b);

// |a n b| / |a u b| over sorted index sets; both empty -> 1.
double node_sim_jaccard(const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b);

// -||a - b|| over collapsed vectors; no measure when lengths differ.
std::optional<double> action_sim_euclid(const std::vector<Action>& a,
                                        const std::vector<Action>& b);

struct EditCosts {
  double insertion = 0.5;
  double deletion = 1.0;
  double substitution = 1.0;
  double tau = 0.5;  // actions match when ||u_i - u_j|| < tau
};

// Negative minimal-cost edit distance between the action sequences.
double action_sim_edit(const std::vector<Action>& a,
                       const std::vector<Action>& b,
                       const EditCosts& costs = {});

// Sum of positional Jaccard similarities over aligned node compositions;
// no measure when plan lengths differ.
std::optional<double> node_sim_indiv(
    const std::vector<std::vector<std::int64_t>>& a,
    const std::vector<std::vector<std::int64_t>>& b);

enum class Measure {
  CosinePlusJaccard,  // s^u + s^n (the default)
  Cosine,
  Jaccard,
  Euclid,
  Edit,
  IndivJaccard,
};

std::string measure_name(Measure m);
Measure measure_from_name(const std::string& name);

struct MeasureConfig {
  Measure measure = Measure::CosinePlusJaccard;
  EditCosts edit_costs;
};

struct ScoredPlan {
  int member_id = 0;
  int path_id = 0;
  double score = 0.0;
};

struct BestMatch {
  int peer_member = 0;
  int peer_path = -1;  // -1 when the peer had no comparable plan
  double s_u = 0.0;
  double s_n = 0.0;
  double s = 0.0;
};

struct SelectionResult {
  std::vector<VisualActionPlan> selected;  // the maximizers, in (i, j) order
  std::vector<ScoredPlan> score_table;
  // Parallel to score_table: per-peer best matches, for the --trace dump.
  std::vector<std::vector<BestMatch>> trace;
};

// Cumulative comparison scoring: for each plan, sum over the other members
// the best similarity against that member's plans; members with no
// comparable plan contribute 0. All plans within 1e-9 of the maximum score
// are selected.
SelectionResult select_plans(const std::vector<PlanSet>& all_sets,
                             const MeasureConfig& cfg = {});

// Naive ensemble baseline: every member's every plan.
std::vector<VisualActionPlan> naive_select(const std::vector<PlanSet>& all_sets);

}  // namespace enslsr
