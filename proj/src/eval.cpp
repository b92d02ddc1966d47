#include "enslsr/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "enslsr/parallel.hpp"
#include "enslsr/rng.hpp"

namespace enslsr {

std::vector<EvalPair> make_eval_pairs(Task task, int n_pairs,
                                      std::uint64_t harness_seed) {
  std::vector<EvalPair> pairs(n_pairs);
  parallel_for(n_pairs, [&](std::size_t i) {
    const std::uint64_t seed = hash_combine(harness_seed, i);
    auto [start, goal] =
        sample_eval_pair(task, seed, 1000000 + 2 * static_cast<std::int64_t>(i));
    pairs[i] = {static_cast<int>(i), std::move(start), std::move(goal)};
  });
  return pairs;
}

std::vector<std::vector<PlanSet>> compute_plan_sets(
    const std::vector<Member>& members, const std::vector<EvalPair>& pairs,
    int max_paths) {
  std::vector<std::vector<PlanSet>> out(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t pi) {
    out[pi].reserve(members.size());
    for (std::size_t mi = 0; mi < members.size(); ++mi)
      out[pi].push_back(plan_member(members[mi], static_cast<int>(mi),
                                    pairs[pi].start, pairs[pi].goal,
                                    max_paths));
  });
  return out;
}

EvalRecord judge_plans(const EvalPair& pair,
                       const std::vector<VisualActionPlan>& plans,
                       bool truncated) {
  EvalRecord rec;
  rec.pair_id = pair.pair_id;
  rec.n_plans = static_cast<int>(plans.size());
  rec.path_found = !plans.empty();
  rec.truncated = truncated;
  rec.all_correct = rec.path_found;
  for (const VisualActionPlan& plan : plans) {
    rec.plan_lengths.push_back(static_cast<int>(plan.action_plan.size()));
    const bool ok = verify_actions(pair.start, pair.goal, plan.action_plan);
    rec.any_correct = rec.any_correct || ok;
    rec.all_correct = rec.all_correct && ok;
  }
  return rec;
}

MetricSummary summarize(const std::string& system,
                        const std::vector<EvalRecord>& records) {
  MetricSummary s;
  s.system = system;
  s.n = static_cast<int>(records.size());
  int all = 0, any = 0, exists = 0;
  for (const EvalRecord& r : records) {
    all += r.all_correct ? 1 : 0;
    any += r.any_correct ? 1 : 0;
    exists += r.path_found ? 1 : 0;
    s.n_truncated += r.truncated ? 1 : 0;
  }
  if (s.n > 0) {
    s.pct_all = 100.0 * all / s.n;
    s.pct_any = 100.0 * any / s.n;
    s.pct_exists = 100.0 * exists / s.n;
  }
  return s;
}

std::vector<EvalRecord> eval_single_member(
    const std::vector<std::vector<PlanSet>>& plan_sets,
    const std::vector<EvalPair>& pairs, int member_idx) {
  std::vector<EvalRecord> records(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t pi) {
    const PlanSet& set = plan_sets[pi][member_idx];
    records[pi] = judge_plans(pairs[pi], set.plans, set.truncated);
  });
  return records;
}

std::vector<EvalRecord> eval_ensemble(
    const std::vector<std::vector<PlanSet>>& plan_sets,
    const std::vector<EvalPair>& pairs, int m, const MeasureConfig& cfg) {
  std::vector<EvalRecord> records(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t pi) {
    const std::vector<PlanSet> sets(plan_sets[pi].begin(),
                                    plan_sets[pi].begin() + m);
    bool truncated = false;
    for (const PlanSet& s : sets) truncated = truncated || s.truncated;
    const SelectionResult sel = select_plans(sets, cfg);
    records[pi] = judge_plans(pairs[pi], sel.selected, truncated);
  });
  return records;
}

std::vector<EvalRecord> eval_naive(
    const std::vector<std::vector<PlanSet>>& plan_sets,
    const std::vector<EvalPair>& pairs, int m) {
  std::vector<EvalRecord> records(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t pi) {
    const std::vector<PlanSet> sets(plan_sets[pi].begin(),
                                    plan_sets[pi].begin() + m);
    bool truncated = false;
    for (const PlanSet& s : sets) truncated = truncated || s.truncated;
    records[pi] = judge_plans(pairs[pi], naive_select(sets), truncated);
  });
  return records;
}

namespace {

CsvRow row_from(const std::string& experiment, const MetricSummary& s, int m,
                int c_max, const std::string& measure, std::uint64_t seed) {
  CsvRow r;
  r.experiment = experiment;
  r.system = s.system;
  r.m = m;
  r.c_max = c_max;
  r.measure = measure;
  r.seed = seed;
  r.pct_all = s.pct_all;
  r.pct_any = s.pct_any;
  r.pct_exists = s.pct_exists;
  r.n_pairs = s.n;
  r.n_truncated = s.n_truncated;
  return r;
}

}  // namespace

std::vector<CsvRow> sweep_members(const std::vector<Member>& members,
                                  const std::vector<EvalPair>& pairs,
                                  int c_max, std::uint64_t harness_seed,
                                  const MeasureConfig& cfg, int max_paths) {
  const auto plan_sets = compute_plan_sets(members, pairs, max_paths);
  const int n_members = static_cast<int>(members.size());
  const std::string measure = measure_name(cfg.measure);

  // Individual member metrics are m-independent; compute them once.
  std::vector<MetricSummary> indiv(n_members);
  for (int mi = 0; mi < n_members; ++mi)
    indiv[mi] = summarize("indiv", eval_single_member(plan_sets, pairs, mi));

  std::vector<CsvRow> rows;
  for (int m = std::min(3, n_members); m <= n_members; ++m) {
    const MetricSummary ens =
        summarize("ens-lsr", eval_ensemble(plan_sets, pairs, m, cfg));
    const MetricSummary naive =
        summarize("naive", eval_naive(plan_sets, pairs, m));
    rows.push_back(row_from("members", ens, m, c_max, measure, harness_seed));
    rows.push_back(row_from("members", naive, m, c_max, measure, harness_seed));

    MetricSummary mean{"indiv-mean"}, lo{"indiv-min"}, hi{"indiv-max"};
    mean.n = lo.n = hi.n = indiv[0].n;
    lo.pct_all = hi.pct_all = indiv[0].pct_all;
    lo.pct_any = hi.pct_any = indiv[0].pct_any;
    lo.pct_exists = hi.pct_exists = indiv[0].pct_exists;
    for (int mi = 0; mi < m; ++mi) {
      mean.pct_all += indiv[mi].pct_all / m;
      mean.pct_any += indiv[mi].pct_any / m;
      mean.pct_exists += indiv[mi].pct_exists / m;
      mean.n_truncated = std::max(mean.n_truncated, indiv[mi].n_truncated);
      lo.pct_all = std::min(lo.pct_all, indiv[mi].pct_all);
      lo.pct_any = std::min(lo.pct_any, indiv[mi].pct_any);
      lo.pct_exists = std::min(lo.pct_exists, indiv[mi].pct_exists);
      hi.pct_all = std::max(hi.pct_all, indiv[mi].pct_all);
      hi.pct_any = std::max(hi.pct_any, indiv[mi].pct_any);
      hi.pct_exists = std::max(hi.pct_exists, indiv[mi].pct_exists);
    }
    rows.push_back(row_from("members", mean, m, c_max, measure, harness_seed));
    rows.push_back(row_from("members", lo, m, c_max, measure, harness_seed));
    rows.push_back(row_from("members", hi, m, c_max, measure, harness_seed));
  }
  return rows;
}

std::vector<CsvRow> sweep_cmax(const std::vector<Member>& members,
                               const std::vector<int>& cmax_values,
                               const std::vector<EvalPair>& pairs,
                               std::uint64_t harness_seed,
                               const MeasureConfig& cfg, int max_paths) {
  const auto plan_sets = compute_plan_sets(members, pairs, max_paths);
  const std::string measure = measure_name(cfg.measure);
  std::vector<CsvRow> rows;
  const int n_members = static_cast<int>(members.size());
  const MetricSummary ens = summarize(
      "ens-lsr", eval_ensemble(plan_sets, pairs, n_members, cfg));
  // c_max = -1 marks the ensemble over all members.
  rows.push_back(row_from("cmax", ens, n_members, -1, measure, harness_seed));
  for (int mi = 0; mi < n_members; ++mi) {
    const MetricSummary s =
        summarize("s-lsr", eval_single_member(plan_sets, pairs, mi));
    rows.push_back(
        row_from("cmax", s, 1, cmax_values[mi], measure, harness_seed));
  }
  return rows;
}

std::vector<CsvRow> sweep_similarity(const std::vector<Member>& members,
                                     const std::vector<EvalPair>& pairs,
                                     int c_max, std::uint64_t harness_seed,
                                     const EditCosts& edit_costs,
                                     int max_paths) {
  const auto plan_sets = compute_plan_sets(members, pairs, max_paths);
  const int n_members = static_cast<int>(members.size());
  std::vector<CsvRow> rows;
  for (int m = std::min(3, n_members); m <= n_members; ++m) {
    for (Measure measure :
         {Measure::CosinePlusJaccard, Measure::Cosine, Measure::Jaccard,
          Measure::Euclid, Measure::Edit, Measure::IndivJaccard}) {
      MeasureConfig cfg{measure, edit_costs};
      const MetricSummary s =
          summarize("ens-lsr", eval_ensemble(plan_sets, pairs, m, cfg));
      rows.push_back(row_from("similarity", s, m, c_max,
                              measure_name(measure), harness_seed));
    }
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << "experiment,system,m,c_max,measure,seed,pct_all,pct_any,pct_exists,"
        "n_pairs,n_truncated\n";
  char buf[64];
  auto pct = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  for (const CsvRow& r : rows) {
    os << r.experiment << ',' << r.system << ',' << r.m << ',' << r.c_max
       << ',' << r.measure << ',' << r.seed << ',' << pct(r.pct_all) << ','
       << pct(r.pct_any) << ',' << pct(r.pct_exists) << ',' << r.n_pairs
       << ',' << r.n_truncated << '\n';
  }
}

}  // namespace enslsr
