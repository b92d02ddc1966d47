#include "enslsr/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "enslsr/kernels.hpp"

namespace enslsr {

std::pair<std::vector<double>, std::vector<double>> preprocess_action_pair(
    const std::vector<Action>& a, const std::vector<Action>& b) {
  auto collapse = [](const std::vector<Action>& plan) {
    std::vector<double> v;
    v.reserve(plan.size() * 4);
    for (const Action& u : plan) {
      v.push_back(u.pick.x);
      v.push_back(u.pick.y);
      v.push_back(u.release.x);
      v.push_back(u.release.y);
    }
    return v;
  };
  std::vector<double> va = collapse(a);
  std::vector<double> vb = collapse(b);
  const std::size_t len = std::max(va.size(), vb.size());
  va.resize(len, 0.0);
  vb.resize(len, 0.0);
  return {std::move(va), std::move(vb)};
}

double action_sim_cosine(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::runtime_error("cosine similarity needs equal lengths");
  const double na = std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
  const double nb = std::sqrt(kernels::dot(b.data(), b.data(), b.size()));
  if (na == 0.0 && nb == 0.0) return 1.0;  // two zero-length plans agree
  if (na == 0.0 || nb == 0.0) return 0.0;
  double cosine = kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
  cosine = std::clamp(cosine, -1.0, 1.0);
  return 0.5 * (1.0 + cosine);
}

double node_sim_jaccard(const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] < b[ib])
      ++ia;
    else if (b[ib] < a[ia])
      ++ib;
    else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<double> action_sim_euclid(const std::vector<Action>& a,
                                        const std::vector<Action>& b) {
  if (a.size() != b.size()) return std::nullopt;
  auto [va, vb] = preprocess_action_pair(a, b);
  return -std::sqrt(kernels::sq_l2(va.data(), vb.data(), va.size()));
}

namespace {

double action_distance(const Action& a, const Action& b) {
  const double v[4] = {a.pick.x - b.pick.x, a.pick.y - b.pick.y,
                       a.release.x - b.release.x, a.release.y - b.release.y};
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

}  // namespace

double action_sim_edit(const std::vector<Action>& a,
                       const std::vector<Action>& b, const EditCosts& costs) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  std::vector<double> prev(nb + 1);
  std::vector<double> cur(nb + 1);
  for (std::size_t j = 0; j <= nb; ++j) prev[j] = j * costs.insertion;
  for (std::size_t i = 1; i <= na; ++i) {
    cur[0] = i * costs.deletion;
    for (std::size_t j = 1; j <= nb; ++j) {
      const bool match = action_distance(a[i - 1], b[j - 1]) < costs.tau;
      const double sub = prev[j - 1] + (match ? 0.0 : costs.substitution);
      cur[j] = std::min({prev[j] + costs.deletion, cur[j - 1] + costs.insertion,
                         sub});
    }
    std::swap(prev, cur);
  }
  return -prev[nb];
}

std::optional<double> node_sim_indiv(
    const std::vector<std::vector<std::int64_t>>& a,
    const std::vector<std::vector<std::int64_t>>& b) {
  if (a.size() != b.size()) return std::nullopt;
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    sum += node_sim_jaccard(a[t], b[t]);
  return sum;
}

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::CosinePlusJaccard:
      return "cosine+jaccard";
    case Measure::Cosine:
      return "cosine";
    case Measure::Jaccard:
      return "jaccard";
    case Measure::Euclid:
      return "euclid";
    case Measure::Edit:
      return "edit";
    case Measure::IndivJaccard:
      return "indiv_jaccard";
  }
  return "?";
}

Measure measure_from_name(const std::string& name) {
  for (Measure m : {Measure::CosinePlusJaccard, Measure::Cosine,
                    Measure::Jaccard, Measure::Euclid, Measure::Edit,
                    Measure::IndivJaccard})
    if (measure_name(m) == name) return m;
  throw std::runtime_error("unknown similarity measure: " + name);
}

namespace {

// Pairwise similarity under the configured measure; nullopt = no measure.
std::optional<BestMatch> compare(const VisualActionPlan& p,
                                 const VisualActionPlan& q,
                                 const MeasureConfig& cfg) {
  BestMatch m;
  m.peer_member = q.member_id;
  m.peer_path = q.path_id;
  switch (cfg.measure) {
    case Measure::CosinePlusJaccard: {
      const auto [va, vb] = preprocess_action_pair(p.action_plan, q.action_plan);
      m.s_u = action_sim_cosine(va, vb);
      m.s_n = node_sim_jaccard(p.composition_union, q.composition_union);
      m.s = m.s_u + m.s_n;
      return m;
    }
    case Measure::Cosine: {
      const auto [va, vb] = preprocess_action_pair(p.action_plan, q.action_plan);
      m.s_u = action_sim_cosine(va, vb);
      m.s = m.s_u;
      return m;
    }
    case Measure::Jaccard:
      m.s_n = node_sim_jaccard(p.composition_union, q.composition_union);
      m.s = m.s_n;
      return m;
    case Measure::Euclid: {
      const auto v = action_sim_euclid(p.action_plan, q.action_plan);
      if (!v) return std::nullopt;
      m.s_u = *v;
      m.s = *v;
      return m;
    }
    case Measure::Edit:
      m.s_u = action_sim_edit(p.action_plan, q.action_plan, cfg.edit_costs);
      m.s = m.s_u;
      return m;
    case Measure::IndivJaccard: {
      const auto v = node_sim_indiv(p.node_compositions, q.node_compositions);
      if (!v) return std::nullopt;
      m.s_n = *v;
      m.s = *v;
      return m;
    }
  }
  return std::nullopt;
}

}  // namespace

SelectionResult select_plans(const std::vector<PlanSet>& all_sets,
                             const MeasureConfig& cfg) {
  SelectionResult result;
  for (const PlanSet& set_i : all_sets) {
    for (const VisualActionPlan& plan : set_i.plans) {
      double score = 0.0;
      std::vector<BestMatch> matches;
      for (const PlanSet& set_k : all_sets) {
        if (set_k.member_id == set_i.member_id) continue;
        std::optional<BestMatch> best;
        for (const VisualActionPlan& peer : set_k.plans) {
          const auto m = compare(plan, peer, cfg);
          if (m && (!best || m->s > best->s)) best = m;
        }
        if (best) {
          score += best->s;
          matches.push_back(*best);
        } else {
          // Empty peer (or all comparisons without a measure) contributes 0.
          matches.push_back({set_k.member_id, -1, 0.0, 0.0, 0.0});
        }
      }
      result.score_table.push_back({plan.member_id, plan.path_id, score});
      result.trace.push_back(std::move(matches));
    }
  }

  if (result.score_table.empty()) return result;
  double max_score = result.score_table.front().score;
  for (const ScoredPlan& sp : result.score_table)
    max_score = std::max(max_score, sp.score);

  std::size_t flat = 0;
  for (const PlanSet& set_i : all_sets) {
    for (const VisualActionPlan& plan : set_i.plans) {
      if (result.score_table[flat].score >= max_score - 1e-9)
        result.selected.push_back(plan);
      ++flat;
    }
  }
  return result;
}

std::vector<VisualActionPlan> naive_select(
    const std::vector<PlanSet>& all_sets) {
  std::vector<VisualActionPlan> out;
  for (const PlanSet& set : all_sets)
    out.insert(out.end(), set.plans.begin(), set.plans.end());
  return out;
}

}  // namespace enslsr
