#include "enslsr/mapping.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "enslsr/kernels.hpp"
#include "enslsr/rng.hpp"
#include "json.hpp"

namespace enslsr {

using nlohmann::json;

namespace {

std::uint64_t hash_double(std::uint64_t h, double v) {
  return hash_combine(h, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t nuisance_key(const Nuisance& n) {
  std::uint64_t h = 0x6e75697361ULL;
  for (const Vec2& v : n.jitter) {
    h = hash_double(h, v.x);
    h = hash_double(h, v.y);
  }
  h = hash_double(h, n.lighting);
  for (double v : n.scale) h = hash_double(h, v);
  for (double v : n.orientation) h = hash_double(h, v);
  for (std::uint8_t v : n.variant) h = hash_combine(h, v);
  return h;
}

}  // namespace

MappingModule MappingModule::make(const std::vector<TransitionTuple>& dataset,
                                  std::uint64_t model_seed,
                                  const MappingConfig& cfg) {
  if (dataset.empty()) throw std::runtime_error("dataset must be nonempty");
  MappingModule m;
  m.model_seed_ = model_seed;
  m.cfg_ = cfg;

  // Deterministic 85% (by default) tuple subset.
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(hash_combine(model_seed, hash_bytes("subset")));
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.next_below(i + 1)]);
  std::size_t keep = static_cast<std::size_t>(cfg.subset_fraction * n);
  keep = std::clamp<std::size_t>(keep, 1, n);
  m.train_subset_.assign(order.begin(), order.begin() + keep);
  std::sort(m.train_subset_.begin(), m.train_subset_.end());

  m.build_tables(dataset);
  return m;
}

void MappingModule::build_tables(const std::vector<TransitionTuple>& dataset) {
  // Merge/split error tables over the distinct states of the full dataset.
  std::set<std::string> state_set;
  for (const TransitionTuple& t : dataset) {
    state_set.insert(canonical_state(t.first.state));
    state_set.insert(canonical_state(t.second.state));
  }
  const std::vector<std::string> states(state_set.begin(), state_set.end());

  // Union-find over merge events so chained merges stay consistent.
  std::vector<std::size_t> parent(states.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  if (cfg_.p_merge > 0.0) {
    const std::uint64_t mk = hash_combine(model_seed_, hash_bytes("merge"));
    for (std::size_t i = 0; i < states.size(); ++i) {
      const std::uint64_t hi = hash_bytes(states[i], mk);
      for (std::size_t j = i + 1; j < states.size(); ++j) {
        Rng pair_rng(hash_combine(hi, hash_bytes(states[j])));
        if (pair_rng.next_bernoulli(cfg_.p_merge)) {
          const std::size_t a = find(i);
          const std::size_t b = find(j);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::size_t r = find(i);
    if (r != i) merge_rep_[states[i]] = states[r];
  }

  if (cfg_.p_split > 0.0) {
    const std::uint64_t sk = hash_combine(model_seed_, hash_bytes("split"));
    for (const std::string& s : states) {
      Rng state_rng(hash_bytes(s, sk));
      if (state_rng.next_bernoulli(cfg_.p_split)) split_.insert(s);
    }
  }

  // Training observations (unique by index) from the subset tuples.
  std::map<std::int64_t, Observation> by_index;
  for (std::size_t ti : train_subset_) {
    by_index.emplace(dataset[ti].first.index, dataset[ti].first);
    by_index.emplace(dataset[ti].second.index, dataset[ti].second);
  }
  train_obs_.reserve(by_index.size());
  for (auto& [idx, obs] : by_index) train_obs_.push_back(obs);

  train_lat_.reserve(train_obs_.size() * cfg_.d);
  for (const Observation& obs : train_obs_) {
    const std::vector<double> z = encode(obs);
    train_lat_.insert(train_lat_.end(), z.begin(), z.end());
  }
}

std::vector<double> MappingModule::state_centroid(const SystemState& s,
                                                  int which) const {
  std::string canon = canonical_state(s);
  if (auto it = merge_rep_.find(canon); it != merge_rep_.end())
    canon = it->second;
  const std::uint64_t key = hash_combine(
      hash_combine(model_seed_, hash_bytes("centroid")),
      hash_combine(hash_bytes(canon), static_cast<std::uint64_t>(which)));
  return keyed_unit_vector(key, cfg_.d);
}

bool MappingModule::is_split(const SystemState& s) const {
  return split_.contains(canonical_state(s));
}

std::vector<double> MappingModule::encode(const Observation& obs) const {
  int which = 0;
  if (is_split(obs.state)) {
    // Route to one of the two centroids by nuisance hash parity.
    const std::uint64_t h = hash_combine(
        nuisance_key(obs.nuisance), static_cast<std::uint64_t>(obs.index));
    which = static_cast<int>(h & 1u);
  }
  std::vector<double> z = state_centroid(obs.state, which);
  if (cfg_.sigma_noise > 0.0) {
    const std::uint64_t nk = hash_combine(
        hash_combine(model_seed_, hash_bytes("eta")),
        hash_combine(nuisance_key(obs.nuisance),
                     static_cast<std::uint64_t>(obs.index)));
    const std::vector<double> eta = keyed_unit_vector(nk, cfg_.d);
    for (int i = 0; i < cfg_.d; ++i) z[i] += cfg_.sigma_noise * eta[i];
  }
  return z;
}

const Observation& MappingModule::decode(const std::vector<double>& z) const {
  if (train_obs_.empty()) throw std::runtime_error("module has no training data");
  const std::size_t i = kernels::argmin_sq_l2(z.data(), train_lat_.data(),
                                              train_obs_.size(), cfg_.d);
  return train_obs_[i];
}

void MappingModule::save(std::ostream& os) const {
  json j;
  j["model_seed"] = model_seed_;
  j["d"] = cfg_.d;
  j["sigma_noise"] = cfg_.sigma_noise;
  j["p_merge"] = cfg_.p_merge;
  j["p_split"] = cfg_.p_split;
  j["subset_fraction"] = cfg_.subset_fraction;
  j["train_subset"] = train_subset_;
  j["format_version"] = 1;
  os << j.dump() << '\n';
}

MappingModule MappingModule::load(std::istream& is,
                                  const std::vector<TransitionTuple>& dataset) {
  json j;
  is >> j;
  if (j.at("format_version").get<int>() != 1)
    throw std::runtime_error("unsupported module format_version");
  MappingModule m;
  m.model_seed_ = j.at("model_seed").get<std::uint64_t>();
  m.cfg_.d = j.at("d").get<int>();
  m.cfg_.sigma_noise = j.at("sigma_noise").get<double>();
  m.cfg_.p_merge = j.at("p_merge").get<double>();
  m.cfg_.p_split = j.at("p_split").get<double>();
  m.cfg_.subset_fraction = j.at("subset_fraction").get<double>();
  m.train_subset_ = j.at("train_subset").get<std::vector<std::size_t>>();
  for (std::size_t ti : m.train_subset_)
    if (ti >= dataset.size())
      throw std::runtime_error("train_subset index out of range for dataset");
  m.build_tables(dataset);
  return m;
}

}  // namespace enslsr
