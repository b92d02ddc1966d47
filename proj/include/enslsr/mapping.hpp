#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "enslsr/tasksim.hpp"

// Synthetic stand-ins for the learned latent mapping module: a deterministic
// per-seed encoder with controllable imperfection (latent noise, merged and
// split state centroids) and nearest-training-observation decoding.

namespace enslsr {

struct MappingConfig {
  int d = 16;
  double sigma_noise = 0.25;
  double p_merge = 0.02;
  double p_split = 0.02;
  double subset_fraction = 0.85;
};

class MappingModule {
 public:
  static MappingModule make(const std::vector<TransitionTuple>& dataset,
                            std::uint64_t model_seed,
                            const MappingConfig& cfg);

  // centroid(state, routing) + sigma_noise * eta(obs). Deterministic per
  // (module, observation); unseen states get centroids on demand.
  std::vector<double> encode(const Observation& obs) const;

  // Training observation (restricted to train_subset tuples) whose encoding
  // is nearest to z; ties go to the lowest observation index.
  const Observation& decode(const std::vector<double>& z) const;

  // Centroid of a state under this module, after merge resolution.
  // `which` selects the second centroid of a split state.
  std::vector<double> state_centroid(const SystemState& s, int which = 0) const;

  bool is_split(const SystemState& s) const;

  std::uint64_t model_seed() const { return model_seed_; }
  const MappingConfig& config() const { return cfg_; }
  const std::vector<std::size_t>& train_subset() const { return train_subset_; }
  const std::vector<Observation>& train_observations() const {
    return train_obs_;
  }
  // Flattened row-major train_observations() encodings (n x d).
  const std::vector<double>& train_latents() const { return train_lat_; }

  void save(std::ostream& os) const;
  static MappingModule load(std::istream& is,
                            const std::vector<TransitionTuple>& dataset);

 private:
  MappingModule() = default;
  void build_tables(const std::vector<TransitionTuple>& dataset);

  std::uint64_t model_seed_ = 0;
  MappingConfig cfg_;
  std::vector<std::size_t> train_subset_;  // sorted tuple indices
  std::unordered_map<std::string, std::string> merge_rep_;
  std::unordered_set<std::string> split_;
  std::vector<Observation> train_obs_;  // sorted by observation index
  std::vector<double> train_lat_;
};

}  // namespace enslsr
