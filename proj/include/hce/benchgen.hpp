#pragma once

// Benchmark networks with planted multilevel communities.
//
// HNRG: symmetric nesting. Level-l communities have S_l = R * S_{l-1} nodes;
// a pair is connected with the probability p_l of the finest level it shares.
// HB: asymmetric nesting from recursive Poisson/Dirichlet splits, a truncated
// power-law degree sequence, and a fixed fraction of edges per level.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "hce/linkage.hpp"

namespace hce {

struct HnrgConfig {
  std::size_t s0 = 10;
  std::size_t r = 4;
  std::size_t l = 4;
  double mean_degree = 16.0;
  double rho = 1.0;
  std::uint64_t seed = 0;
};

struct HnrgLevels {
  std::size_t n_nodes = 0;
  std::vector<std::size_t> sizes;         // S_0 .. S_L
  std::vector<double> probabilities;      // p_0 .. p_L
  std::vector<double> expected_degrees;   // k_0 .. k_L
};

/// Level sizes and connection probabilities. Throws ProbabilityExceedsOne
/// (with the largest feasible mean degree in the message) when some p_l > 1.
HnrgLevels hnrg_probabilities(const HnrgConfig& cfg);

/// Mean degree at which a node expects one connection inside its level-l
/// community: p_l (S_l - S_{l-1}) + p_{l-1} S_{l-1} = 1. Requires 1 <= l < L.
double hnrg_critical_degree(const HnrgConfig& cfg, std::size_t level);

struct PlantedNetwork {
  std::size_t n_nodes = 0;
  /// Undirected simple edges (u < v), sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  /// One partition per planted level, finest first.
  std::vector<Partition> ground_truth;
};

PlantedNetwork hnrg_sample(const HnrgConfig& cfg);

struct HbConfig {
  std::size_t n = 1000;
  std::size_t l = 3;
  std::vector<double> edge_fractions{0.6, 0.25, 0.1, 0.05};  // p_0 .. p_L
  double degree_exponent = 2.0;
  std::size_t min_degree = 5;
  std::size_t max_degree = 70;
  double split_mean = 4.0;
  std::size_t min_splits = 2;
  double dirichlet_concentration = 1.5;
  std::uint64_t seed = 0;
};

PlantedNetwork hb_sample(const HbConfig& cfg);

/// Edge count per finest shared planted level; index L counts edges whose
/// endpoints share no planted community.
std::vector<std::size_t> edges_per_level(const PlantedNetwork& net);

/// Seed of instance `index` in an ensemble rooted at `root`.
std::uint64_t instance_seed(std::uint64_t root, std::uint64_t index);

}  // namespace hce
