#pragma once

// Hierarchical clustering entropy: an entropy of "effective" community sizes
// (one node removed per community) scaled by the fraction of retained nodes.
// All values are in nats.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hce/linkage.hpp"

namespace hce {

/// p_c = (n_c - 1) / (N - K), in the order of `sizes`. All zero when K == N.
std::vector<double> effective_fractions(std::span<const std::size_t> sizes,
                                        std::size_t n_nodes);

/// HCE of a partition with the given community sizes over `n_nodes` nodes.
double hce_value(std::span<const std::size_t> sizes, std::size_t n_nodes);

struct HceRecord {
  std::size_t k = 0;
  double hce = 0.0;
};

/// HCE for every community count K of one dendrogram. Records are stored in
/// the order K = N, N-1, ..., 1. Community sizes for a given K are recovered
/// with community_sizes(cut_at_k(linkage, K)).
class HceProfile {
 public:
  HceProfile() = default;
  HceProfile(std::size_t n_nodes, std::vector<HceRecord> records)
      : n_nodes_(n_nodes), records_(std::move(records)) {}

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::span<const HceRecord> records() const noexcept { return records_; }
  double at(std::size_t k) const;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<HceRecord> records_;
};

HceProfile hce_profile(const Linkage& linkage);

struct LevelChoice {
  std::size_t k = 0;
  double hce = 0.0;
};

/// Argmax of the profile, ties toward the largest K. nullopt when the
/// maximum is zero.
std::optional<LevelChoice> select_level(const HceProfile& profile);

enum class StoppingReason { NoInformativeLevel, MaxLevelsReached };

std::string_view to_string(StoppingReason reason);

struct HierarchyLevel {
  std::size_t index = 0;      // m in R_m
  std::size_t n_nodes = 0;    // supernodes in the system this level was chosen from
  std::size_t k = 0;
  double hce = 0.0;
  Partition partition;        // over the original leaves
  HceProfile profile;
};

struct HierarchyResult {
  std::vector<HierarchyLevel> levels;
  StoppingReason stopping_reason = StoppingReason::NoInformativeLevel;
};

/// Repeats select -> trim -> select on the renormalized dendrogram until no
/// informative level remains. `max_levels` of 0 means unlimited.
HierarchyResult extract_hierarchy(const Linkage& linkage,
                                  std::size_t max_levels = 0);

}  // namespace hce
