#pragma once

#include <cstddef>
#include <cstdint>

#include "hce/distance.hpp"
#include "hce/linkage.hpp"

namespace hce {

/// Work counters of one clustering run.
struct UpgmaStats {
  /// Distance lookups made while searching for nearest neighbours plus
  /// average-linkage updates after each merge.
  std::uint64_t candidate_evaluations = 0;
};

/// Average-linkage clustering with the nearest-neighbour-chain algorithm.
/// O(n^2) time; the condensed array is consumed as working storage.
/// Merges are returned sorted by distance, each row as (smaller id, larger id).
Linkage upgma_linkage(CondensedDistances distances, UpgmaStats* stats = nullptr);

inline constexpr std::size_t kNaiveOracleMaxN = 512;

/// Reference O(n^3) implementation: every step recomputes the average
/// distance of all cluster pairs from the original entries and merges the
/// closest pair, ties to the smallest (left id, right id).
Linkage upgma_naive_oracle(const CondensedDistances& distances);

}  // namespace hce
