#pragma once

// Conversion of consensus-clustering output into a Linkage. The input is the
// finest consensus partition (s_c, one community id per network node) and a
// top-down list of community merges with similarities in (0, 1].

#include <cstddef>
#include <vector>

#include "hce/linkage.hpp"

namespace hce {

struct TreeEdge {
  std::size_t parent = 0;
  std::size_t child = 0;
  double similarity = 1.0;

  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

struct ConsensusTree {
  std::vector<TreeEdge> edges;    // community -> community merges
  std::vector<std::size_t> s_c;   // node -> finest community id
};

/// Tree over network nodes 0..N-1 and renumbered communities N, N+1, ...
/// (children before parents). Leaf edges carry similarity 1.
struct CompletedTree {
  std::size_t n_leaves = 0;
  std::size_t root = 0;
  std::vector<TreeEdge> edges;
};

/// Renumbers communities and attaches each finest community to its member
/// nodes. Checks that the merges form a single rooted tree whose leaves are
/// exactly the communities of s_c, and that similarity never increases
/// towards the root.
CompletedTree complete_tree(const ConsensusTree& tree);

/// Walks the completed tree by decreasing similarity (parents by ascending
/// id, children by ascending id). The first child of a parent stands for
/// it; every further child is merged in at distance 1 - similarity.
Linkage tree_to_linkage(const CompletedTree& tree);

inline Linkage consensus_to_linkage(const ConsensusTree& tree) {
  return tree_to_linkage(complete_tree(tree));
}

}  // namespace hce
