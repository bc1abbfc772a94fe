#pragma once

// Dendrogram data model. A Linkage over N leaves is an ordered list of N-1
// binary merges; merge m creates node N+m. Leaves are ids 0..N-1.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hce {

using NodeId = std::size_t;

struct MergeRecord {
  NodeId left = 0;
  NodeId right = 0;
  double distance = 0.0;
  std::size_t size = 0;

  friend bool operator==(const MergeRecord&, const MergeRecord&) = default;
};

/// An unvalidated merge row as read from a file or produced by an algorithm.
/// The size column is optional and is always recomputed.
struct RawMerge {
  NodeId left = 0;
  NodeId right = 0;
  double distance = 0.0;
  std::optional<std::size_t> size;
};

class Linkage {
 public:
  Linkage() = default;

  /// Validates `rows` against the indexing convention and returns the
  /// immutable dendrogram. Errors name the first offending row.
  static Linkage validate(std::span<const RawMerge> rows, std::size_t n_leaves);

  std::size_t n_leaves() const noexcept { return n_leaves_; }
  std::span<const MergeRecord> merges() const noexcept { return merges_; }
  const MergeRecord& merge(std::size_t m) const { return merges_.at(m); }

  /// Number of leaves below `node`.
  std::size_t size_of(NodeId node) const;

  std::vector<RawMerge> to_raw() const;

  friend bool operator==(const Linkage&, const Linkage&) = default;

 private:
  Linkage(std::size_t n_leaves, std::vector<MergeRecord> merges)
      : n_leaves_(n_leaves), merges_(std::move(merges)) {}

  std::size_t n_leaves_ = 0;
  std::vector<MergeRecord> merges_;
};

inline Linkage validate_linkage(std::span<const RawMerge> rows,
                                std::size_t n_leaves) {
  return Linkage::validate(rows, n_leaves);
}

/// Node -> community membership with canonical labels: 0, 1, 2, ... in order
/// of first appearance along the node index.
class Partition {
 public:
  Partition() = default;
  /// Relabels arbitrary labels canonically.
  explicit Partition(std::span<const std::size_t> labels);
  explicit Partition(const std::vector<std::size_t>& labels)
      : Partition(std::span<const std::size_t>(labels)) {}
  Partition(std::initializer_list<std::size_t> labels)
      : Partition(std::vector<std::size_t>(labels)) {}

  std::span<const std::size_t> labels() const noexcept { return labels_; }
  std::size_t label(std::size_t node) const { return labels_.at(node); }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t community_count() const noexcept { return n_communities_; }

  /// Members of every community, indexed by label, ascending node order.
  std::vector<std::vector<std::size_t>> communities() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::size_t> labels_;
  std::size_t n_communities_ = 0;
};

/// Applies the first n_leaves-k merges and returns the resulting k
/// communities. Ties in merge distance do not matter: only merge order does.
Partition cut_at_k(const Linkage& linkage, std::size_t k);

/// Community sizes sorted descending.
std::vector<std::size_t> community_sizes(const Partition& partition);

struct TrimResult {
  /// The last k-1 merges, re-indexed over k supernode leaves.
  Linkage linkage;
  /// Original leaf -> supernode id. Supernode s is community s of
  /// cut_at_k(input, k).
  Partition supernode_of;
};

/// Collapses the k communities at cut k into supernodes and keeps only the
/// structure above them.
TrimResult trim_to_supernodes(const Linkage& linkage, std::size_t k);

}  // namespace hce
