#include "hce/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <unordered_map>

#include "hce/error.hpp"

namespace hce {

namespace {

std::string row_message(std::size_t row, const std::string& what) {
  return "row " + std::to_string(row) + ": " + what;
}

// Root of every node id at the state reached after applying `applied` merges.
std::vector<NodeId> roots_after(const Linkage& linkage, std::size_t applied) {
  const std::size_t n = linkage.n_leaves();
  std::vector<NodeId> parent(n + applied);
  for (NodeId i = 0; i < parent.size(); ++i) parent[i] = i;
  const auto merges = linkage.merges();
  for (std::size_t m = 0; m < applied; ++m) {
    parent[merges[m].left] = n + m;
    parent[merges[m].right] = n + m;
  }
  // Parents always have larger ids, so a descending sweep resolves roots.
  for (std::size_t i = parent.size(); i-- > 0;) {
    if (parent[i] != i) parent[i] = parent[parent[i]];
  }
  return parent;
}

}  // namespace

Linkage Linkage::validate(std::span<const RawMerge> rows, std::size_t n_leaves) {
  if (n_leaves == 0) {
    throw Error(ErrorCode::WrongRowCount, "a linkage needs at least one leaf");
  }
  if (rows.size() != n_leaves - 1) {
    throw Error(ErrorCode::WrongRowCount,
                "expected " + std::to_string(n_leaves - 1) + " rows for " +
                    std::to_string(n_leaves) + " leaves, got " +
                    std::to_string(rows.size()),
                std::min(rows.size(), n_leaves - 1));
  }

  std::vector<std::size_t> sizes(2 * n_leaves - 1, 0);
  std::fill_n(sizes.begin(), n_leaves, 1);
  std::vector<bool> used(2 * n_leaves - 1, false);
  std::vector<MergeRecord> merges;
  merges.reserve(rows.size());

  for (std::size_t m = 0; m < rows.size(); ++m) {
    const RawMerge& r = rows[m];
    const NodeId limit = n_leaves + m;
    if (r.left >= limit || r.right >= limit) {
      throw Error(ErrorCode::IdOutOfRange,
                  row_message(m, "child id must be < " + std::to_string(limit)),
                  m);
    }
    if (r.left == r.right) {
      throw Error(ErrorCode::ChildReused,
                  row_message(m, "merges node " + std::to_string(r.left) +
                                     " with itself"),
                  m);
    }
    for (NodeId c : {r.left, r.right}) {
      if (used[c]) {
        throw Error(ErrorCode::ChildReused,
                    row_message(m, "node " + std::to_string(c) +
                                       " was already merged"),
                    m);
      }
    }
    if (!std::isfinite(r.distance)) {
      throw Error(ErrorCode::NonFiniteDistance,
                  row_message(m, "distance is not finite"), m);
    }
    if (r.distance < 0.0) {
      throw Error(ErrorCode::NegativeDistance,
                  row_message(m, "distance is negative"), m);
    }
    if (m > 0 && r.distance < merges.back().distance) {
      throw Error(ErrorCode::NonMonotoneDistances,
                  row_message(m, "distance decreases from the previous row"),
                  m);
    }
    const std::size_t size = sizes[r.left] + sizes[r.right];
    if (r.size && *r.size != size) {
      throw Error(ErrorCode::SizeMismatch,
                  row_message(m, "recorded size " + std::to_string(*r.size) +
                                     " but children sum to " +
                                     std::to_string(size)),
                  m);
    }
    used[r.left] = used[r.right] = true;
    sizes[limit] = size;
    merges.push_back({r.left, r.right, r.distance, size});
  }
  return Linkage(n_leaves, std::move(merges));
}

std::size_t Linkage::size_of(NodeId node) const {
  if (node < n_leaves_) return 1;
  const std::size_t m = node - n_leaves_;
  if (m >= merges_.size()) {
    throw Error(ErrorCode::IdOutOfRange,
                "node " + std::to_string(node) + " does not exist");
  }
  return merges_[m].size;
}

std::vector<RawMerge> Linkage::to_raw() const {
  std::vector<RawMerge> rows;
  rows.reserve(merges_.size());
  for (const MergeRecord& r : merges_) {
    rows.push_back({r.left, r.right, r.distance, r.size});
  }
  return rows;
}

Partition::Partition(std::span<const std::size_t> labels) {
  labels_.reserve(labels.size());
  std::unordered_map<std::size_t, std::size_t> canonical;
  for (std::size_t label : labels) {
    auto [it, inserted] = canonical.try_emplace(label, canonical.size());
    labels_.push_back(it->second);
  }
  n_communities_ = canonical.size();
}

std::vector<std::vector<std::size_t>> Partition::communities() const {
  std::vector<std::vector<std::size_t>> out(n_communities_);
  for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(i);
  return out;
}

Partition cut_at_k(const Linkage& linkage, std::size_t k) {
  const std::size_t n = linkage.n_leaves();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::KOutOfRange,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(n) +
                    "]");
  }
  const auto roots = roots_after(linkage, n - k);
  return Partition(std::span<const std::size_t>(roots.data(), n));
}

std::vector<std::size_t> community_sizes(const Partition& partition) {
  std::vector<std::size_t> sizes(partition.community_count(), 0);
  for (std::size_t label : partition.labels()) ++sizes[label];
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

TrimResult trim_to_supernodes(const Linkage& linkage, std::size_t k) {
  const std::size_t n = linkage.n_leaves();
  if (k < 2 || k > n) {
    throw Error(ErrorCode::KOutOfRange,
                "trim needs 1 < k <= " + std::to_string(n) + ", got " +
                    std::to_string(k));
  }
  const std::size_t applied = n - k;
  const NodeId frontier = n + applied;  // first id created above the cut

  // Supernode label of every node id that exists at the cut.
  const auto roots = roots_after(linkage, applied);
  Partition cut(std::span<const std::size_t>(roots.data(), n));
  std::vector<std::size_t> label_of(frontier);
  for (NodeId i = 0; i < n; ++i) label_of[i] = cut.label(i);
  const auto merges = linkage.merges();
  for (std::size_t m = 0; m < applied; ++m) {
    label_of[n + m] = label_of[merges[m].left];
  }

  auto remap = [&](NodeId id) -> NodeId {
    return id < frontier ? label_of[id] : k + (id - frontier);
  };
  std::vector<RawMerge> rows;
  rows.reserve(k - 1);
  for (std::size_t m = applied; m < merges.size(); ++m) {
    rows.push_back({remap(merges[m].left), remap(merges[m].right),
                    merges[m].distance, std::nullopt});
  }
  return {Linkage::validate(rows, k), std::move(cut)};
}

}  // namespace hce
