#include "hce/hce.hpp"

#include <cmath>
#include <map>
#include <string>

#include "hce/error.hpp"

namespace hce {

namespace {

// Multiplicity of every community size larger than one. Singletons carry no
// effective mass and are left out.
using SizeHistogram = std::map<std::size_t, std::size_t>;

double hce_from_histogram(const SizeHistogram& hist, std::size_t n_nodes,
                          std::size_t k) {
  const std::size_t retained = n_nodes - k;
  if (retained == 0) return 0.0;
  const double denom = static_cast<double>(retained);
  double entropy = 0.0;
  for (const auto& [size, count] : hist) {
    const double p = static_cast<double>(size - 1) / denom;
    entropy += static_cast<double>(count) * (-p * std::log(p));
  }
  return denom / static_cast<double>(n_nodes - 1) * entropy;
}

void check_sizes(std::span<const std::size_t> sizes, std::size_t n_nodes) {
  std::size_t total = 0;
  for (std::size_t s : sizes) {
    if (s == 0) {
      throw Error(ErrorCode::SizesDoNotSumToN, "community of size 0");
    }
    total += s;
  }
  if (total != n_nodes) {
    throw Error(ErrorCode::SizesDoNotSumToN,
                "sizes sum to " + std::to_string(total) + ", expected " +
                    std::to_string(n_nodes));
  }
}

void add(SizeHistogram& hist, std::size_t size) {
  if (size > 1) ++hist[size];
}

void remove(SizeHistogram& hist, std::size_t size) {
  if (size <= 1) return;
  auto it = hist.find(size);
  if (--it->second == 0) hist.erase(it);
}

}  // namespace

std::vector<double> effective_fractions(std::span<const std::size_t> sizes,
                                        std::size_t n_nodes) {
  check_sizes(sizes, n_nodes);
  std::vector<double> p(sizes.size(), 0.0);
  const std::size_t retained = n_nodes - sizes.size();
  if (retained == 0) return p;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    p[c] = static_cast<double>(sizes[c] - 1) / static_cast<double>(retained);
  }
  return p;
}

double hce_value(std::span<const std::size_t> sizes, std::size_t n_nodes) {
  if (n_nodes < 2) {
    throw Error(ErrorCode::NTooSmall, "HCE needs at least two nodes");
  }
  check_sizes(sizes, n_nodes);
  SizeHistogram hist;
  for (std::size_t s : sizes) add(hist, s);
  return hce_from_histogram(hist, n_nodes, sizes.size());
}

double HceProfile::at(std::size_t k) const {
  if (k < 1 || k > n_nodes_) {
    throw Error(ErrorCode::KOutOfRange, "no profile entry for k=" +
                                            std::to_string(k));
  }
  return records_[n_nodes_ - k].hce;
}

HceProfile hce_profile(const Linkage& linkage) {
  const std::size_t n = linkage.n_leaves();
  if (n < 2) {
    throw Error(ErrorCode::NTooSmall, "HCE needs at least two nodes");
  }
  std::vector<HceRecord> records;
  records.reserve(n);
  records.push_back({n, 0.0});

  // Sweep merges once, keeping the size histogram of the current cut.
  SizeHistogram hist;
  std::size_t k = n;
  for (const MergeRecord& m : linkage.merges()) {
    remove(hist, linkage.size_of(m.left));
    remove(hist, linkage.size_of(m.right));
    add(hist, m.size);
    --k;
    records.push_back({k, hce_from_histogram(hist, n, k)});
  }
  return HceProfile(n, std::move(records));
}

std::optional<LevelChoice> select_level(const HceProfile& profile) {
  std::optional<LevelChoice> best;
  // Records run from large K to small K; strict comparison keeps the largest
  // K among equal maxima.
  for (const HceRecord& r : profile.records()) {
    if (r.hce > 0.0 && (!best || r.hce > best->hce)) best = LevelChoice{r.k, r.hce};
  }
  return best;
}

std::string_view to_string(StoppingReason reason) {
  switch (reason) {
    case StoppingReason::NoInformativeLevel: return "NoInformativeLevel";
    case StoppingReason::MaxLevelsReached: return "MaxLevelsReached";
  }
  return "Unknown";
}

HierarchyResult extract_hierarchy(const Linkage& linkage,
                                  std::size_t max_levels) {
  HierarchyResult result;
  Linkage current = linkage;
  // Original leaf -> leaf of `current`.
  std::vector<std::size_t> leaf_of(linkage.n_leaves());
  for (std::size_t i = 0; i < leaf_of.size(); ++i) leaf_of[i] = i;

  while (true) {
    if (max_levels != 0 && result.levels.size() == max_levels) {
      result.stopping_reason = StoppingReason::MaxLevelsReached;
      break;
    }
    if (current.n_leaves() < 2) {
      result.stopping_reason = StoppingReason::NoInformativeLevel;
      break;
    }
    HceProfile profile = hce_profile(current);
    const auto choice = select_level(profile);
    if (!choice) {
      result.stopping_reason = StoppingReason::NoInformativeLevel;
      break;
    }
    TrimResult trimmed = trim_to_supernodes(current, choice->k);
    for (auto& leaf : leaf_of) leaf = trimmed.supernode_of.label(leaf);

    HierarchyLevel level;
    level.index = result.levels.size();
    level.n_nodes = current.n_leaves();
    level.k = choice->k;
    level.hce = choice->hce;
    level.partition = Partition(leaf_of);
    level.profile = std::move(profile);
    result.levels.push_back(std::move(level));

    current = std::move(trimmed.linkage);
  }
  return result;
}

}  // namespace hce
