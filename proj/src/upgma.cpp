#include "hce/upgma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hce/error.hpp"

namespace hce {

namespace {

struct SlotMerge {
  std::size_t a = 0;  // slots of the two clusters
  std::size_t b = 0;
  double distance = 0.0;
};

void require_clusterable(const CondensedDistances& d) {
  if (d.n() < 2) {
    throw Error(ErrorCode::NTooSmall, "clustering needs at least two observations");
  }
  const auto values = d.values();
  for (std::size_t p = 0; p < values.size(); ++p) {
    if (!std::isfinite(values[p])) {
      throw Error(ErrorCode::NonFiniteDistance,
                  "entry " + std::to_string(p) + " is not finite", p);
    }
  }
}

// Active slots as a doubly linked list in ascending order.
class ActiveSet {
 public:
  explicit ActiveSet(std::size_t n) : succ_(n + 1), pred_(n + 1) {
    for (std::size_t i = 0; i <= n; ++i) {
      succ_[i] = i + 1;
      pred_[i] = i == 0 ? n : i - 1;
    }
    start_ = 0;
    end_ = n;
  }
  std::size_t start() const { return start_; }
  std::size_t end() const { return end_; }
  std::size_t next(std::size_t i) const { return succ_[i]; }
  void remove(std::size_t i) {
    if (i == start_) {
      start_ = succ_[i];
    } else {
      succ_[pred_[i]] = succ_[i];
    }
    pred_[succ_[i]] = pred_[i];
  }

 private:
  std::vector<std::size_t> succ_, pred_;
  std::size_t start_, end_;
};

// Turns slot-based merges (in creation order) into a Linkage: merges are
// stably sorted by distance and re-labelled with union-find.
Linkage relabel(std::size_t n, std::vector<SlotMerge> merges) {
  // Rounding in the average update can leave a parent a hair below its
  // child; lift it so the stable sort keeps children first.
  std::vector<double> latest(n, 0.0);  // merge distance of the cluster held by a slot
  for (SlotMerge& m : merges) {
    m.distance = std::max({m.distance, latest[m.a], latest[m.b]});
    latest[m.a] = latest[m.b] = m.distance;
  }
  std::stable_sort(merges.begin(), merges.end(),
                   [](const SlotMerge& x, const SlotMerge& y) {
                     return x.distance < y.distance;
                   });

  std::vector<std::size_t> parent(n), cluster_id(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<RawMerge> rows;
  rows.reserve(merges.size());
  for (std::size_t m = 0; m < merges.size(); ++m) {
    const std::size_t ra = find(merges[m].a), rb = find(merges[m].b);
    const NodeId ia = cluster_id[ra], ib = cluster_id[rb];
    rows.push_back({std::min(ia, ib), std::max(ia, ib), merges[m].distance,
                    std::nullopt});
    parent[ra] = rb;
    cluster_id[rb] = n + m;
  }
  return Linkage::validate(rows, n);
}

}  // namespace

Linkage upgma_linkage(CondensedDistances distances, UpgmaStats* stats) {
  require_clusterable(distances);
  const std::size_t n = distances.n();
  auto dist = distances.mutable_values();
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return i < j ? dist[CondensedDistances::index(n, i, j)]
                 : dist[CondensedDistances::index(n, j, i)];
  };

  std::uint64_t evaluations = 0;
  std::vector<double> size(n, 1.0);
  ActiveSet active(n);
  std::vector<std::size_t> chain;
  chain.reserve(n);
  std::vector<SlotMerge> merges;
  merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    if (chain.empty()) chain.push_back(active.start());
    std::size_t a = 0, b = 0;
    double best = 0.0;
    while (true) {
      a = chain.back();
      const bool has_prev = chain.size() >= 2;
      const std::size_t prev = has_prev ? chain[chain.size() - 2] : n;
      std::size_t nearest = prev;
      best = has_prev ? at(a, prev) : std::numeric_limits<double>::infinity();
      // Strict comparison keeps the previous chain element on ties, which
      // guarantees the chain terminates.
      for (std::size_t c = active.start(); c < a; c = active.next(c)) {
        ++evaluations;
        const double v = dist[CondensedDistances::index(n, c, a)];
        if (v < best) {
          best = v;
          nearest = c;
        }
      }
      for (std::size_t c = active.next(a); c < n; c = active.next(c)) {
        ++evaluations;
        const double v = dist[CondensedDistances::index(n, a, c)];
        if (v < best) {
          best = v;
          nearest = c;
        }
      }
      if (has_prev && nearest == prev) {
        b = prev;
        break;
      }
      chain.push_back(nearest);
    }
    chain.pop_back();
    chain.pop_back();

    merges.push_back({a, b, best});
    const std::size_t lo = std::min(a, b), hi = std::max(a, b);
    const double s_lo = size[lo], s_hi = size[hi];
    const double total = s_lo + s_hi;
    // The merged cluster lives in slot `hi`; slot `lo` is retired.
    for (std::size_t c = active.start(); c < n; c = active.next(c)) {
      if (c == lo || c == hi) continue;
      ++evaluations;
      double& target = at(hi, c);
      target = (s_lo * at(lo, c) + s_hi * target) / total;
    }
    size[hi] = total;
    active.remove(lo);
  }
  if (stats) stats->candidate_evaluations = evaluations;
  return relabel(n, std::move(merges));
}

Linkage upgma_naive_oracle(const CondensedDistances& distances) {
  require_clusterable(distances);
  const std::size_t n = distances.n();
  if (n > kNaiveOracleMaxN) {
    throw Error(ErrorCode::TooLargeForOracle,
                "naive oracle is limited to n <= " +
                    std::to_string(kNaiveOracleMaxN));
  }
  struct Cluster {
    NodeId id;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;  // kept in ascending id order
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i, {i}});

  std::vector<RawMerge> rows;
  double floor = 0.0;
  for (std::size_t m = 0; m + 1 < n; ++m) {
    std::size_t best_p = 0, best_q = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < clusters.size(); ++p) {
      for (std::size_t q = p + 1; q < clusters.size(); ++q) {
        double sum = 0.0;
        for (std::size_t a : clusters[p].members) {
          for (std::size_t b : clusters[q].members) sum += distances(a, b);
        }
        const double avg =
            sum / (static_cast<double>(clusters[p].members.size()) *
                   static_cast<double>(clusters[q].members.size()));
        if (avg < best) {
          best = avg;
          best_p = p;
          best_q = q;
        }
      }
    }
    floor = std::max(floor, best);
    rows.push_back({clusters[best_p].id, clusters[best_q].id, floor, std::nullopt});
    Cluster merged{n + m, clusters[best_p].members};
    merged.members.insert(merged.members.end(), clusters[best_q].members.begin(),
                          clusters[best_q].members.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_q));
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_p));
    clusters.push_back(std::move(merged));
  }
  return Linkage::validate(rows, n);
}

}  // namespace hce
