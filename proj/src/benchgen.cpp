#include "hce/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

#include "hce/error.hpp"
#include "hce/seed.hpp"

namespace hce {

namespace {

void check_hnrg(const HnrgConfig& cfg) {
  if (cfg.s0 < 2 || cfg.r < 2 || cfg.l < 1 || !(cfg.mean_degree > 0.0) ||
      !(cfg.rho > 0.0)) {
    throw Error(ErrorCode::InvalidConfig,
                "HNRG needs s0 >= 2, r >= 2, l >= 1, mean degree > 0, rho > 0");
  }
}

// Sizes S_0..S_L and p_l / <k> (probabilities per unit mean degree).
HnrgLevels hnrg_unit_levels(const HnrgConfig& cfg) {
  check_hnrg(cfg);
  HnrgLevels lv;
  lv.sizes.resize(cfg.l + 1);
  lv.sizes[0] = cfg.s0;
  for (std::size_t l = 1; l < cfg.l; ++l) lv.sizes[l] = cfg.r * lv.sizes[l - 1];
  lv.n_nodes = cfg.r * lv.sizes[cfg.l - 1];
  lv.sizes[cfg.l] = lv.n_nodes - lv.sizes[cfg.l - 1];

  lv.probabilities.resize(cfg.l + 1);
  const double rho = cfg.rho;
  for (std::size_t l = 0; l < cfg.l; ++l) {
    lv.probabilities[l] = std::pow(rho, static_cast<double>(l)) /
                          std::pow(1.0 + rho, static_cast<double>(l + 1)) /
                          static_cast<double>(lv.sizes[l] - 1);
  }
  lv.probabilities[cfg.l] = std::pow(rho / (1.0 + rho), static_cast<double>(cfg.l)) /
                            static_cast<double>(lv.sizes[cfg.l]);
  return lv;
}

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t i, std::int64_t delta) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  /// Sum over [0, i).
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }
  std::int64_t range(std::size_t lo, std::size_t hi) const {
    return hi <= lo ? 0 : prefix(hi) - prefix(lo);
  }
  /// Smallest index whose inclusive prefix sum exceeds `target`.
  std::size_t find(std::int64_t target) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<std::int64_t> tree_;
};

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Splits `total` into integer parts proportional to `weights` by largest
// remainder; parts sum exactly to `total`.
std::vector<std::size_t> largest_remainder(std::size_t total,
                                           const std::vector<double>& weights) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> parts(weights.size());
  std::vector<std::pair<double, std::size_t>> frac(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / wsum;
    parts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += parts[i];
    frac[i] = {exact - std::floor(exact), i};
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) {
    ++parts[frac[i % frac.size()].second];
  }
  return parts;
}

std::vector<std::size_t> split_sizes(std::size_t size, const HbConfig& cfg,
                                     std::mt19937_64& rng) {
  if (size < 2) return {size};
  std::poisson_distribution<int> poisson(cfg.split_mean);
  std::size_t children = cfg.min_splits;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int draw = poisson(rng);
    if (draw >= static_cast<int>(cfg.min_splits)) {
      children = static_cast<std::size_t>(draw);
      break;
    }
  }
  children = std::min(children, size);

  std::gamma_distribution<double> gamma(cfg.dirichlet_concentration, 1.0);
  std::vector<double> weights(children);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (double& w : weights) w = gamma(rng);
    auto parts = largest_remainder(size, weights);
    if (std::all_of(parts.begin(), parts.end(), [](std::size_t p) { return p > 0; })) {
      return parts;
    }
  }
  // One node per child, the rest by the last weights.
  auto parts = largest_remainder(size - children, weights);
  for (auto& p : parts) ++p;
  return parts;
}

std::size_t pairs_within(std::size_t s) { return s * (s - 1) / 2; }

PlantedNetwork finish(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges,
                      std::vector<Partition> truth) {
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  return PlantedNetwork{n, std::move(edges), std::move(truth)};
}

}  // namespace

HnrgLevels hnrg_probabilities(const HnrgConfig& cfg) {
  HnrgLevels lv = hnrg_unit_levels(cfg);
  double max_feasible = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t l = 0; l <= cfg.l; ++l) {
    if (1.0 / lv.probabilities[l] < max_feasible) {
      max_feasible = 1.0 / lv.probabilities[l];
      worst = l;
    }
    lv.probabilities[l] *= cfg.mean_degree;
  }
  if (lv.probabilities[worst] > 1.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "p_" << worst << " = " << lv.probabilities[worst]
        << " exceeds 1; the largest feasible mean degree is " << max_feasible;
    throw Error(ErrorCode::ProbabilityExceedsOne, msg.str(), worst);
  }
  lv.expected_degrees.resize(cfg.l + 1);
  for (std::size_t l = 0; l < cfg.l; ++l) {
    lv.expected_degrees[l] =
        lv.probabilities[l] * static_cast<double>(lv.sizes[l] - 1);
  }
  lv.expected_degrees[cfg.l] =
      lv.probabilities[cfg.l] * static_cast<double>(lv.sizes[cfg.l]);
  return lv;
}

double hnrg_critical_degree(const HnrgConfig& cfg, std::size_t level) {
  check_hnrg(cfg);
  if (level < 1 || level >= cfg.l) {
    throw Error(ErrorCode::LevelOutOfRange,
                "critical degree is defined for 1 <= level < " +
                    std::to_string(cfg.l),
                level);
  }
  const HnrgLevels unit = hnrg_unit_levels(cfg);
  // Both terms are linear in <k>; solve slope * <k> = 1.
  const double slope =
      unit.probabilities[level] *
          static_cast<double>(unit.sizes[level] - unit.sizes[level - 1]) +
      unit.probabilities[level - 1] * static_cast<double>(unit.sizes[level - 1]);
  return 1.0 / slope;
}

PlantedNetwork hnrg_sample(const HnrgConfig& cfg) {
  const HnrgLevels lv = hnrg_probabilities(cfg);
  const std::size_t n = lv.n_nodes;
  const std::size_t depth = cfg.l;
  std::mt19937_64 rng(derive_seed(cfg.seed, "hnrg"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  // For node u, partners v > u at level l form one contiguous range: the rest
  // of u's level-l block past its level-(l-1) block. Bernoulli trials along
  // each range are drawn with geometric skips.
  for (std::size_t u = 0; u < n; ++u) {
    std::size_t lo = u + 1;
    for (std::size_t l = 0; l <= depth; ++l) {
      const std::size_t hi = l < depth ? (u / lv.sizes[l] + 1) * lv.sizes[l] : n;
      const double p = lv.probabilities[l];
      if (p >= 1.0) {
        for (std::size_t v = lo; v < hi; ++v) edges.emplace_back(u, v);
      } else if (p > 0.0) {
        const double log_q = std::log1p(-p);
        std::size_t v = lo;
        while (true) {
          const double skip = std::floor(std::log1p(-unit(rng)) / log_q);
          if (skip >= static_cast<double>(hi - v)) break;
          v += static_cast<std::size_t>(skip);
          edges.emplace_back(u, v);
          ++v;
        }
      }
      lo = std::max(lo, hi);
    }
  }

  std::vector<Partition> truth;
  for (std::size_t l = 0; l < depth; ++l) {
    std::vector<std::size_t> labels(n);
    for (std::size_t u = 0; u < n; ++u) labels[u] = u / lv.sizes[l];
    truth.emplace_back(labels);
  }
  return finish(n, std::move(edges), std::move(truth));
}

PlantedNetwork hb_sample(const HbConfig& cfg) {
  const std::size_t depth = cfg.l;
  const std::size_t n = cfg.n;
  if (n < 2 || depth < 1 || cfg.min_degree < 1 || cfg.min_degree > cfg.max_degree ||
      cfg.max_degree >= n || !(cfg.degree_exponent > 0.0) ||
      !(cfg.split_mean > 0.0) || !(cfg.dirichlet_concentration > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "invalid HB configuration");
  }
  if (cfg.edge_fractions.size() != depth + 1) {
    throw Error(ErrorCode::InvalidConfig,
                "HB needs l + 1 = " + std::to_string(depth + 1) +
                    " edge fractions");
  }
  double fsum = 0.0;
  for (std::size_t l = 0; l <= depth; ++l) {
    if (!(cfg.edge_fractions[l] >= 0.0)) {
      throw Error(ErrorCode::ProbabilitiesDontSumToOne,
                  "edge fraction p_" + std::to_string(l) + " is negative", l);
    }
    fsum += cfg.edge_fractions[l];
  }
  if (std::abs(fsum - 1.0) > 1e-12) {
    throw Error(ErrorCode::ProbabilitiesDontSumToOne,
                "edge fractions sum to " + std::to_string(fsum));
  }

  std::mt19937_64 rng(derive_seed(cfg.seed, "hb"));

  // Communities: contiguous node ranges, split top-down. ranges[l] holds the
  // level-l communities (l = 0 finest); community[l][u] indexes them.
  std::vector<std::vector<Range>> ranges(depth);
  std::vector<Range> current{{0, n}};
  for (std::size_t step = 0; step < depth; ++step) {
    std::vector<Range> next;
    for (const Range& parent : current) {
      std::size_t begin = parent.begin;
      for (std::size_t s : split_sizes(parent.size(), cfg, rng)) {
        next.push_back({begin, begin + s});
        begin += s;
      }
    }
    current = next;
    ranges[depth - 1 - step] = std::move(next);
  }
  std::vector<std::vector<std::size_t>> community(depth, std::vector<std::size_t>(n));
  for (std::size_t l = 0; l < depth; ++l) {
    for (std::size_t c = 0; c < ranges[l].size(); ++c) {
      for (std::size_t u = ranges[l][c].begin; u < ranges[l][c].end; ++u) {
        community[l][u] = c;
      }
    }
  }
  // Level-l partners of u: block(l) minus block(l-1), as two ranges.
  auto block = [&](std::size_t l, std::size_t u) -> Range {
    if (l == depth) return {0, n};
    return ranges[l][community[l][u]];
  };
  auto inner_block = [&](std::size_t l, std::size_t u) -> Range {
    return l == 0 ? Range{u, u + 1} : block(l - 1, u);
  };

  // Eligible pair counts per level.
  std::vector<std::size_t> eligible(depth + 1, 0);
  for (std::size_t l = 0; l <= depth; ++l) {
    std::size_t within = 0, inner = 0;
    if (l == depth) {
      within = pairs_within(n);
    } else {
      for (const Range& r : ranges[l]) within += pairs_within(r.size());
    }
    if (l > 0) {
      for (const Range& r : ranges[l - 1]) inner += pairs_within(r.size());
    }
    eligible[l] = within - inner;
  }

  // Truncated discrete power-law degrees by inverse CDF.
  std::vector<double> cdf;
  for (std::size_t k = cfg.min_degree; k <= cfg.max_degree; ++k) {
    const double w = std::pow(static_cast<double>(k), -cfg.degree_exponent);
    cdf.push_back((cdf.empty() ? 0.0 : cdf.back()) + w);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> target(n);
  std::size_t stubs = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const double x = unit(rng) * cdf.back();
    const auto idx = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
    target[u] = cfg.min_degree + std::min(idx, cdf.size() - 1);
    stubs += target[u];
  }
  if (stubs % 2 == 1) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t u = pick(rng);
    while (target[u] >= cfg.max_degree) u = pick(rng);
    ++target[u];
    ++stubs;
  }
  const std::size_t m = stubs / 2;
  std::vector<std::size_t> budget = largest_remainder(m, cfg.edge_fractions);
  for (std::size_t l = 0; l <= depth; ++l) {
    if (budget[l] > eligible[l]) {
      throw Error(ErrorCode::InfeasibleBudget,
                  "level " + std::to_string(l) + " needs " +
                      std::to_string(budget[l]) + " edges but has only " +
                      std::to_string(eligible[l]) + " eligible pairs",
                  l);
    }
  }

  Fenwick residual(n);
  std::vector<std::int64_t> res(n);
  for (std::size_t u = 0; u < n; ++u) {
    res[u] = static_cast<std::int64_t>(target[u]);
    residual.add(u, res[u]);
  }
  std::vector<std::size_t> degree(n, 0);
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * m);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(m);
  auto key = [n](std::size_t u, std::size_t v) {
    return static_cast<std::uint64_t>(std::min(u, v)) * n + std::max(u, v);
  };
  auto place = [&](std::size_t u, std::size_t v) {
    present.insert(key(u, v));
    edges.emplace_back(u, v);
    for (std::size_t x : {u, v}) {
      ++degree[x];
      if (res[x] > 0) {
        --res[x];
        residual.add(x, -1);
      }
    }
  };
  // Residual-weighted draw restricted to block(l) \ inner_block(l).
  auto draw_partner = [&](std::size_t l, std::size_t u) -> std::optional<std::size_t> {
    const Range outer = block(l, u), inner = inner_block(l, u);
    const std::int64_t left = residual.range(outer.begin, inner.begin);
    const std::int64_t right = residual.range(inner.end, outer.end);
    if (left + right == 0) return std::nullopt;
    std::uniform_int_distribution<std::int64_t> pick(0, left + right - 1);
    const std::int64_t x = pick(rng);
    if (x < left) return residual.find(residual.prefix(outer.begin) + x);
    return residual.find(residual.prefix(inner.end) + (x - left));
  };

  constexpr int kMaxFailures = 200;
  constexpr int kRelaxedTries = 20000;
  std::size_t remaining = m;
  int failures = 0;
  while (remaining > 0) {
    std::uniform_int_distribution<std::size_t> pick_edge(0, remaining - 1);
    std::size_t slot = pick_edge(rng), l = 0;
    while (slot >= budget[l]) slot -= budget[l++];

    if (failures < kMaxFailures) {
      const std::int64_t total = residual.prefix(n);
      if (total == 0) {
        failures = kMaxFailures;
        continue;
      }
      std::uniform_int_distribution<std::int64_t> pick(0, total - 1);
      const std::size_t u = residual.find(pick(rng));
      const auto v = draw_partner(l, u);
      if (!v || *v == u || present.count(key(u, *v))) {
        ++failures;
        continue;
      }
      place(u, *v);
    } else {
      // Relaxed placement: uniform endpoints under the degree cap.
      std::uniform_int_distribution<std::size_t> pick_node(0, n - 1);
      bool placed = false;
      for (int t = 0; t < kRelaxedTries && !placed; ++t) {
        const std::size_t u = pick_node(rng);
        if (degree[u] >= cfg.max_degree) continue;
        const Range outer = block(l, u), inner = inner_block(l, u);
        const std::size_t width = outer.size() - inner.size();
        if (width == 0) continue;
        std::uniform_int_distribution<std::size_t> pick_pos(0, width - 1);
        std::size_t pos = pick_pos(rng);
        const std::size_t v = pos < inner.begin - outer.begin
                                  ? outer.begin + pos
                                  : inner.end + (pos - (inner.begin - outer.begin));
        if (degree[v] >= cfg.max_degree || present.count(key(u, v))) continue;
        place(u, v);
        placed = true;
      }
      if (!placed) {
        throw Error(ErrorCode::InfeasibleBudget,
                    "could not place the edge budget of level " + std::to_string(l),
                    l);
      }
    }
    failures = 0;
    --budget[l];
    --remaining;
  }

  auto shared_level = [&](std::size_t u, std::size_t v) {
    std::size_t l = 0;
    while (l < depth && community[l][u] != community[l][v]) ++l;
    return l;
  };
  // Lift nodes left below the minimum degree, pairing them with nodes that
  // still have unused stubs when possible.
  std::uniform_int_distribution<std::size_t> pick_node(0, n - 1);
  for (std::size_t u = 0; u < n; ++u) {
    int guard = 0;
    while (degree[u] < cfg.min_degree) {
      if (++guard > 100000) {
        throw Error(ErrorCode::InfeasibleBudget,
                    "cannot raise node " + std::to_string(u) +
                        " to the minimum degree",
                    u);
      }
      std::size_t v = pick_node(rng);
      const std::int64_t total = residual.prefix(n) - res[u];
      if (total > 0 && guard < 1000) {
        std::uniform_int_distribution<std::int64_t> pick(0, total - 1);
        std::int64_t x = pick(rng);
        if (x >= residual.prefix(u)) x += res[u];
        v = residual.find(x);
      }
      if (v == u || degree[v] >= cfg.max_degree || present.count(key(u, v))) continue;
      // Keep repair edges out of levels whose target fraction is zero.
      if (guard < 50000 && cfg.edge_fractions[shared_level(u, v)] == 0.0) continue;
      place(u, v);
    }
  }

  std::vector<Partition> truth;
  for (std::size_t l = 0; l < depth; ++l) truth.emplace_back(community[l]);
  return finish(n, std::move(edges), std::move(truth));
}

std::vector<std::size_t> edges_per_level(const PlantedNetwork& net) {
  const std::size_t depth = net.ground_truth.size();
  std::vector<std::size_t> counts(depth + 1, 0);
  for (const auto& [u, v] : net.edges) {
    std::size_t l = 0;
    while (l < depth && net.ground_truth[l].label(u) != net.ground_truth[l].label(v)) ++l;
    ++counts[l];
  }
  return counts;
}

std::uint64_t instance_seed(std::uint64_t root, std::uint64_t index) {
  return derive_seed(root, "instance", index);
}

}  // namespace hce
