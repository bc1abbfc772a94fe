// Acceptance checks. One PASS/FAIL line per criterion; extra measurements
// follow on indented "info" lines. Arguments select criteria by number.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hce/benchgen.hpp"
#include "hce/distance.hpp"
#include "hce/error.hpp"
#include "hce/hce.hpp"
#include "hce/linkage.hpp"
#include "hce/mcc.hpp"
#include "hce/metrics.hpp"
#include "hce/parallel.hpp"
#include "hce/pipeline.hpp"
#include "hce/signal.hpp"
#include "hce/upgma.hpp"
#include "support/oracles.hpp"

using namespace hce;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> info;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<RawMerge> rows_of(std::initializer_list<std::pair<std::size_t, std::size_t>> pairs) {
  std::vector<RawMerge> rows;
  double d = 1.0;
  for (const auto& [a, b] : pairs) rows.push_back({a, b, d++, std::nullopt});
  return rows;
}

// ---- 1 ----
Outcome fig1a() {
  const double l2 = std::log(2.0), l3 = std::log(3.0);
  const double h9 = hce_value(std::vector<std::size_t>(9, 1), 9);
  const double h7 = hce_value(std::vector<std::size_t>{2, 2, 1, 1, 1, 1, 1}, 9);
  const double h3 = hce_value(std::vector<std::size_t>{3, 3, 3}, 9);
  const double h1 = hce_value(std::vector<std::size_t>{9}, 9);
  const double err = std::max({std::abs(h9), std::abs(h7 - 2.0 / 8.0 * l2),
                               std::abs(h3 - 6.0 / 8.0 * l3), std::abs(h1)});
  // Triples {0,1,6}, {2,3,7}, {4,5,8}; two pairs at K = 7.
  const Linkage l = Linkage::validate(
      rows_of({{0, 1}, {2, 3}, {4, 5}, {9, 6}, {10, 7}, {11, 8}, {12, 13}, {15, 14}}), 9);
  const HceProfile p = hce_profile(l);
  const auto choice = select_level(p);
  const double perr = std::max(std::abs(p.at(7) - 2.0 / 8.0 * l2), std::abs(p.at(3) - 6.0 / 8.0 * l3));
  Outcome o;
  o.pass = err <= 1e-12 && perr <= 1e-12 && choice && choice->k == 3;
  o.detail = fmt("max |error| %.2e, dendrogram selects K=%zu", std::max(err, perr),
                 choice ? choice->k : 0);
  return o;
}

// ---- 2 ----
Outcome high_school() {
  // Supernodes {0,1,2}, {3,4,5}, {6,7} + {8}.
  const Linkage l = Linkage::validate(
      rows_of({{0, 1}, {3, 4}, {6, 7}, {9, 2}, {10, 5}, {11, 8}, {12, 13}, {15, 14}}), 9);
  const auto s3 = community_sizes(cut_at_k(l, 3));
  const auto s4 = community_sizes(cut_at_k(l, 4));
  // Retained node fractions (N - K) / (N - 1): 6/8 at K = 3, 5/8 at K = 4.
  const bool fractions = (9 - s3.size()) * 8 == 6 * 8 && (9 - s4.size()) * 8 == 5 * 8;
  const auto p3 = effective_fractions(s3, 9);
  const auto p4 = effective_fractions(s4, 9);
  const bool ratios = p3 == std::vector<double>{2.0 / 6, 2.0 / 6, 2.0 / 6} &&
                      p4[0] == 2.0 / 5 && p4[1] == 2.0 / 5 && p4[2] == 1.0 / 5 && p4[3] == 0.0;
  const auto choice = select_level(hce_profile(l));
  Outcome o;
  o.pass = s3 == std::vector<std::size_t>{3, 3, 3} && s4 == std::vector<std::size_t>{3, 3, 2, 1} &&
           fractions && ratios && choice && choice->k == 3;
  o.detail = fmt("HCE(3)=%.6f vs HCE(4)=%.6f, selected K=%zu", hce_value(s3, 9),
                 hce_value(s4, 9), choice ? choice->k : 0);
  return o;
}

// ---- 3 ----
Outcome graph_cosine() {
  const std::vector<WeightedEdge> e{{0, 2, 4.0}, {1, 2, 4.0}, {0, 1, 3.0}};
  const WeightedGraph g = WeightedGraph::from_edges(3, e);
  const double norms = g.norm(0) * g.norm(1);
  const double standard = standard_dot(g, 0, 1) / norms;
  const double graph = graph_dot(g, 0, 1) / norms;
  const double d = graph_cosine_distances(g)(0, 1);
  Outcome o;
  o.pass = std::abs(standard - 16.0 / 25.0) <= 1e-12 && std::abs(graph - 1.0) <= 1e-12 &&
           d <= 1e-12;
  o.detail = fmt("standard cosine %.15f, graph cosine %.15f", standard, graph);
  return o;
}

// ---- 4 ----
Outcome upgma_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t mismatches = 0;
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 63;
    std::vector<double> v(CondensedDistances::pair_count(n));
    for (double& x : v) x = u(rng);
    const CondensedDistances d(n, std::move(v));
    const Linkage fast = upgma_linkage(d);
    const Linkage slow = upgma_naive_oracle(d);
    for (std::size_t m = 0; m + 1 < n; ++m) {
      const auto& a = fast.merge(m);
      const auto& b = slow.merge(m);
      if (a.left != b.left || a.right != b.right || a.size != b.size) ++mismatches;
      worst = std::max(worst, std::abs(a.distance - b.distance));
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = mismatches == 0 && worst <= 1e-12 && secs < 30.0;
  o.detail = fmt("%zu merge mismatches, max distance gap %.2e, %.2f s", mismatches, worst, secs);
  return o;
}

// ---- 5 ----
Outcome hnrg_identity() {
  std::mt19937_64 rng(5);
  std::size_t valid = 0;
  double worst = 0.0;
  while (valid < 100) {
    HnrgConfig c;
    c.s0 = 2 + rng() % 30;
    c.r = 2 + rng() % 6;
    c.l = 1 + rng() % 5;
    c.rho = 0.1 + static_cast<double>(rng() % 5000) / 1000.0;
    c.mean_degree = 0.1 + static_cast<double>(rng() % 10000) / 500.0;
    HnrgLevels lv;
    try {
      lv = hnrg_probabilities(c);
    } catch (const Error&) {
      continue;
    }
    double sum = 0.0;
    for (double k : lv.expected_degrees) sum += k;
    worst = std::max(worst, std::abs(sum - c.mean_degree));
    ++valid;
  }
  Outcome o;
  o.pass = worst <= 1e-10;
  o.detail = fmt("100 configs, max |sum k_l - <k>| = %.2e", worst);
  return o;
}

// ---- 6 ----
double half_rise(const std::vector<double>& degrees, const std::vector<double>& ami) {
  for (std::size_t i = 0; i < ami.size(); ++i) {
    if (ami[i] >= 0.5) {
      if (i == 0) return degrees[0];
      const double t = (0.5 - ami[i - 1]) / (ami[i] - ami[i - 1]);
      return degrees[i - 1] + t * (degrees[i] - degrees[i - 1]);
    }
  }
  return INFINITY;
}

Outcome hnrg_recovery(std::size_t threads) {
  Outcome o;
  HnrgConfig base;  // S_0 = 10, R = 4, L = 4, rho = 1
  base.mean_degree = 64;
  std::string infeasible;
  try {
    hnrg_probabilities(base);
  } catch (const Error& e) {
    infeasible = e.detail();
  }
  // Largest feasible mean degree: every p_l is linear in <k>.
  HnrgConfig unit = base;
  unit.mean_degree = 1.0;
  const HnrgLevels ul = hnrg_probabilities(unit);
  const double k_max = 1.0 / *std::max_element(ul.probabilities.begin(), ul.probabilities.end());

  // Recovery at the largest feasible degree.
  HnrgConfig top = base;
  top.mean_degree = k_max;
  const auto at_top = run_benchmark_sweep(hnrg_grid(top, {k_max}), 10, 606, threads);
  double min_top = 1.0;
  std::string top_line;
  for (const auto& lv : at_top[0].levels) {
    min_top = std::min(min_top, lv.mean_ami);
    top_line += fmt(" L%zu=%.3f", lv.level, lv.mean_ami);
  }

  // Half-rise points over a coarse feasible grid.
  const std::vector<double> grid{1, 2, 3, 4, 6, 8, 10, 12, 14, 16, k_max};
  const auto sweep = run_benchmark_sweep(hnrg_grid(base, grid), 5, 607, threads);
  std::vector<double> rise;
  std::string rise_line, crit_line;
  for (std::size_t l = 0; l < base.l; ++l) {
    std::vector<double> curve;
    for (const auto& cell : sweep) curve.push_back(cell.levels[l].mean_ami);
    rise.push_back(half_rise(grid, curve));
    rise_line += fmt(" L%zu=%.2f", l, rise.back());
    if (l >= 1) crit_line += fmt(" L%zu=%.3f", l, hnrg_critical_degree(base, l));
  }
  bool ordered = true;
  for (std::size_t l = 2; l < base.l; ++l) ordered &= rise[l] > rise[l - 1];

  const bool large_k_run = infeasible.empty();
  o.pass = large_k_run && min_top >= 0.9 && ordered;
  o.detail = large_k_run ? "ran at <k> = 64"
                         : fmt("<k> = 64 cannot be sampled on the default fixture (%s)",
                               infeasible.c_str());
  o.info.push_back(fmt("largest feasible <k> = %.4g; 10 instances there: mean AMI%s",
                       k_max, top_line.c_str()));
  o.info.push_back("AMI half-rise <k> per level:" + rise_line +
                   (ordered ? " (levels 1-3 increasing)" : " (levels 1-3 NOT increasing)"));
  o.info.push_back("critical <k>_c per level:" + crit_line);
  return o;
}

// ---- 7 ----
Outcome flat_recovery(std::size_t threads) {
  HnrgConfig c;
  c.s0 = 50;
  c.r = 10;
  c.l = 1;
  c.mean_degree = 48;
  std::vector<double> best_level(20), best_cut(20);
  parallel_for(20, threads, [&](std::size_t i) {
    HnrgConfig x = c;
    x.seed = instance_seed(707, i);
    const PlantedNetwork net = hnrg_sample(x);
    std::vector<WeightedEdge> edges;
    for (const auto& [u, v] : net.edges) edges.push_back({u, v, 1.0});
    const WeightedGraph g = WeightedGraph::from_edges(net.n_nodes, edges);
    const Linkage l = upgma_linkage(graph_cosine_distances(g, true));
    const HierarchyResult h = extract_hierarchy(l);
    double best = 0.0;
    for (const auto& level : h.levels) best = std::max(best, ami(level.partition, net.ground_truth[0]));
    best_level[i] = best;
    best_cut[i] = best_cut_ami(l, net.ground_truth[0]);
  });
  double mean_level = 0.0, mean_gap = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    mean_level += best_level[i] / 20.0;
    mean_gap += (best_cut[i] - best_level[i]) / 20.0;
  }
  Outcome o;
  o.pass = mean_level >= 0.95 && mean_gap <= 0.05;
  o.detail = fmt("N=500, 10 communities, <k>=%g: mean best-level AMI %.4f, mean gap to best cut %.4f",
                 c.mean_degree, mean_level, mean_gap);
  return o;
}

// ---- 8 ----
Outcome hb_fidelity() {
  HbConfig c;  // N = 1000, L = 3, p = (0.6, 0.25, 0.1, 0.05), degrees in [5, 70]
  double worst = 0.0;
  std::size_t min_deg = SIZE_MAX, max_deg = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    c.seed = instance_seed(808, i);
    const PlantedNetwork net = hb_sample(c);
    const auto counts = edges_per_level(net);
    for (std::size_t l = 0; l < counts.size(); ++l) {
      const double f = static_cast<double>(counts[l]) / static_cast<double>(net.edges.size());
      worst = std::max(worst, std::abs(f - c.edge_fractions[l]));
    }
    std::vector<std::size_t> deg(net.n_nodes, 0);
    for (const auto& [u, v] : net.edges) {
      ++deg[u];
      ++deg[v];
    }
    min_deg = std::min(min_deg, *std::min_element(deg.begin(), deg.end()));
    max_deg = std::max(max_deg, *std::max_element(deg.begin(), deg.end()));
  }
  Outcome o;
  o.pass = worst <= 0.02 && min_deg >= 5 && max_deg <= 70;
  o.detail = fmt("20 instances: max fraction error %.4f, degrees in [%zu, %zu]", worst, min_deg,
                 max_deg);
  return o;
}

// ---- 9 ----
double mi_of_labels(const std::vector<std::size_t>& u, const std::vector<std::size_t>& v,
                    std::size_t ku, std::size_t kv) {
  std::vector<long double> cell(ku * kv, 0), a(ku, 0), b(kv, 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    cell[u[i] * kv + v[i]] += 1;
    a[u[i]] += 1;
    b[v[i]] += 1;
  }
  const long double n = static_cast<long double>(u.size());
  long double mi = 0;
  for (std::size_t i = 0; i < ku; ++i) {
    for (std::size_t j = 0; j < kv; ++j) {
      const long double c = cell[i * kv + j];
      if (c > 0) mi += c / n * std::log(n * c / (a[i] * b[j]));
    }
  }
  return static_cast<double>(mi);
}

void integer_partitions(std::size_t n, std::size_t max_part, std::vector<std::size_t>& cur,
                        std::vector<std::vector<std::size_t>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (std::size_t p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    integer_partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

std::vector<std::size_t> labels_from_sizes(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> l;
  for (std::size_t c = 0; c < sizes.size(); ++c) l.insert(l.end(), sizes[c], c);
  return l;
}

Outcome ami_correctness() {
  Outcome o;
  std::mt19937_64 rng(909);

  // AMI(U, U) = 1
  bool self_ok = true;
  for (int t = 0; t < 50; ++t) {
    std::vector<std::size_t> u(100);
    for (auto& x : u) x = rng() % (2 + t % 7);
    self_ok &= ami(Partition(u), Partition(u)) == 1.0;
  }

  // exhaustive enumeration, N <= 8
  double worst_exact = 0.0;
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<std::vector<std::size_t>> parts;
    std::vector<std::size_t> cur;
    integer_partitions(n, n, cur, parts);
    for (const auto& a : parts) {
      for (const auto& b : parts) {
        const auto u = labels_from_sizes(a);
        auto v = labels_from_sizes(b);
        long double sum = 0;
        std::size_t count = 0;
        do {
          sum += mi_of_labels(u, v, a.size(), b.size());
          ++count;
        } while (std::next_permutation(v.begin(), v.end()));
        const double exact = static_cast<double>(sum / count);
        worst_exact = std::max(worst_exact, std::abs(expected_mi(a, b) - exact));
      }
    }
  }

  // Monte-Carlo permutation oracle, N = 50
  std::size_t mc_ok = 0;
  double worst_z = 0.0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t ku = 2 + rng() % 5, kv = 2 + rng() % 5;
    std::vector<std::size_t> u(50), v(50);
    for (std::size_t i = 0; i < 50; ++i) {
      u[i] = i < ku ? i : rng() % ku;
      v[i] = i < kv ? i : rng() % kv;
    }
    const double analytic = expected_mi(ContingencyTable(Partition(u), Partition(v)));
    double sum = 0, sq = 0;
    const std::size_t shuffles = 1000000;
    for (std::size_t s = 0; s < shuffles; ++s) {
      std::shuffle(v.begin(), v.end(), rng);
      const double mi = mi_of_labels(u, v, ku, kv);
      sum += mi;
      sq += mi * mi;
    }
    const double mean = sum / shuffles;
    const double se = std::sqrt((sq / shuffles - mean * mean) / shuffles);
    const double z = std::abs(mean - analytic) / se;
    worst_z = std::max(worst_z, z);
    if (z <= 3.0) ++mc_ok;
  }

  // independent random pairs
  double mean_ami = 0.0;
  std::vector<std::size_t> a(200), b(200);
  for (int t = 0; t < 1000; ++t) {
    for (auto& x : a) x = rng() % 4;
    for (auto& x : b) x = rng() % 4;
    mean_ami += ami(Partition(a), Partition(b)) / 1000.0;
  }

  o.pass = self_ok && worst_exact <= 1e-12 && mc_ok == 10 && std::abs(mean_ami) <= 0.05;
  o.detail = fmt("self AMI %s, exhaustive max gap %.2e, Monte-Carlo %zu/10 within 3 SE (max %.2f SE), "
                 "random-pair mean AMI %.4f",
                 self_ok ? "= 1" : "!= 1", worst_exact, mc_ok, worst_z, mean_ami);
  return o;
}

// ---- 10 ----
Outcome mcc_round_trip() {
  std::mt19937_64 rng(1010);
  std::size_t ok = 0;
  std::string first_error;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 199;
    const ConsensusTree tree = oracle::random_consensus_tree(n, 1 + rng() % 5, rng);
    try {
      const Linkage l = consensus_to_linkage(tree);
      Linkage::validate(l.to_raw(), n);
      std::set<std::size_t> comms(tree.s_c.begin(), tree.s_c.end());
      const Partition cut = cut_at_k(l, comms.size());
      const Partition truth(tree.s_c);
      const bool same = comms.size() == 1 ? cut == truth : ami(cut, truth) == 1.0;
      if (same) ++ok;
    } catch (const Error& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  Outcome o;
  o.pass = ok == 100;
  o.detail = fmt("%zu/100 trees round-trip with AMI = 1", ok) +
             (first_error.empty() ? "" : "; first error: " + first_error);
  return o;
}

// ---- 11 ----
Outcome nct_behaviour() {
  std::mt19937_64 rng(1111);
  auto draw = [&](double centre, double sigma, std::size_t count, SizeEnsemble& e) {
    std::normal_distribution<double> g(std::log10(centre), sigma);
    for (std::size_t i = 0; i < count; ++i) {
      e.sizes.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::pow(10.0, g(rng))))));
    }
  };
  SizeEnsemble bi;
  bi.instance_count = 100;
  draw(10, 0.2, 3000, bi);
  draw(3000, 0.15, 300, bi);
  SizeEnsemble uni;
  uni.instance_count = 100;
  draw(30, 0.3, 3000, uni);
  const NctResult rb = nct_estimate(bi);
  const NctResult ru = nct_estimate(uni);
  const auto edges = size_bin_edges();
  const bool edges_ok = edges.size() == 21 && edges.front() == 1.0 &&
                        std::abs(edges.back() - std::pow(10.0, 4.5)) <= 1e-9 * edges.back();
  Outcome o;
  o.pass = rb.threshold && *rb.threshold > 10.0 && *rb.threshold < 3000.0 && !ru.threshold &&
           edges_ok;
  o.detail = fmt("bimodal NCT %.2f, unimodal %s, bin edges [%.1f, %.1f]",
                 rb.threshold ? *rb.threshold : -1.0, ru.threshold ? "has a threshold" : "None",
                 edges.front(), edges.back());
  return o;
}

// ---- 12 ----
Outcome null_model() {
  std::mt19937_64 rng(1212);
  std::normal_distribution<double> g;
  TimeSeriesMatrix m(200, 300);
  for (double& x : m.values) x = g(rng);
  const auto offsets = circular_shift_offsets(m.rows, m.cols, 77);
  const TimeSeriesMatrix s = circular_shift_null(m, 77);
  bool rotation = true, multiset = true;
  double autocov_gap = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t t = 0; t < m.cols; ++t) {
      rotation &= s(r, (t + offsets[r]) % m.cols) == m(r, t);
    }
    std::vector<double> a(m.row(r).begin(), m.row(r).end()), b(s.row(r).begin(), s.row(r).end());
    // circular autocovariance, summed in the original time order for both
    const std::size_t o = offsets[r], n = m.cols;
    for (std::size_t lag = 0; lag < n; ++lag) {
      double x = 0.0, y = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        x += a[t] * a[(t + lag) % n];
        y += b[(t + o) % n] * b[(t + o + lag) % n];
      }
      autocov_gap = std::max(autocov_gap, std::abs(x - y));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    multiset &= a == b;
  }
  const TimeSeriesMatrix again = circular_shift_null(m, 77);
  const bool bytes = std::memcmp(again.values.data(), s.values.data(),
                                 s.values.size() * sizeof(double)) == 0;
  Outcome o;
  o.pass = rotation && multiset && autocov_gap == 0.0 && bytes;
  o.detail = fmt("multisets %s, autocovariance gap %.1e, rerun %s",
                 multiset ? "equal" : "differ", autocov_gap,
                 bytes ? "byte-identical" : "differs");
  return o;
}

// ---- 13 ----
DenseMatrix synthetic_traces(std::size_t rows, std::size_t t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const std::size_t groups = 40;
  DenseMatrix latent(groups, t);
  for (double& x : latent.values) x = g(rng);
  DenseMatrix m(rows, t);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = r % groups;
    for (std::size_t k = 0; k < t; ++k) m(r, k) = latent(c, k) + 1.5 * g(rng);
  }
  return m;
}

Outcome performance(std::size_t threads) {
  const std::size_t n = 10000, t_len = 500;
  const DenseMatrix traces = synthetic_traces(n, t_len, 1313);

  const auto t0 = std::chrono::steady_clock::now();
  CondensedDistances d = correlation_distances(traces, threads);
  const double condensed_bytes = static_cast<double>(d.values().size() * sizeof(double));
  UpgmaStats stats10k;
  const Linkage l = upgma_linkage(std::move(d), &stats10k);
  const HierarchyResult h = extract_hierarchy(l);
  const double secs = seconds_since(t0);

  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  const double peak = static_cast<double>(ru.ru_maxrss) * 1024.0;
  const double beyond = peak - condensed_bytes;

  std::vector<double> ns{2500, 5000, 10000}, work;
  for (std::size_t sub : {2500u, 5000u}) {
    std::vector<std::size_t> rows(sub);
    for (std::size_t i = 0; i < sub; ++i) rows[i] = i;
    UpgmaStats s;
    upgma_linkage(correlation_distances(select_rows(traces, rows), threads), &s);
    work.push_back(static_cast<double>(s.candidate_evaluations));
  }
  work.push_back(static_cast<double>(stats10k.candidate_evaluations));
  // least-squares c in work = c n^2
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    num += work[i] * ns[i] * ns[i];
    den += std::pow(ns[i], 4);
  }
  const double c = num / den;
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(work[i] / (c * ns[i] * ns[i]) - 1.0));
  }

  Outcome o;
  o.pass = secs <= 600.0 && beyond <= 2.0 * 1024 * 1024 * 1024 && worst <= 0.20;
  o.detail = fmt("%.1f s end to end (%zu threads), peak RSS %.0f MB of which %.0f MB beyond the "
                 "condensed matrix, quadratic fit within %.1f%%",
                 secs, threads, peak / 1048576.0, beyond / 1048576.0, 100.0 * worst);
  o.info.push_back(fmt("UPGMA evaluations / n^2: %.3f, %.3f, %.3f; %zu HCE levels",
                       work[0] / 6.25e6, work[1] / 2.5e7, work[2] / 1e8, h.levels.size()));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t threads = default_thread_count();
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // The performance check runs first so its peak RSS is its own.
  const std::vector<Criterion> all{
      {13, "Performance floor", [&] { return performance(threads); }},
      {1, "Fig. 1a exactness", fig1a},
      {2, "High-school tie resolution", high_school},
      {3, "Graph cosine toy", graph_cosine},
      {4, "UPGMA oracle equivalence", upgma_oracle},
      {5, "HNRG probability identity", hnrg_identity},
      {6, "HNRG recovery and transition ordering", [&] { return hnrg_recovery(threads); }},
      {7, "Flat-partition recovery", [&] { return flat_recovery(threads); }},
      {8, "HB generator fidelity", hb_fidelity},
      {9, "AMI correctness", ami_correctness},
      {10, "MCC round-trip", mcc_round_trip},
      {11, "NCT behavior", nct_behaviour},
      {12, "Null-model properties", null_model},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  std::vector<std::pair<int, Outcome>> results;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds_since(t0));
    for (const auto& line : o.info) std::printf("     info: %s\n", line.c_str());
    std::fflush(stdout);
    results.emplace_back(c.id, o);
  }
  std::size_t failed = 0;
  for (const auto& [id, o] : results) failed += o.pass ? 0 : 1;
  std::printf("%zu of %zu criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
