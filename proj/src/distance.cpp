#include "hce/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hce/error.hpp"
#include "hce/parallel.hpp"

namespace hce {

namespace {

double cosine_to_distance(double cosine) {
  cosine = std::clamp(cosine, -1.0, 1.0);
  return std::sqrt(2.0 * (1.0 - cosine));
}

// Sum of v_i(k) v_j(k) over common neighbours k (k != i, j), ascending k.
double common_neighbour_sum(const WeightedGraph& g, std::size_t i, std::size_t j) {
  const auto ni = g.neighbors(i), nj = g.neighbors(j);
  const auto wi = g.weights(i), wj = g.weights(j);
  double sum = 0.0;
  std::size_t a = 0, b = 0;
  while (a < ni.size() && b < nj.size()) {
    if (ni[a] < nj[b]) {
      ++a;
    } else if (nj[b] < ni[a]) {
      ++b;
    } else {
      if (ni[a] != i && ni[a] != j) sum += wi[a] * wj[b];
      ++a;
      ++b;
    }
  }
  return sum;
}

void check_node(const WeightedGraph& g, std::size_t i) {
  if (i >= g.n()) {
    throw Error(ErrorCode::IdOutOfRange,
                "node " + std::to_string(i) + " not in graph of " +
                    std::to_string(g.n()) + " nodes",
                i);
  }
}

// Z-scored copy of every row; throws on a constant row.
DenseMatrix zscore_rows(const TimeSeriesMatrix& series) {
  DenseMatrix z(series.rows, series.cols);
  const double t = static_cast<double>(series.cols);
  for (std::size_t r = 0; r < series.rows; ++r) {
    const auto x = series.row(r);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= t;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= t;
    if (!(var > 0.0) || !std::isfinite(var)) {
      throw Error(ErrorCode::ConstantRow,
                  "row " + std::to_string(r) + " has zero variance", r);
    }
    const double sd = std::sqrt(var);
    auto out = z.row(r);
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = (x[c] - mean) / sd;
  }
  return z;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t r, std::size_t c, std::vector<double> v)
    : rows(r), cols(c), values(std::move(v)) {
  if (values.size() != rows * cols) {
    throw Error(ErrorCode::Parse, "matrix of " + std::to_string(rows) + "x" +
                                      std::to_string(cols) + " needs " +
                                      std::to_string(rows * cols) + " values");
  }
}

CondensedDistances::CondensedDistances(std::size_t n, double fill)
    : n_(n), values_(pair_count(n), fill) {}

CondensedDistances::CondensedDistances(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (values_.size() != pair_count(n)) {
    throw Error(ErrorCode::Parse, "condensed matrix for n=" + std::to_string(n) +
                                      " needs " + std::to_string(pair_count(n)) +
                                      " values");
  }
  check();
}

void CondensedDistances::check() const {
  for (std::size_t p = 0; p < values_.size(); ++p) {
    if (!std::isfinite(values_[p])) {
      throw Error(ErrorCode::NonFiniteDistance,
                  "entry " + std::to_string(p) + " is not finite", p);
    }
    if (values_[p] < 0.0) {
      throw Error(ErrorCode::NegativeDistance,
                  "entry " + std::to_string(p) + " is negative", p);
    }
  }
}

WeightedGraph WeightedGraph::from_edges(std::size_t n,
                                        std::span<const WeightedEdge> edges) {
  struct Pair {
    std::size_t a, b;
    double w;
  };
  WeightedGraph g;
  g.self_.assign(n, 0.0);
  std::vector<Pair> pairs;
  pairs.reserve(edges.size());
  std::vector<bool> self_seen(n, false);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    if (edge.src >= n || edge.dst >= n) {
      throw Error(ErrorCode::IdOutOfRange,
                  "edge " + std::to_string(e) + " references a node >= " +
                      std::to_string(n),
                  e);
    }
    if (!std::isfinite(edge.weight) || edge.weight < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "edge " + std::to_string(e) + " has weight " +
                      std::to_string(edge.weight),
                  e);
    }
    if (edge.src == edge.dst) {
      if (self_seen[edge.src] && g.self_[edge.src] != edge.weight) {
        throw Error(ErrorCode::AsymmetricWeights,
                    "conflicting self-weights for node " + std::to_string(edge.src),
                    e);
      }
      self_seen[edge.src] = true;
      g.self_[edge.src] = edge.weight;
      continue;
    }
    pairs.push_back({std::min(edge.src, edge.dst), std::max(edge.src, edge.dst),
                     edge.weight});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  std::vector<Pair> unique;
  unique.reserve(pairs.size());
  for (const Pair& p : pairs) {
    if (!unique.empty() && unique.back().a == p.a && unique.back().b == p.b) {
      if (unique.back().w != p.w) {
        throw Error(ErrorCode::AsymmetricWeights,
                    "pair (" + std::to_string(p.a) + ", " + std::to_string(p.b) +
                        ") listed with different weights");
      }
      continue;
    }
    unique.push_back(p);
  }

  std::vector<std::size_t> degree(n, 0);
  for (const Pair& p : unique) {
    if (p.w == 0.0) continue;
    ++degree[p.a];
    ++degree[p.b];
  }
  g.offset_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offset_[i + 1] = g.offset_[i] + degree[i];
  g.neighbor_.resize(g.offset_[n]);
  g.weight_.resize(g.offset_[n]);
  std::vector<std::size_t> fill(g.offset_.begin(), g.offset_.end() - 1);
  // `unique` is sorted by (a, b), so each row receives its lower neighbours
  // (ascending) before its higher ones (ascending): lists come out sorted.
  for (const Pair& p : unique) {
    if (p.w == 0.0) continue;
    g.neighbor_[fill[p.a]] = p.b;
    g.weight_[fill[p.a]++] = p.w;
    g.neighbor_[fill[p.b]] = p.a;
    g.weight_[fill[p.b]++] = p.w;
  }
  return g;
}

WeightedGraph WeightedGraph::from_dense(const DenseMatrix& w) {
  if (w.rows != w.cols) {
    throw Error(ErrorCode::Parse, "adjacency matrix must be square");
  }
  const std::size_t n = w.rows;
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (w(i, j) != w(j, i)) {
        throw Error(ErrorCode::AsymmetricWeights,
                    "w(" + std::to_string(i) + "," + std::to_string(j) +
                        ") != w(" + std::to_string(j) + "," + std::to_string(i) +
                        ")",
                    i);
      }
      if (w(i, j) != 0.0) edges.push_back({i, j, w(i, j)});
    }
  }
  return from_edges(n, edges);
}

std::span<const std::size_t> WeightedGraph::neighbors(std::size_t i) const {
  return {neighbor_.data() + offset_[i], offset_[i + 1] - offset_[i]};
}

std::span<const double> WeightedGraph::weights(std::size_t i) const {
  return {weight_.data() + offset_[i], offset_[i + 1] - offset_[i]};
}

double WeightedGraph::weight(std::size_t i, std::size_t j) const {
  if (i == j) return self_[i];
  const auto nb = neighbors(i);
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return 0.0;
  return weights(i)[static_cast<std::size_t>(it - nb.begin())];
}

double WeightedGraph::norm(std::size_t i) const {
  double sq = 0.0;
  for (double w : weights(i)) sq += w * w;
  sq += self_[i] * self_[i];
  return std::sqrt(sq);
}

double graph_dot(const WeightedGraph& g, std::size_t i, std::size_t j) {
  check_node(g, i);
  check_node(g, j);
  if (i == j) {
    const double n = g.norm(i);
    return n * n;
  }
  double sum = common_neighbour_sum(g, i, j);
  const double wij = g.weight(i, j);
  sum += wij * wij;
  sum += g.self_weight(i) * g.self_weight(j);
  return sum;
}

double standard_dot(const WeightedGraph& g, std::size_t i, std::size_t j) {
  check_node(g, i);
  check_node(g, j);
  if (i == j) {
    const double n = g.norm(i);
    return n * n;
  }
  const double wij = g.weight(i, j);
  return common_neighbour_sum(g, i, j) + g.self_weight(i) * wij +
         wij * g.self_weight(j);
}

CondensedDistances graph_cosine_distances(const WeightedGraph& g, bool isolated_orthogonal) {
  const std::size_t n = g.n();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = g.norm(i);
    if (!(norms[i] > 0.0) && !isolated_orthogonal) {
      throw Error(ErrorCode::ZeroNormNode,
                  "node " + std::to_string(i) + " has no incident weight", i);
    }
  }
  CondensedDistances d(n, 0.0);
  auto values = d.mutable_values();
  // Common-neighbour products, accumulated per pair in ascending k.
  for (std::size_t k = 0; k < n; ++k) {
    const auto nb = g.neighbors(k);
    const auto w = g.weights(k);
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        values[CondensedDistances::index(n, nb[a], nb[b])] += w[a] * w[b];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = g.neighbors(i);
    const auto w = g.weights(i);
    for (std::size_t a = 0; a < nb.size(); ++a) {
      if (nb[a] > i) values[CondensedDistances::index(n, i, nb[a])] += w[a] * w[a];
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double si = g.self_weight(i);
    std::size_t p = CondensedDistances::index(n, i, i + 1);
    for (std::size_t j = i + 1; j < n; ++j, ++p) {
      const double dot = values[p] + si * g.self_weight(j);
      const double den = norms[i] * norms[j];
      values[p] = cosine_to_distance(den > 0.0 ? dot / den : 0.0);
    }
  }
  return d;
}

double pearson(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::LengthMismatch, "series lengths differ");
  }
  DenseMatrix m(2, u.size());
  std::copy(u.begin(), u.end(), m.row(0).begin());
  std::copy(v.begin(), v.end(), m.row(1).begin());
  const DenseMatrix z = zscore_rows(m);
  double acc = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) acc += z(0, t) * z(1, t);
  return acc / static_cast<double>(u.size());
}

CondensedDistances correlation_distances(const TimeSeriesMatrix& series,
                                         std::size_t threads) {
  const std::size_t n = series.rows;
  const std::size_t t_len = series.cols;
  const DenseMatrix z = zscore_rows(series);
  const double inv_t = 1.0 / static_cast<double>(t_len);
  CondensedDistances d(n, 0.0);
  auto values = d.mutable_values();

  auto fill_row = [&](std::size_t i) {
    const double* zi = z.values.data() + i * t_len;
    double* out = values.data() + CondensedDistances::index(n, i, i + 1);
    std::size_t j = i + 1;
    // Four partner rows at a time; each pair still sums in ascending t.
    for (; j + 3 < n; j += 4) {
      const double* z0 = z.values.data() + j * t_len;
      const double* z1 = z0 + t_len;
      const double* z2 = z1 + t_len;
      const double* z3 = z2 + t_len;
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      for (std::size_t t = 0; t < t_len; ++t) {
        const double x = zi[t];
        a0 += x * z0[t];
        a1 += x * z1[t];
        a2 += x * z2[t];
        a3 += x * z3[t];
      }
      *out++ = cosine_to_distance(a0 * inv_t);
      *out++ = cosine_to_distance(a1 * inv_t);
      *out++ = cosine_to_distance(a2 * inv_t);
      *out++ = cosine_to_distance(a3 * inv_t);
    }
    for (; j < n; ++j) {
      const double* zj = z.values.data() + j * t_len;
      double a = 0.0;
      for (std::size_t t = 0; t < t_len; ++t) a += zi[t] * zj[t];
      *out++ = cosine_to_distance(a * inv_t);
    }
  };
  parallel_for(n > 0 ? n - 1 : 0, threads, fill_row);
  return d;
}

CondensedDistances euclidean_distances(const DenseMatrix& points) {
  for (std::size_t p = 0; p < points.values.size(); ++p) {
    if (!std::isfinite(points.values[p])) {
      throw Error(ErrorCode::NonFiniteDistance,
                  "coordinate of point " + std::to_string(p / std::max<std::size_t>(points.cols, 1)) +
                      " is not finite",
                  p / std::max<std::size_t>(points.cols, 1));
    }
  }
  const std::size_t n = points.rows;
  CondensedDistances d(n, 0.0);
  auto values = d.mutable_values();
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = points.row(i);
    for (std::size_t j = i + 1; j < n; ++j, ++p) {
      const auto b = points.row(j);
      double sq = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
      values[p] = std::sqrt(sq);
    }
  }
  return d;
}

CondensedDistances condensed_from_square(const DenseMatrix& square) {
  if (square.rows != square.cols) {
    throw Error(ErrorCode::Parse, "distance matrix must be square");
  }
  const std::size_t n = square.rows;
  std::vector<double> values;
  values.reserve(CondensedDistances::pair_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (square(i, j) != square(j, i)) {
        throw Error(ErrorCode::AsymmetricWeights,
                    "distance matrix is not symmetric at (" + std::to_string(i) +
                        ", " + std::to_string(j) + ")",
                    i);
      }
      values.push_back(square(i, j));
    }
  }
  return CondensedDistances(n, std::move(values));
}

CondensedDistances distances_from_correlation_matrix(const DenseMatrix& r) {
  if (r.rows != r.cols) {
    throw Error(ErrorCode::Parse, "correlation matrix must be square");
  }
  const std::size_t n = r.rows;
  std::vector<double> values;
  values.reserve(CondensedDistances::pair_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!std::isfinite(r(i, j))) {
        throw Error(ErrorCode::NonFiniteDistance,
                    "correlation (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") is not finite",
                    i);
      }
      values.push_back(cosine_to_distance(r(i, j)));
    }
  }
  return CondensedDistances(n, std::move(values));
}

}  // namespace hce
