#pragma once

#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

namespace hce {

/// Row-major dense matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}
  DenseMatrix(std::size_t r, std::size_t c, std::vector<double> v);

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
};

/// Traces in rows, time points in columns.
using TimeSeriesMatrix = DenseMatrix;

/// Strict upper triangle of a symmetric distance matrix, pairs (i<j) in
/// row-major order.
class CondensedDistances {
 public:
  CondensedDistances() = default;
  explicit CondensedDistances(std::size_t n, double fill = 0.0);
  /// Takes ownership of `values`; checks length, finiteness and sign.
  CondensedDistances(std::size_t n, std::vector<double> values);

  static constexpr std::size_t pair_count(std::size_t n) {
    return n < 2 ? 0 : n * (n - 1) / 2;
  }
  /// Position of pair (i, j), i < j.
  static constexpr std::size_t index(std::size_t n, std::size_t i, std::size_t j) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

  std::size_t n() const noexcept { return n_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> mutable_values() noexcept { return values_; }

  /// Symmetric lookup; zero on the diagonal.
  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return i < j ? values_[index(n_, i, j)] : values_[index(n_, j, i)];
  }
  double& at_pair(std::size_t i, std::size_t j) {
    return i < j ? values_[index(n_, i, j)] : values_[index(n_, j, i)];
  }

  /// Rejects negative or non-finite entries.
  void check() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct WeightedEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 0.0;
};

/// Undirected graph with non-negative weights, stored as sorted adjacency
/// lists (self-weights kept apart). v_i(k) is weight(i, k).
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Each unordered pair may be listed once or in both directions; repeated
  /// listings must agree. Self-edges become self-weights. Zero weights are
  /// dropped.
  static WeightedGraph from_edges(std::size_t n, std::span<const WeightedEdge> edges);
  /// Dense symmetric weight matrix; the diagonal holds self-weights.
  static WeightedGraph from_dense(const DenseMatrix& weights);

  std::size_t n() const noexcept { return self_.size(); }
  std::span<const std::size_t> neighbors(std::size_t i) const;
  std::span<const double> weights(std::size_t i) const;
  double self_weight(std::size_t i) const { return self_[i]; }
  double weight(std::size_t i, std::size_t j) const;
  /// Euclidean norm of the connectivity row, self-weight included.
  double norm(std::size_t i) const;
  std::size_t edge_count() const noexcept { return neighbor_.size() / 2; }

 private:
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> neighbor_;
  std::vector<double> weight_;
  std::vector<double> self_;
};

/// <v_i, v_j>_G: the Euclidean dot product with the entries at positions i and
/// j replaced by the reciprocal edge product and the self-weight product.
double graph_dot(const WeightedGraph& g, std::size_t i, std::size_t j);

/// Plain Euclidean dot product of two connectivity rows.
double standard_dot(const WeightedGraph& g, std::size_t i, std::size_t j);

/// d = sqrt(2 (1 - cos)), cos from graph_dot, clamped to [-1, 1]. Nodes
/// without incident weight raise ZeroNormNode unless `isolated_orthogonal`,
/// which gives them cos = 0 to every other node.
CondensedDistances graph_cosine_distances(const WeightedGraph& g,
                                          bool isolated_orthogonal = false);

/// d = sqrt(2 (1 - r)) with Pearson r (population moments) between rows.
/// `threads` row blocks are filled concurrently; the result does not depend
/// on the thread count.
CondensedDistances correlation_distances(const TimeSeriesMatrix& series,
                                         std::size_t threads = 1);

/// Pearson correlation of two equal-length vectors (population moments).
double pearson(std::span<const double> u, std::span<const double> v);

/// Rows are points, columns coordinates.
CondensedDistances euclidean_distances(const DenseMatrix& points);

/// Upper triangle of a symmetric square distance matrix.
CondensedDistances condensed_from_square(const DenseMatrix& square);

/// Converts a symmetric correlation matrix to sqrt(2 (1 - r)) distances.
CondensedDistances distances_from_correlation_matrix(const DenseMatrix& r);

}  // namespace hce
