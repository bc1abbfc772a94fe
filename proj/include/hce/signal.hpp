#pragma once

// Trace quality filtering, circular-shift surrogates, and the null-community
// threshold (NCT) of a pooled community-size distribution.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hce/distance.hpp"
#include "hce/linkage.hpp"

namespace hce {

/// Population-moment skewness. Throws ZeroVariance for constant traces.
double skewness(std::span<const double> trace);

/// Largest z-score of the trace (population moments).
double max_zscore(std::span<const double> trace);

struct RoiDiagnostics {
  bool degenerate = false;  // zero variance, excluded from the statistics
  double skewness = 0.0;
  double max_z = 0.0;
  bool skew_ok = false;
  bool max_z_ok = false;
  bool kept = false;
};

struct RoiFilterResult {
  std::vector<std::size_t> kept;
  std::vector<RoiDiagnostics> rows;
  double skew_mean = 0.0, skew_std = 0.0;
  double max_z_mean = 0.0, max_z_std = 0.0;
};

/// Keeps rows whose skewness lies within one standard deviation of the mean
/// skewness and whose max z-score is below mean + one standard deviation of
/// the max z-scores. When all max z-scores are equal the second test passes.
RoiFilterResult filter_rois(const TimeSeriesMatrix& m);

TimeSeriesMatrix select_rows(const TimeSeriesMatrix& m, std::span<const std::size_t> rows);

/// Offset of every row, uniform in {1, ..., T-1}, derived from (seed, row).
std::vector<std::size_t> circular_shift_offsets(std::size_t rows, std::size_t t,
                                                std::uint64_t seed);

/// Rotates row r forward by its offset: out[(t + o) mod T] = in[t].
TimeSeriesMatrix circular_shift_null(const TimeSeriesMatrix& m, std::uint64_t seed);

/// Community sizes pooled over null instances.
struct SizeEnsemble {
  std::vector<std::size_t> sizes;
  std::size_t instance_count = 1;
};

inline constexpr std::size_t kSizeBins = 20;
inline constexpr double kLogSizeMax = 4.5;
inline constexpr std::size_t kKdeGrid = 512;

/// 21 edges spaced logarithmically from 10^0 to 10^4.5.
std::vector<double> size_bin_edges();

struct NctResult {
  std::optional<double> threshold;   // in size units
  double bandwidth = 0.0;            // in log10 units
  std::vector<double> bin_edges;
  std::vector<double> histogram;     // mean count per instance and bin
  std::vector<double> grid;          // log10 size
  std::vector<double> density;
};

/// Gaussian KDE of log10(size) on a 512-point grid over [0, 4.5]; the NCT is
/// the rightmost strict interior local minimum. The bandwidth follows Scott's
/// rule with the per-instance sample count, so duplicating an ensemble (sizes
/// and instance count together) leaves the estimate unchanged.
NctResult nct_estimate(const SizeEnsemble& ensemble);

/// Labels of communities with size strictly greater than the threshold,
/// ascending. No threshold keeps every community.
std::vector<std::size_t> filter_communities_by_nct(const Partition& partition,
                                                   std::optional<double> nct);

}  // namespace hce
