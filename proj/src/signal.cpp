#include "hce/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hce/error.hpp"
#include "hce/seed.hpp"

namespace hce {

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (x.empty() || *lo == *hi) {
    throw Error(ErrorCode::ZeroVariance, "trace has zero variance");
  }
  const double t = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= t;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / t)};
}

Moments population(const std::vector<double>& x) {
  if (x.empty()) return {};
  const double t = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= t;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / t)};
}

}  // namespace

double skewness(std::span<const double> trace) {
  if (trace.size() < 3) {
    throw Error(ErrorCode::InvalidConfig, "skewness needs at least 3 time points");
  }
  const Moments m = moments(trace);
  double s3 = 0.0;
  for (double v : trace) {
    const double z = (v - m.mean) / m.sd;
    s3 += z * z * z;
  }
  return s3 / static_cast<double>(trace.size());
}

double max_zscore(std::span<const double> trace) {
  const Moments m = moments(trace);
  const double hi = *std::max_element(trace.begin(), trace.end());
  return (hi - m.mean) / m.sd;
}

RoiFilterResult filter_rois(const TimeSeriesMatrix& m) {
  RoiFilterResult out;
  out.rows.resize(m.rows);
  std::vector<double> skews, maxz;
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    if (row.size() < 3 || *lo == *hi) {
      out.rows[r].degenerate = true;
      continue;
    }
    out.rows[r].skewness = skewness(row);
    out.rows[r].max_z = max_zscore(row);
    skews.push_back(out.rows[r].skewness);
    maxz.push_back(out.rows[r].max_z);
  }
  if (skews.empty()) {
    throw Error(ErrorCode::AllRowsDegenerate, "every trace has zero variance");
  }
  const Moments sk = population(skews), mz = population(maxz);
  out.skew_mean = sk.mean;
  out.skew_std = sk.sd;
  out.max_z_mean = mz.mean;
  out.max_z_std = mz.sd;
  for (std::size_t r = 0; r < m.rows; ++r) {
    RoiDiagnostics& d = out.rows[r];
    if (d.degenerate) continue;
    d.skew_ok = std::abs(d.skewness - sk.mean) <= sk.sd;
    d.max_z_ok = mz.sd == 0.0 || d.max_z < mz.mean + mz.sd;
    d.kept = d.skew_ok && d.max_z_ok;
    if (d.kept) out.kept.push_back(r);
  }
  return out;
}

TimeSeriesMatrix select_rows(const TimeSeriesMatrix& m, std::span<const std::size_t> rows) {
  TimeSeriesMatrix out(rows.size(), m.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

std::vector<std::size_t> circular_shift_offsets(std::size_t rows, std::size_t t,
                                                std::uint64_t seed) {
  if (t < 2) {
    throw Error(ErrorCode::InvalidConfig, "circular shifts need at least 2 time points");
  }
  std::vector<std::size_t> offsets(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::mt19937_64 rng(derive_seed(seed, "circular-shift", r));
    std::uniform_int_distribution<std::size_t> pick(1, t - 1);
    offsets[r] = pick(rng);
  }
  return offsets;
}

TimeSeriesMatrix circular_shift_null(const TimeSeriesMatrix& m, std::uint64_t seed) {
  const auto offsets = circular_shift_offsets(m.rows, m.cols, seed);
  TimeSeriesMatrix out(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto src = m.row(r);
    auto dst = out.row(r);
    const std::size_t o = offsets[r];
    // out[(t + o) mod T] = in[t]
    std::copy(src.begin(), src.end() - static_cast<std::ptrdiff_t>(o),
              dst.begin() + static_cast<std::ptrdiff_t>(o));
    std::copy(src.end() - static_cast<std::ptrdiff_t>(o), src.end(), dst.begin());
  }
  return out;
}

std::vector<double> size_bin_edges() {
  std::vector<double> edges(kSizeBins + 1);
  for (std::size_t i = 0; i <= kSizeBins; ++i) {
    edges[i] = std::pow(10.0, kLogSizeMax * static_cast<double>(i) /
                                  static_cast<double>(kSizeBins));
  }
  return edges;
}

NctResult nct_estimate(const SizeEnsemble& ensemble) {
  if (ensemble.sizes.empty() || ensemble.instance_count == 0) {
    throw Error(ErrorCode::EmptyEnsemble, "null size ensemble is empty");
  }
  NctResult out;
  out.bin_edges = size_bin_edges();
  out.histogram.assign(kSizeBins, 0.0);
  std::vector<double> logs;
  logs.reserve(ensemble.sizes.size());
  for (std::size_t s : ensemble.sizes) {
    if (s == 0) {
      throw Error(ErrorCode::InvalidConfig, "community sizes must be at least 1");
    }
    const double x = std::log10(static_cast<double>(s));
    logs.push_back(x);
    auto bin = static_cast<std::size_t>(x / kLogSizeMax * static_cast<double>(kSizeBins));
    out.histogram[std::min(bin, kSizeBins - 1)] += 1.0;
  }
  for (double& h : out.histogram) h /= static_cast<double>(ensemble.instance_count);

  const Moments m = population(logs);
  const double per_instance = static_cast<double>(logs.size()) /
                              static_cast<double>(ensemble.instance_count);
  out.bandwidth = m.sd * std::pow(per_instance, -0.2);

  out.grid.resize(kKdeGrid);
  out.density.assign(kKdeGrid, 0.0);
  for (std::size_t g = 0; g < kKdeGrid; ++g) {
    out.grid[g] = kLogSizeMax * static_cast<double>(g) / static_cast<double>(kKdeGrid - 1);
  }
  if (out.bandwidth == 0.0) return out;  // a single distinct size: one mode

  // Equal sizes share one kernel.
  std::sort(logs.begin(), logs.end());
  const double norm = 1.0 / (static_cast<double>(logs.size()) * out.bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < logs.size();) {
    std::size_t j = i;
    while (j < logs.size() && logs[j] == logs[i]) ++j;
    const double weight = static_cast<double>(j - i) * norm;
    for (std::size_t g = 0; g < kKdeGrid; ++g) {
      const double z = (out.grid[g] - logs[i]) / out.bandwidth;
      out.density[g] += weight * std::exp(-0.5 * z * z);
    }
    i = j;
  }
  for (std::size_t g = kKdeGrid - 2; g >= 1; --g) {
    if (out.density[g] < out.density[g - 1] && out.density[g] < out.density[g + 1]) {
      out.threshold = std::pow(10.0, out.grid[g]);
      break;
    }
  }
  return out;
}

std::vector<std::size_t> filter_communities_by_nct(const Partition& partition,
                                                   std::optional<double> nct) {
  std::vector<std::size_t> sizes(partition.community_count(), 0);
  for (std::size_t label : partition.labels()) ++sizes[label];
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (!nct || static_cast<double>(sizes[c]) > *nct) keep.push_back(c);
  }
  return keep;
}

}  // namespace hce
