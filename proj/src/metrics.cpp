#include "hce/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "hce/error.hpp"

namespace hce {

namespace {

// Terms are summed smallest first so that equal multisets of terms give
// bit-identical sums regardless of the order they were produced in.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

std::vector<std::size_t> margin_sizes(const Partition& p) {
  std::vector<std::size_t> sizes(p.community_count(), 0);
  for (std::size_t label : p.labels()) ++sizes[label];
  return sizes;
}

std::vector<std::pair<std::size_t, std::size_t>> multiplicities(
    const std::vector<std::size_t>& sizes) {
  std::map<std::size_t, std::size_t> m;
  for (std::size_t s : sizes) {
    if (s > 0) ++m[s];
  }
  return {m.begin(), m.end()};
}

}  // namespace

ContingencyTable::ContingencyTable(const Partition& u, const Partition& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "partitions cover " + std::to_string(u.size()) + " and " +
                    std::to_string(v.size()) + " nodes");
  }
  total_ = u.size();
  a_ = margin_sizes(u);
  b_ = margin_sizes(v);
  std::vector<std::pair<std::size_t, std::size_t>> pairs(total_);
  for (std::size_t i = 0; i < total_; ++i) pairs[i] = {u.label(i), v.label(i)};
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    cells_.push_back({pairs[i].first, pairs[i].second, j - i});
    i = j;
  }
}

double entropy(const std::vector<std::size_t>& sizes, std::size_t total) {
  std::vector<double> terms;
  const double n = static_cast<double>(total);
  for (std::size_t s : sizes) {
    if (s == 0) continue;
    const double a = static_cast<double>(s);
    terms.push_back(a / n * std::log(n / a));
  }
  return sorted_sum(terms);
}

double entropy(const Partition& p) { return entropy(margin_sizes(p), p.size()); }

double mutual_information(const ContingencyTable& table) {
  const double n = static_cast<double>(table.total());
  std::vector<double> terms;
  terms.reserve(table.cells().size());
  for (const auto& c : table.cells()) {
    const double nij = static_cast<double>(c.count);
    const double num = n * nij;
    const double den = static_cast<double>(table.row_sums()[c.row]) *
                       static_cast<double>(table.col_sums()[c.col]);
    terms.push_back(nij / n * std::log(num / den));
  }
  return sorted_sum(terms);
}

double mutual_information(const Partition& u, const Partition& v) {
  return mutual_information(ContingencyTable(u, v));
}

double expected_mi(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::size_t total = std::accumulate(a.begin(), a.end(), std::size_t{0});
  if (total != std::accumulate(b.begin(), b.end(), std::size_t{0})) {
    throw Error(ErrorCode::LengthMismatch, "margins sum to different totals");
  }
  if (total == 0) return 0.0;
  std::vector<double> lf(total + 1, 0.0);
  for (std::size_t i = 1; i <= total; ++i) {
    lf[i] = lf[i - 1] + std::log(static_cast<double>(i));
  }
  const double n = static_cast<double>(total);
  const double log_n = std::log(n);

  // Cells only depend on the margin pair, so equal sizes are evaluated once.
  const auto ga = multiplicities(a), gb = multiplicities(b);
  double emi = 0.0;
  for (const auto& [ai, ca] : ga) {
    for (const auto& [bj, cb] : gb) {
      const std::size_t lo = std::max<std::size_t>(1, ai + bj > total ? ai + bj - total : 0);
      const std::size_t hi = std::min(ai, bj);
      const double fixed = lf[ai] + lf[bj] + lf[total - ai] + lf[total - bj] - lf[total];
      const double log_ab = std::log(static_cast<double>(ai)) + std::log(static_cast<double>(bj));
      double cell = 0.0;
      for (std::size_t k = lo; k <= hi; ++k) {
        const double kk = static_cast<double>(k);
        const double log_p =
            fixed - lf[k] - lf[ai - k] - lf[bj - k] - lf[total - ai - bj + k];
        cell += kk / n * (log_n + std::log(kk) - log_ab) * std::exp(log_p);
      }
      emi += static_cast<double>(ca) * static_cast<double>(cb) * cell;
    }
  }
  return emi;
}

double expected_mi(const ContingencyTable& table) {
  return expected_mi(table.row_sums(), table.col_sums());
}

AmiReport ami_report(const Partition& u, const Partition& v) {
  const ContingencyTable table(u, v);
  AmiReport r;
  r.mi = mutual_information(table);
  r.emi = expected_mi(table);
  r.h_u = entropy(table.row_sums(), table.total());
  r.h_v = entropy(table.col_sums(), table.total());
  if (r.h_u == 0.0 && r.h_v == 0.0) {
    r.ami = 1.0;
    return r;
  }
  const double denom = std::max(r.h_u, r.h_v) - r.emi;
  r.ami = denom == 0.0 ? 0.0 : (r.mi - r.emi) / denom;
  return r;
}

double ami(const Partition& u, const Partition& v) { return ami_report(u, v).ami; }

RegionMatch jaccard_assign(const std::vector<std::size_t>& community,
                           const std::vector<Region>& regions) {
  if (community.empty()) {
    throw Error(ErrorCode::EmptyCommunity, "cannot match an empty community");
  }
  if (regions.empty()) {
    throw Error(ErrorCode::InvalidConfig, "no regions to match against");
  }
  std::vector<std::size_t> c = community;
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());

  RegionMatch best;
  best.jaccard = -1.0;
  std::vector<std::size_t> x, common;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    x = regions[r].nodes;
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    common.clear();
    std::set_intersection(c.begin(), c.end(), x.begin(), x.end(),
                          std::back_inserter(common));
    const double inter = static_cast<double>(common.size());
    const double uni = static_cast<double>(c.size() + x.size() - common.size());
    const double j = inter / uni;
    if (j > best.jaccard) {
      best.region = r;
      best.jaccard = j;
    }
  }
  best.name = regions[best.region].name;
  best.no_overlap = best.jaccard == 0.0;
  return best;
}

}  // namespace hce
