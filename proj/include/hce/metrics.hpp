#pragma once

// Partition comparison: mutual information, its expectation under random
// relabelling (hypergeometric model), adjusted mutual information, and
// Jaccard-based matching of communities to named regions. All in nats.

#include <cstddef>
#include <string>
#include <vector>

#include "hce/linkage.hpp"

namespace hce {

class ContingencyTable {
 public:
  struct Cell {
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t count = 0;
  };

  /// Throws LengthMismatch if the partitions cover different node counts.
  ContingencyTable(const Partition& u, const Partition& v);

  std::size_t total() const noexcept { return total_; }
  const std::vector<std::size_t>& row_sums() const noexcept { return a_; }
  const std::vector<std::size_t>& col_sums() const noexcept { return b_; }
  /// Non-zero cells, ordered by (row, col).
  const std::vector<Cell>& cells() const noexcept { return cells_; }

 private:
  std::size_t total_ = 0;
  std::vector<std::size_t> a_, b_;
  std::vector<Cell> cells_;
};

double entropy(const std::vector<std::size_t>& sizes, std::size_t total);
double entropy(const Partition& p);

double mutual_information(const ContingencyTable& table);
double mutual_information(const Partition& u, const Partition& v);

/// E[MI] over all tables with the given margins. Margins must sum to the
/// same total.
double expected_mi(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);
double expected_mi(const ContingencyTable& table);

struct AmiReport {
  double mi = 0.0;
  double emi = 0.0;
  double h_u = 0.0;
  double h_v = 0.0;
  double ami = 0.0;
};

/// (MI - E[MI]) / (max(H_U, H_V) - E[MI]). Two single-community partitions
/// give 1; any other zero denominator gives 0.
AmiReport ami_report(const Partition& u, const Partition& v);
double ami(const Partition& u, const Partition& v);

struct Region {
  std::string name;
  std::vector<std::size_t> nodes;
};

struct RegionMatch {
  std::size_t region = 0;  // index into the region list
  std::string name;
  double jaccard = 0.0;
  bool no_overlap = false;  // best Jaccard is 0
};

/// Region with the largest |C ∩ X| / |C ∪ X|; ties go to the earlier region.
RegionMatch jaccard_assign(const std::vector<std::size_t>& community,
                           const std::vector<Region>& regions);

}  // namespace hce
