#pragma once

// File formats. Text readers report "path:line: message" in Parse errors;
// unreadable or unwritable files raise Io errors.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hce/distance.hpp"
#include "hce/linkage.hpp"
#include "hce/mcc.hpp"
#include "hce/metrics.hpp"

namespace hce::io {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

/// %.17g
std::string format_double(double x);

// Linkage CSV: header left,right,distance,size.
Linkage read_linkage_csv(const fs::path& path);
std::string linkage_csv(const Linkage& linkage);
void write_linkage_csv(const fs::path& path, const Linkage& linkage);

// Partition CSV: header node,label. `node_ids` maps partition index to the
// node id written (defaults to the index).
Partition read_partition_csv(const fs::path& path);
std::string partition_csv(const Partition& p,
                          std::span<const std::size_t> node_ids = {});
void write_partition_csv(const fs::path& path, const Partition& p,
                         std::span<const std::size_t> node_ids = {});

struct EdgeList {
  std::size_t n_nodes = 0;  // max id + 1
  std::vector<WeightedEdge> edges;
};

/// TSV src<TAB>dst[<TAB>weight]; weight defaults to 1. Lines starting with
/// '#' are skipped. With `log1p` every weight f becomes log(1 + f).
EdgeList read_edge_list(const fs::path& path, bool log1p = false);
void write_edge_list(const fs::path& path,
                     std::span<const std::pair<std::size_t, std::size_t>> edges);

/// Numeric CSV without header; every row must have the same width.
DenseMatrix read_numeric_csv(const fs::path& path);
void write_numeric_csv(const fs::path& path, const DenseMatrix& m);

/// Square matrix: binary (magic HCEM, u32 n, u32 dtype tag 8 = float64 or
/// 4 = float32, 4 reserved bytes, then n*n row-major values) or CSV, chosen
/// by content.
DenseMatrix read_dense_matrix(const fs::path& path);
void write_dense_matrix_binary(const fs::path& path, const DenseMatrix& m);

/// Traces: binary (magic HCET, u32 rows, u32 cols, float64 data) or CSV.
DenseMatrix read_time_series(const fs::path& path);
void write_time_series_binary(const fs::path& path, const DenseMatrix& m);

/// roi,x,y,z -> rows indexed by roi (rois must be 0..n-1).
DenseMatrix read_coordinates_csv(const fs::path& path);

/// roi,region -> regions in order of first appearance.
std::vector<Region> read_regions_csv(const fs::path& path);

/// Tree CSV parent,child,similarity and s_c CSV node,community.
ConsensusTree read_consensus_tree(const fs::path& tree_path, const fs::path& sc_path);

}  // namespace hce::io
