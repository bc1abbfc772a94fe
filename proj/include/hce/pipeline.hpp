#pragma once

// End-to-end runs. Every run is driven by a flat key -> value configuration;
// the fully resolved configuration (defaults filled in) goes into the
// manifest, so a manifest alone is enough to repeat a run.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hce/benchgen.hpp"
#include "hce/hce.hpp"
#include "hce/linkage.hpp"

namespace hce {

namespace fs = std::filesystem;

class RunConfig {
 public:
  using Map = std::map<std::string, std::string>;

  RunConfig() = default;
  explicit RunConfig(Map values) : values_(std::move(values)) {}

  /// Flat "key = value" lines; '#' starts a comment.
  static RunConfig parse(const std::string& text);
  /// Either a key = value file or a manifest.json written by a previous run.
  static RunConfig load(const fs::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  // Getters record the value they return (default included) in resolved().
  std::string get_string(const std::string& key, const std::string& fallback);
  std::optional<std::string> get_optional(const std::string& key);
  std::size_t get_size(const std::string& key, std::size_t fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback);

  /// Throws InvalidConfig naming the first key no getter asked for.
  void reject_unknown() const;

  const Map& values() const noexcept { return values_; }
  const Map& resolved() const noexcept { return resolved_; }

 private:
  Map values_;
  Map resolved_;
};

/// Manifest JSON: command, version, resolved config and extra entries whose
/// values are JSON text.
std::string manifest_json(const std::string& command, const RunConfig& cfg,
                          const std::map<std::string, std::string>& extra = {});

struct ClusterOutput {
  Linkage linkage;
  HierarchyResult hierarchy;
};

/// Input keys (exactly one): edges, dense, series, points, linkage, tree
/// (with sc). Other keys: distance, log1p, max_levels, seed.
/// Writes linkage.csv, hce_levels.json, partition_R<m>.csv, manifest.json.
ClusterOutput run_cluster(RunConfig cfg, const fs::path& out_dir, std::size_t threads);

/// JSON report of a hierarchy. Partition files are referenced by name.
std::string hierarchy_json(const HierarchyResult& h);
void write_hierarchy(const fs::path& out_dir, const HierarchyResult& h,
                     std::span<const std::size_t> node_ids = {});

// ---- benchmark sweeps ----

struct InstanceScore {
  std::vector<double> ami;       // per planted level; 0 where HCE found no level
  std::vector<double> best_ami;  // best AMI over all cuts, per planted level
  std::size_t levels_found = 0;
};

/// UPGMA on graph cosine distances, HCE hierarchy with as many levels as
/// planted, AMI per level and the best cut of the dendrogram per level.
InstanceScore score_instance(const PlantedNetwork& net);

/// Highest AMI against `truth` over every cut of the dendrogram.
double best_cut_ami(const Linkage& linkage, const Partition& truth);

struct SweepCell {
  std::string generator;  // "hnrg" or "hb"
  HnrgConfig hnrg;
  HbConfig hb;
  bool valid = true;
  std::string note;
};

struct LevelSummary {
  std::size_t level = 0;
  std::size_t count = 0;
  double mean_ami = 0.0, se_ami = 0.0;
  double mean_best = 0.0, se_best = 0.0;
};

struct CellSummary {
  SweepCell cell;
  bool skipped = false;
  std::string note;
  std::vector<LevelSummary> levels;
};

/// Instance i of every cell uses instance_seed(seed, i), so cells share
/// their random streams.
std::vector<CellSummary> run_benchmark_sweep(const std::vector<SweepCell>& cells,
                                             std::size_t instances, std::uint64_t seed,
                                             std::size_t threads);

std::string sweep_csv(const std::vector<CellSummary>& table);

/// Cells of an HNRG sweep over mean degree.
std::vector<SweepCell> hnrg_grid(const HnrgConfig& base, const std::vector<double>& degrees);

/// Cells of an HB sweep over (p1, p2) with p_last fixed; p0 = 1 - rest.
/// Cells with p0 < 0 are kept but marked invalid.
std::vector<SweepCell> hb_grid(const HbConfig& base, const std::vector<double>& p1,
                               const std::vector<double>& p2, double p_last);

/// Reads the sweep keys from the config, runs it and writes sweep.csv and
/// manifest.json.
std::vector<CellSummary> run_sweep(RunConfig cfg, const fs::path& out_dir,
                                   std::size_t threads);

// ---- benchmark generation ----

/// Writes edges.tsv, truth_level<l>.csv and manifest.json.
PlantedNetwork run_bench(const std::string& generator, RunConfig cfg, const fs::path& out_dir);

// ---- time-series null pipeline ----

struct NullLevelReport {
  std::size_t level = 0;
  std::optional<double> nct;
  std::vector<std::size_t> surviving;  // community labels of the real level
};

struct NullPipelineOutput {
  std::vector<std::size_t> kept_rows;
  HierarchyResult hierarchy;
  std::vector<NullLevelReport> levels;
};

/// Keys: series, instances (100), seed, max_levels (3), filter_rois (true),
/// regions (optional), coords (optional).
NullPipelineOutput run_null_pipeline(RunConfig cfg, const fs::path& out_dir,
                                     std::size_t threads);

/// Keys: series, filter_rois, shift_seed (optional). Writes filter
/// diagnostics, the kept traces and optionally one circular-shift surrogate.
void run_tsprep(RunConfig cfg, const fs::path& out_dir);

}  // namespace hce
