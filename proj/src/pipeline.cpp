#include "hce/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hce/distance.hpp"
#include "hce/error.hpp"
#include "hce/io.hpp"
#include "hce/mcc.hpp"
#include "hce/metrics.hpp"
#include "hce/parallel.hpp"
#include "hce/seed.hpp"
#include "hce/signal.hpp"
#include "hce/upgma.hpp"

namespace hce {

using json = nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw Error(ErrorCode::InvalidConfig,
              "config key '" + key + "' = '" + value + "' is not " + expected);
}

std::string join(const std::vector<double>& xs, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += io::format_double(xs[i]);
  }
  return out;
}

std::string label_of(std::size_t m) { return "R" + std::to_string(m); }

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double std_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

// ---- configuration ----

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw Error(ErrorCode::Parse,
                  "config line " + std::to_string(number) + ": expected key = value", number);
    }
    cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

RunConfig RunConfig::load(const fs::path& path) {
  const std::string text = io::read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') return parse(text);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  if (!doc.contains("config") || !doc["config"].is_object()) {
    throw Error(ErrorCode::Parse, path.string() + ": manifest has no config object");
  }
  RunConfig cfg;
  for (const auto& [k, v] : doc["config"].items()) {
    cfg.values_[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return cfg;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) {
  const auto it = values_.find(key);
  const std::string v = it == values_.end() ? fallback : it->second;
  resolved_[key] = v;
  return v;
}

std::optional<std::string> RunConfig::get_optional(const std::string& key) {
  const auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) {
    if (it != values_.end()) resolved_[key] = "";
    return std::nullopt;
  }
  resolved_[key] = it->second;
  return it->second;
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) {
  const std::string s = get_string(key, std::to_string(fallback));
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    bad_value(key, s, "a non-negative integer");
  }
  return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) {
  const std::string s = get_string(key, std::to_string(fallback));
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    bad_value(key, s, "an unsigned 64-bit integer");
  }
  return v;
}

double RunConfig::get_double(const std::string& key, double fallback) {
  const std::string s = get_string(key, io::format_double(fallback));
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad_value(key, s, "a finite number");
  }
  return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) {
  const std::string s = get_string(key, fallback ? "true" : "false");
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, s, "a boolean");
}

std::vector<double> RunConfig::get_doubles(const std::string& key,
                                           const std::vector<double>& fallback) {
  const std::string s = get_string(key, join(fallback));
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto cut = s.find(',', start);
    if (cut == std::string::npos) cut = s.size();
    const std::string item = trim(s.substr(start, cut - start));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      bad_value(key, s, "a comma-separated list of numbers");
    }
    out.push_back(v);
    start = cut + 1;
  }
  return out;
}

void RunConfig::reject_unknown() const {
  for (const auto& [key, value] : values_) {
    if (!resolved_.count(key)) {
      throw Error(ErrorCode::InvalidConfig, "unknown or unused config key '" + key + "'");
    }
  }
}

std::string manifest_json(const std::string& command, const RunConfig& cfg,
                          const std::map<std::string, std::string>& extra) {
  json doc;
  doc["command"] = command;
  doc["version"] = HCE_VERSION;
  doc["config"] = cfg.resolved();
  if (const auto it = cfg.resolved().find("seed"); it != cfg.resolved().end()) {
    doc["seed"] = it->second;
  }
  for (const auto& [k, v] : extra) doc[k] = json::parse(v);
  return doc.dump(2) + "\n";
}

// ---- clustering ----

std::string hierarchy_json(const HierarchyResult& h) {
  json doc;
  doc["stopping_reason"] = std::string(to_string(h.stopping_reason));
  doc["levels"] = json::array();
  for (const HierarchyLevel& level : h.levels) {
    json curve = json::array();
    for (const HceRecord& r : level.profile.records()) curve.push_back({r.k, r.hce});
    doc["levels"].push_back({{"label", label_of(level.index)},
                             {"index", level.index},
                             {"n_nodes", level.n_nodes},
                             {"k", level.k},
                             {"hce", level.hce},
                             {"partition", "partition_" + label_of(level.index) + ".csv"},
                             {"curve", curve}});
  }
  return doc.dump(2) + "\n";
}

void write_hierarchy(const fs::path& out_dir, const HierarchyResult& h,
                     std::span<const std::size_t> node_ids) {
  io::write_text(out_dir / "hce_levels.json", hierarchy_json(h));
  for (const HierarchyLevel& level : h.levels) {
    io::write_partition_csv(out_dir / ("partition_" + label_of(level.index) + ".csv"),
                            level.partition, node_ids);
  }
}

ClusterOutput run_cluster(RunConfig cfg, const fs::path& out_dir, std::size_t threads) {
  static const char* kinds[] = {"edges", "dense", "series", "points", "linkage", "tree"};
  std::string kind, input;
  for (const char* k : kinds) {
    if (auto v = cfg.get_optional(k)) {
      if (!kind.empty()) {
        throw Error(ErrorCode::InvalidConfig,
                    "give exactly one input; found both " + kind + " and " + k);
      }
      kind = k;
      input = *v;
    }
  }
  if (kind.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "no input given (edges, dense, series, points, linkage or tree)");
  }
  const std::size_t max_levels = cfg.get_size("max_levels", 0);
  cfg.get_u64("seed", 0);

  Linkage linkage;
  std::vector<std::size_t> node_ids;
  auto cluster = [&](CondensedDistances d) { linkage = upgma_linkage(std::move(d)); };
  if (kind == "edges") {
    const bool log1p = cfg.get_bool("log1p", false);
    const std::string distance = cfg.get_string("distance", "cosine");
    if (distance != "cosine") bad_value("distance", distance, "'cosine' for edge lists");
    cfg.reject_unknown();
    const io::EdgeList el = io::read_edge_list(input, log1p);
    cluster(graph_cosine_distances(WeightedGraph::from_edges(el.n_nodes, el.edges)));
  } else if (kind == "dense") {
    const std::string distance = cfg.get_string("distance", "cosine");
    if (distance == "cosine") {
      const bool log1p = cfg.get_bool("log1p", false);
      cfg.reject_unknown();
      DenseMatrix m = io::read_dense_matrix(input);
      if (log1p) {
        for (double& w : m.values) w = std::log1p(w);
      }
      cluster(graph_cosine_distances(WeightedGraph::from_dense(m)));
    } else if (distance == "correlation-matrix") {
      cfg.reject_unknown();
      cluster(distances_from_correlation_matrix(io::read_dense_matrix(input)));
    } else if (distance == "precomputed") {
      cfg.reject_unknown();
      cluster(condensed_from_square(io::read_dense_matrix(input)));
    } else {
      bad_value("distance", distance, "one of cosine, correlation-matrix, precomputed");
    }
  } else if (kind == "series") {
    const std::string distance = cfg.get_string("distance", "correlation");
    if (distance != "correlation") bad_value("distance", distance, "'correlation' for traces");
    const bool filter = cfg.get_bool("filter_rois", false);
    cfg.reject_unknown();
    DenseMatrix series = io::read_time_series(input);
    if (filter) {
      node_ids = filter_rois(series).kept;
      series = select_rows(series, node_ids);
    }
    cluster(correlation_distances(series, threads));
  } else if (kind == "points") {
    const std::string distance = cfg.get_string("distance", "euclidean");
    if (distance != "euclidean") bad_value("distance", distance, "'euclidean' for points");
    cfg.reject_unknown();
    cluster(euclidean_distances(io::read_numeric_csv(input)));
  } else if (kind == "linkage") {
    cfg.reject_unknown();
    linkage = io::read_linkage_csv(input);
  } else {
    const auto sc = cfg.get_optional("sc");
    if (!sc) throw Error(ErrorCode::InvalidConfig, "tree input also needs sc");
    cfg.reject_unknown();
    linkage = consensus_to_linkage(io::read_consensus_tree(input, *sc));
  }

  ClusterOutput out{linkage, extract_hierarchy(linkage, max_levels)};
  fs::create_directories(out_dir);
  io::write_linkage_csv(out_dir / "linkage.csv", out.linkage);
  write_hierarchy(out_dir, out.hierarchy, node_ids);
  io::write_text(out_dir / "manifest.json", manifest_json("cluster", cfg));
  return out;
}

// ---- benchmark sweeps ----

double best_cut_ami(const Linkage& linkage, const Partition& truth) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= linkage.n_leaves(); ++k) {
    best = std::max(best, ami(cut_at_k(linkage, k), truth));
  }
  return best;
}

InstanceScore score_instance(const PlantedNetwork& net) {
  std::vector<WeightedEdge> edges;
  edges.reserve(net.edges.size());
  for (const auto& [u, v] : net.edges) edges.push_back({u, v, 1.0});
  const WeightedGraph g = WeightedGraph::from_edges(net.n_nodes, edges);
  const Linkage linkage = upgma_linkage(graph_cosine_distances(g, true));
  const std::size_t depth = net.ground_truth.size();
  const HierarchyResult h = extract_hierarchy(linkage, depth);

  InstanceScore s;
  s.levels_found = h.levels.size();
  for (std::size_t l = 0; l < depth; ++l) {
    s.ami.push_back(l < h.levels.size() ? ami(h.levels[l].partition, net.ground_truth[l])
                                        : 0.0);
    s.best_ami.push_back(best_cut_ami(linkage, net.ground_truth[l]));
  }
  return s;
}

std::vector<SweepCell> hnrg_grid(const HnrgConfig& base, const std::vector<double>& degrees) {
  std::vector<SweepCell> cells;
  for (double k : degrees) {
    SweepCell c;
    c.generator = "hnrg";
    c.hnrg = base;
    c.hnrg.mean_degree = k;
    try {
      hnrg_probabilities(c.hnrg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ProbabilityExceedsOne) throw;
      c.valid = false;
      c.note = e.detail();
    }
    cells.push_back(c);
  }
  return cells;
}

std::vector<SweepCell> hb_grid(const HbConfig& base, const std::vector<double>& p1,
                               const std::vector<double>& p2, double p_last) {
  if (base.l != 3) {
    throw Error(ErrorCode::InvalidConfig, "HB (p1, p2) sweeps need l = 3");
  }
  std::vector<SweepCell> cells;
  for (double a : p1) {
    for (double b : p2) {
      SweepCell c;
      c.generator = "hb";
      c.hb = base;
      double p0 = 1.0 - a - b - p_last;
      if (std::abs(p0) < 1e-12) p0 = 0.0;
      c.hb.edge_fractions = {p0, a, b, p_last};
      if (p0 < 0.0 || a < 0.0 || b < 0.0 || p_last < 0.0) {
        c.valid = false;
        c.note = "p0 = " + io::format_double(p0) + " is negative";
      }
      cells.push_back(c);
    }
  }
  return cells;
}

std::vector<CellSummary> run_benchmark_sweep(const std::vector<SweepCell>& cells,
                                             std::size_t instances, std::uint64_t seed,
                                             std::size_t threads) {
  struct Slot {
    std::optional<InstanceScore> score;
    std::string failure;
  };
  std::vector<Slot> slots(cells.size() * instances);
  parallel_for(slots.size(), threads, [&](std::size_t t) {
    const SweepCell& cell = cells[t / instances];
    if (!cell.valid) return;
    const std::uint64_t s = instance_seed(seed, t % instances);
    try {
      PlantedNetwork net;
      if (cell.generator == "hnrg") {
        HnrgConfig cfg = cell.hnrg;
        cfg.seed = s;
        net = hnrg_sample(cfg);
      } else {
        HbConfig cfg = cell.hb;
        cfg.seed = s;
        net = hb_sample(cfg);
      }
      slots[t].score = score_instance(net);
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::Infeasible) throw;
      slots[t].failure = e.detail();
    }
  });

  std::vector<CellSummary> table;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellSummary row;
    row.cell = cells[c];
    row.note = cells[c].note;
    row.skipped = !cells[c].valid;
    const std::size_t depth = cells[c].generator == "hnrg" ? cells[c].hnrg.l : cells[c].hb.l;
    for (std::size_t i = 0; i < instances && !row.skipped; ++i) {
      if (!slots[c * instances + i].score) {
        row.skipped = true;
        row.note = slots[c * instances + i].failure;
      }
    }
    if (!row.skipped) {
      for (std::size_t l = 0; l < depth; ++l) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < instances; ++i) {
          a.push_back(slots[c * instances + i].score->ami[l]);
          b.push_back(slots[c * instances + i].score->best_ami[l]);
        }
        row.levels.push_back({l, instances, mean(a), std_error(a), mean(b), std_error(b)});
      }
    }
    table.push_back(std::move(row));
  }
  return table;
}

std::string sweep_csv(const std::vector<CellSummary>& table) {
  std::string out =
      "generator,cell,mean_degree,fractions,level,critical_degree,instances,"
      "mean_ami,se_ami,mean_best_ami,se_best_ami,status,note\n";
  for (std::size_t c = 0; c < table.size(); ++c) {
    const CellSummary& row = table[c];
    const bool hnrg = row.cell.generator == "hnrg";
    const std::string prefix =
        row.cell.generator + "," + std::to_string(c) + "," +
        (hnrg ? io::format_double(row.cell.hnrg.mean_degree) : std::string()) + "," +
        (hnrg ? std::string() : join(row.cell.hb.edge_fractions, ';')) + ",";
    std::string note = row.note;
    std::replace(note.begin(), note.end(), ',', ';');
    if (row.skipped) {
      out += prefix + ",,0,,,,,skipped," + note + "\n";
      continue;
    }
    for (const LevelSummary& l : row.levels) {
      std::string critical;
      if (hnrg && l.level >= 1) {
        critical = io::format_double(hnrg_critical_degree(row.cell.hnrg, l.level));
      }
      out += prefix + std::to_string(l.level) + "," + critical + "," +
             std::to_string(l.count) + "," + io::format_double(l.mean_ami) + "," +
             io::format_double(l.se_ami) + "," + io::format_double(l.mean_best) + "," +
             io::format_double(l.se_best) + ",ok,\n";
    }
  }
  return out;
}

std::vector<CellSummary> run_sweep(RunConfig cfg, const fs::path& out_dir,
                                   std::size_t threads) {
  const std::string generator = cfg.get_string("generator", "hnrg");
  const std::size_t instances = cfg.get_size("instances", 10);
  const std::uint64_t seed = cfg.get_u64("seed", 0);
  std::vector<SweepCell> cells;
  if (generator == "hnrg") {
    HnrgConfig base;
    base.s0 = cfg.get_size("s0", base.s0);
    base.r = cfg.get_size("r", base.r);
    base.l = cfg.get_size("l", base.l);
    base.rho = cfg.get_double("rho", base.rho);
    cells = hnrg_grid(base, cfg.get_doubles("mean_degrees", {2, 4, 8, 12, 16}));
  } else if (generator == "hb") {
    HbConfig base;
    base.n = cfg.get_size("n", base.n);
    base.degree_exponent = cfg.get_double("degree_exponent", base.degree_exponent);
    base.min_degree = cfg.get_size("min_degree", base.min_degree);
    base.max_degree = cfg.get_size("max_degree", base.max_degree);
    cells = hb_grid(base, cfg.get_doubles("p1_values", {0.1, 0.2, 0.3}),
                    cfg.get_doubles("p2_values", {0.1, 0.2}), cfg.get_double("p3", 0.05));
  } else {
    bad_value("generator", generator, "hnrg or hb");
  }
  cfg.reject_unknown();
  if (instances == 0) throw Error(ErrorCode::InvalidConfig, "instances must be at least 1");

  auto table = run_benchmark_sweep(cells, instances, seed, threads);
  fs::create_directories(out_dir);
  io::write_text(out_dir / "sweep.csv", sweep_csv(table));
  io::write_text(out_dir / "manifest.json", manifest_json("sweep", cfg));
  return table;
}

// ---- benchmark generation ----

PlantedNetwork run_bench(const std::string& generator, RunConfig cfg, const fs::path& out_dir) {
  PlantedNetwork net;
  json stats;
  if (generator == "hnrg") {
    HnrgConfig c;
    c.s0 = cfg.get_size("s0", c.s0);
    c.r = cfg.get_size("r", c.r);
    c.l = cfg.get_size("l", c.l);
    c.mean_degree = cfg.get_double("mean_degree", c.mean_degree);
    c.rho = cfg.get_double("rho", c.rho);
    c.seed = cfg.get_u64("seed", c.seed);
    cfg.reject_unknown();
    const HnrgLevels lv = hnrg_probabilities(c);
    net = hnrg_sample(c);
    stats["sizes"] = lv.sizes;
    stats["probabilities"] = lv.probabilities;
    stats["expected_degrees"] = lv.expected_degrees;
    json critical = json::array();
    for (std::size_t l = 1; l < c.l; ++l) critical.push_back(hnrg_critical_degree(c, l));
    stats["critical_degrees"] = critical;
  } else if (generator == "hb") {
    HbConfig c;
    c.n = cfg.get_size("n", c.n);
    c.l = cfg.get_size("l", c.l);
    c.edge_fractions = cfg.get_doubles("fractions", c.edge_fractions);
    c.degree_exponent = cfg.get_double("degree_exponent", c.degree_exponent);
    c.min_degree = cfg.get_size("min_degree", c.min_degree);
    c.max_degree = cfg.get_size("max_degree", c.max_degree);
    c.split_mean = cfg.get_double("split_mean", c.split_mean);
    c.dirichlet_concentration =
        cfg.get_double("dirichlet_concentration", c.dirichlet_concentration);
    c.seed = cfg.get_u64("seed", c.seed);
    cfg.reject_unknown();
    net = hb_sample(c);
    std::vector<std::size_t> degree(net.n_nodes, 0);
    for (const auto& [u, v] : net.edges) {
      ++degree[u];
      ++degree[v];
    }
    stats["min_degree"] = *std::min_element(degree.begin(), degree.end());
    stats["max_degree"] = *std::max_element(degree.begin(), degree.end());
  } else {
    bad_value("generator", generator, "hnrg or hb");
  }

  const auto per_level = edges_per_level(net);
  std::vector<double> fractions;
  for (std::size_t c : per_level) {
    fractions.push_back(net.edges.empty() ? 0.0
                                          : static_cast<double>(c) /
                                                static_cast<double>(net.edges.size()));
  }
  stats["n_nodes"] = net.n_nodes;
  stats["edges"] = net.edges.size();
  stats["mean_degree"] = net.n_nodes ? 2.0 * static_cast<double>(net.edges.size()) /
                                           static_cast<double>(net.n_nodes)
                                     : 0.0;
  stats["edges_per_level"] = per_level;
  stats["edge_fractions"] = fractions;
  std::vector<std::size_t> communities;
  for (const Partition& p : net.ground_truth) communities.push_back(p.community_count());
  stats["communities_per_level"] = communities;

  fs::create_directories(out_dir);
  io::write_edge_list(out_dir / "edges.tsv", net.edges);
  for (std::size_t l = 0; l < net.ground_truth.size(); ++l) {
    io::write_partition_csv(out_dir / ("truth_level" + std::to_string(l) + ".csv"),
                            net.ground_truth[l]);
  }
  io::write_text(out_dir / "manifest.json",
                 manifest_json("bench " + generator, cfg, {{"stats", stats.dump()}}));
  return net;
}

// ---- time-series null pipeline ----

namespace {

std::string roi_filter_csv(const RoiFilterResult& f) {
  std::string out = "roi,degenerate,skewness,max_z,skew_ok,max_z_ok,kept\n";
  for (std::size_t r = 0; r < f.rows.size(); ++r) {
    const RoiDiagnostics& d = f.rows[r];
    out += std::to_string(r) + "," + (d.degenerate ? "1" : "0") + "," +
           io::format_double(d.skewness) + "," + io::format_double(d.max_z) + "," +
           (d.skew_ok ? "1" : "0") + "," + (d.max_z_ok ? "1" : "0") + "," +
           (d.kept ? "1" : "0") + "\n";
  }
  return out;
}

HierarchyResult series_hierarchy(const DenseMatrix& series, std::size_t max_levels,
                                 std::size_t threads) {
  return extract_hierarchy(upgma_linkage(correlation_distances(series, threads)), max_levels);
}

}  // namespace

NullPipelineOutput run_null_pipeline(RunConfig cfg, const fs::path& out_dir,
                                     std::size_t threads) {
  const auto series_path = cfg.get_optional("series");
  if (!series_path) throw Error(ErrorCode::InvalidConfig, "null pipeline needs series");
  const std::size_t instances = cfg.get_size("instances", 100);
  const std::uint64_t seed = cfg.get_u64("seed", 0);
  const std::size_t max_levels = cfg.get_size("max_levels", 3);
  const bool filter = cfg.get_bool("filter_rois", true);
  const auto regions_path = cfg.get_optional("regions");
  const auto coords_path = cfg.get_optional("coords");
  cfg.reject_unknown();
  if (instances == 0) throw Error(ErrorCode::InvalidConfig, "instances must be at least 1");

  const DenseMatrix raw = io::read_time_series(*series_path);
  NullPipelineOutput out;
  fs::create_directories(out_dir);
  DenseMatrix series = raw;
  if (filter) {
    const RoiFilterResult f = filter_rois(raw);
    io::write_text(out_dir / "roi_filter.csv", roi_filter_csv(f));
    out.kept_rows = f.kept;
    series = select_rows(raw, out.kept_rows);
  } else {
    out.kept_rows.resize(raw.rows);
    std::iota(out.kept_rows.begin(), out.kept_rows.end(), 0);
  }
  std::vector<Region> regions;
  if (regions_path) regions = io::read_regions_csv(*regions_path);
  DenseMatrix coords;
  if (coords_path) coords = io::read_coordinates_csv(*coords_path);

  const Linkage linkage = upgma_linkage(correlation_distances(series, threads));
  out.hierarchy = extract_hierarchy(linkage, max_levels);

  // Null ensemble. Several instances run at once when their distance
  // matrices fit in about 2 GB together.
  const double matrix_bytes =
      8.0 * static_cast<double>(CondensedDistances::pair_count(series.rows));
  const std::size_t fit = static_cast<std::size_t>(
      std::max(1.0, std::floor(2e9 / std::max(matrix_bytes, 1.0))));
  const std::size_t workers = std::clamp<std::size_t>(fit, 1, std::max<std::size_t>(threads, 1));
  const std::size_t inner = std::max<std::size_t>(1, threads / workers);
  std::vector<std::vector<std::vector<std::size_t>>> null_sizes(instances);
  parallel_for(instances, workers, [&](std::size_t i) {
    const DenseMatrix shifted = circular_shift_null(series, derive_seed(seed, "null", i));
    const HierarchyResult h = series_hierarchy(shifted, max_levels, inner);
    for (const HierarchyLevel& level : h.levels) {
      null_sizes[i].push_back(community_sizes(level.partition));
    }
  });

  json nct_doc;
  nct_doc["kde"] = {{"kernel", "gaussian"},
                    {"bandwidth_rule", "scott, per-instance sample count"},
                    {"grid_points", kKdeGrid},
                    {"log10_range", {0.0, kLogSizeMax}},
                    {"bins", kSizeBins}};
  nct_doc["null_instances"] = instances;
  nct_doc["levels"] = json::array();
  std::string communities_csv = "level,label,size,survives,region,jaccard,no_overlap";
  if (coords_path) communities_csv += ",x,y,z";
  communities_csv += "\n";

  for (const HierarchyLevel& level : out.hierarchy.levels) {
    SizeEnsemble ensemble;
    ensemble.instance_count = 0;
    for (const auto& inst : null_sizes) {
      if (level.index < inst.size()) {
        ++ensemble.instance_count;
        ensemble.sizes.insert(ensemble.sizes.end(), inst[level.index].begin(),
                              inst[level.index].end());
      }
    }
    NullLevelReport report;
    report.level = level.index;
    json lj = {{"label", label_of(level.index)}, {"null_instances", ensemble.instance_count}};
    if (!ensemble.sizes.empty()) {
      const NctResult nct = nct_estimate(ensemble);
      report.nct = nct.threshold;
      lj["threshold"] = nct.threshold ? json(*nct.threshold) : json(nullptr);
      lj["bandwidth"] = nct.bandwidth;
      lj["bin_edges"] = nct.bin_edges;
      lj["null_histogram"] = nct.histogram;
      lj["grid"] = nct.grid;
      lj["density"] = nct.density;
    } else {
      lj["threshold"] = nullptr;
      lj["note"] = "no null instance reached this level";
    }
    report.surviving = filter_communities_by_nct(level.partition, report.nct);
    lj["surviving"] = report.surviving;
    nct_doc["levels"].push_back(lj);

    const auto members = level.partition.communities();
    std::vector<bool> survives(members.size(), false);
    for (std::size_t c : report.surviving) survives[c] = true;
    for (std::size_t c = 0; c < members.size(); ++c) {
      std::vector<std::size_t> rois;
      for (std::size_t i : members[c]) rois.push_back(out.kept_rows[i]);
      std::string line = std::to_string(level.index) + "," + std::to_string(c) + "," +
                         std::to_string(rois.size()) + "," + (survives[c] ? "1" : "0") + ",";
      if (!regions.empty()) {
        const RegionMatch match = jaccard_assign(rois, regions);
        line += match.name + "," + io::format_double(match.jaccard) + "," +
                (match.no_overlap ? "1" : "0");
      } else {
        line += ",,";
      }
      if (coords_path) {
        for (std::size_t axis = 0; axis < 3; ++axis) {
          std::vector<double> xs;
          for (std::size_t r : rois) {
            if (r >= coords.rows) {
              throw Error(ErrorCode::LengthMismatch,
                          "coordinates missing for roi " + std::to_string(r), r);
            }
            xs.push_back(coords(r, axis));
          }
          line += "," + io::format_double(median(xs));
        }
      }
      communities_csv += line + "\n";
    }
    out.levels.push_back(std::move(report));
  }

  io::write_linkage_csv(out_dir / "linkage.csv", linkage);
  write_hierarchy(out_dir, out.hierarchy, out.kept_rows);
  io::write_text(out_dir / "nct.json", nct_doc.dump(2) + "\n");
  io::write_text(out_dir / "communities.csv", communities_csv);
  json notes;
  notes["regions"] = regions_path ? "assigned by largest Jaccard index"
                                  : "skipped: no region file given";
  notes["kept_rows"] = out.kept_rows.size();
  notes["input_rows"] = raw.rows;
  io::write_text(out_dir / "manifest.json",
                 manifest_json("null", cfg, {{"notes", notes.dump()}}));
  return out;
}

void run_tsprep(RunConfig cfg, const fs::path& out_dir) {
  const auto series_path = cfg.get_optional("series");
  if (!series_path) throw Error(ErrorCode::InvalidConfig, "tsprep needs series");
  const bool filter = cfg.get_bool("filter_rois", true);
  const auto shift_seed = cfg.get_optional("shift_seed");
  std::uint64_t seed = 0;
  if (shift_seed) seed = cfg.get_u64("shift_seed", 0);
  cfg.reject_unknown();

  const DenseMatrix raw = io::read_time_series(*series_path);
  fs::create_directories(out_dir);
  DenseMatrix kept = raw;
  std::vector<std::size_t> rows(raw.rows);
  std::iota(rows.begin(), rows.end(), 0);
  if (filter) {
    const RoiFilterResult f = filter_rois(raw);
    io::write_text(out_dir / "roi_filter.csv", roi_filter_csv(f));
    rows = f.kept;
    kept = select_rows(raw, rows);
  }
  std::string kept_csv = "row,roi\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    kept_csv += std::to_string(i) + "," + std::to_string(rows[i]) + "\n";
  }
  io::write_text(out_dir / "kept_rows.csv", kept_csv);
  io::write_time_series_binary(out_dir / "filtered.hcet", kept);
  if (shift_seed) {
    io::write_time_series_binary(out_dir / "shifted.hcet", circular_shift_null(kept, seed));
  }
  io::write_text(out_dir / "manifest.json", manifest_json("tsprep", cfg));
}

}  // namespace hce
