#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

#include <json.hpp>

#include "hce/benchgen.hpp"
#include "hce/error.hpp"
#include "hce/io.hpp"
#include "hce/pipeline.hpp"

using namespace hce;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hce_pipe_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

// Groups of traces sharing a latent signal.
DenseMatrix grouped_traces(std::size_t groups, std::size_t per_group, std::size_t t,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  DenseMatrix m(groups * per_group, t);
  for (std::size_t c = 0; c < groups; ++c) {
    std::vector<double> latent(t);
    for (double& x : latent) x = g(rng);
    for (std::size_t r = 0; r < per_group; ++r) {
      for (std::size_t k = 0; k < t; ++k) m(c * per_group + r, k) = latent[k] + 0.8 * g(rng);
    }
  }
  return m;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(io::read_text(p)); }

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config parsing") {
  RunConfig c = RunConfig::parse("# comment\n a = 1 \nb=x # trailing\n\n");
  CHECK(c.get_size("a", 0) == 1);
  CHECK(c.get_string("b", "") == "x");
  CHECK(c.get_double("missing", 2.5) == 2.5);
  CHECK(c.resolved().at("missing") == "2.5");
  CHECK_NOTHROW(c.reject_unknown());
  RunConfig d = RunConfig::parse("typo = 3\n");
  CHECK_THROWS_AS(d.reject_unknown(), Error);
  CHECK_THROWS_AS(RunConfig::parse("no equals sign\n"), Error);
  RunConfig e = RunConfig::parse("n = abc\nflag = maybe\nlist = 1,2,x\n");
  CHECK_THROWS_AS(e.get_size("n", 0), Error);
  CHECK_THROWS_AS(e.get_bool("flag", false), Error);
  CHECK_THROWS_AS(e.get_doubles("list", {}), Error);
  RunConfig f = RunConfig::parse("list = 1, 2.5,3\n");
  CHECK(f.get_doubles("list", {}) == std::vector<double>{1, 2.5, 3});
}

TEST_CASE("cluster an edge list and rerun from the manifest") {
  TempDir dir;
  HnrgConfig h;
  h.l = 2;
  h.mean_degree = 8;
  h.seed = 3;
  const PlantedNetwork net = hnrg_sample(h);
  io::write_edge_list(dir / "edges.tsv", net.edges);

  RunConfig cfg;
  cfg.set("edges", (dir / "edges.tsv").string());
  cfg.set("log1p", "true");
  const ClusterOutput a = run_cluster(cfg, dir / "a", 2);
  CHECK(a.linkage.n_leaves() == net.n_nodes);
  CHECK_FALSE(a.hierarchy.levels.empty());
  const auto manifest = read_json(dir / "a" / "manifest.json");
  CHECK(manifest["command"] == "cluster");
  CHECK(manifest["config"]["log1p"] == "true");
  CHECK(manifest["config"]["distance"] == "cosine");
  CHECK(manifest.contains("version"));
  CHECK(fs::exists(dir / "a" / "partition_R0.csv"));

  run_cluster(RunConfig::load(dir / "a" / "manifest.json"), dir / "b", 1);
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const fs::path other = dir / "b" / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(io::read_text(entry.path()) == io::read_text(other));
  }
}

TEST_CASE("cluster input dispatch") {
  TempDir dir;
  io::write_text(dir / "pts.csv", "0,0\n0,1\n10,0\n10,1\n20,5\n20,6\n");
  RunConfig points;
  points.set("points", (dir / "pts.csv").string());
  const ClusterOutput p = run_cluster(points, dir / "p", 1);
  REQUIRE_FALSE(p.hierarchy.levels.empty());
  CHECK(p.hierarchy.levels[0].k == 3);
  CHECK(p.linkage.merge(0).distance == 1.0);

  RunConfig link;
  link.set("linkage", (dir / "p" / "linkage.csv").string());
  const ClusterOutput l = run_cluster(link, dir / "l", 1);
  CHECK(l.linkage == p.linkage);
  CHECK(io::read_text(dir / "l" / "hce_levels.json") ==
        io::read_text(dir / "p" / "hce_levels.json"));

  io::write_text(dir / "tree.csv", "parent,child,similarity\n7,0,0.5\n7,1,0.5\n");
  io::write_text(dir / "sc.csv", "node,community\n0,0\n1,0\n2,1\n3,1\n");
  RunConfig tree;
  tree.set("tree", (dir / "tree.csv").string());
  tree.set("sc", (dir / "sc.csv").string());
  const ClusterOutput t = run_cluster(tree, dir / "t", 1);
  REQUIRE(t.hierarchy.levels.size() == 1);
  CHECK(t.hierarchy.levels[0].partition == Partition{0, 0, 1, 1});

  RunConfig two;
  two.set("points", "a");
  two.set("edges", "b");
  CHECK_THROWS_AS(run_cluster(two, dir / "x", 1), Error);
  RunConfig none;
  CHECK_THROWS_AS(run_cluster(none, dir / "x", 1), Error);
  RunConfig unknown = points;
  unknown.set("bogus", "1");
  CHECK_THROWS_AS(run_cluster(unknown, dir / "x", 1), Error);
}

TEST_CASE("series input clusters correlated groups") {
  TempDir dir;
  io::write_time_series_binary(dir / "s.hcet", grouped_traces(3, 20, 300, 5));
  RunConfig cfg;
  cfg.set("series", (dir / "s.hcet").string());
  const ClusterOutput out = run_cluster(cfg, dir / "o", 4);
  REQUIRE_FALSE(out.hierarchy.levels.empty());
  std::vector<std::size_t> truth(60);
  for (std::size_t i = 0; i < 60; ++i) truth[i] = i / 20;
  bool found = false;
  for (const auto& level : out.hierarchy.levels) found |= level.partition == Partition(truth);
  CHECK(found);
}

TEST_CASE("sweeps are deterministic and mark invalid cells") {
  HnrgConfig base;
  base.l = 2;
  base.s0 = 8;
  const auto cells = hnrg_grid(base, {4, 8, 1000});
  CHECK(cells[0].valid);
  CHECK_FALSE(cells[2].valid);
  const auto a = run_benchmark_sweep(cells, 2, 7, 4);
  const auto b = run_benchmark_sweep(cells, 2, 7, 1);
  CHECK(sweep_csv(a) == sweep_csv(b));
  CHECK(a[2].skipped);
  REQUIRE(a[1].levels.size() == 2);
  CHECK(a[1].levels[0].count == 2);
  CHECK(a[1].levels[0].mean_best >= a[1].levels[0].mean_ami - 1e-12);

  HbConfig hb;
  hb.n = 200;
  const auto hb_cells = hb_grid(hb, {0.2, 0.9}, {0.1, 0.5}, 0.05);
  REQUIRE(hb_cells.size() == 4);
  std::size_t invalid = 0;
  for (const auto& c : hb_cells) {
    if (!c.valid) {
      ++invalid;
    } else {
      double sum = 0.0;
      for (double p : c.hb.edge_fractions) sum += p;
      CHECK(sum == doctest::Approx(1.0));
    }
  }
  CHECK(invalid == 2);
}

TEST_CASE("run_sweep writes one row per cell and level") {
  TempDir dir;
  RunConfig cfg = RunConfig::parse(
      "generator = hnrg\ninstances = 1\nseed = 4\ns0 = 6\nr = 3\nl = 2\nmean_degrees = 3,6\n");
  run_sweep(cfg, dir / "s", 2);
  const std::string csv = io::read_text(dir / "s" / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2);
  run_sweep(RunConfig::load(dir / "s" / "manifest.json"), dir / "t", 1);
  CHECK(io::read_text(dir / "t" / "sweep.csv") == csv);
}

TEST_CASE("null pipeline on a small fixture") {
  TempDir dir;
  io::write_time_series_binary(dir / "s.hcet", grouped_traces(4, 50, 200, 9));
  RunConfig cfg = RunConfig::parse("instances = 5\nseed = 2\n");
  cfg.set("series", (dir / "s.hcet").string());
  const NullPipelineOutput a = run_null_pipeline(cfg, dir / "a", 4);
  CHECK_FALSE(a.kept_rows.empty());
  CHECK(a.levels.size() == a.hierarchy.levels.size());
  const auto manifest = read_json(dir / "a" / "manifest.json");
  CHECK(manifest["notes"]["regions"].get<std::string>().find("no region") != std::string::npos);
  CHECK(fs::exists(dir / "a" / "nct.json"));
  CHECK(fs::exists(dir / "a" / "communities.csv"));

  run_null_pipeline(RunConfig::load(dir / "a" / "manifest.json"), dir / "b", 1);
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    CHECK(io::read_text(entry.path()) == io::read_text(dir / "b" / entry.path().filename()));
  }
}

TEST_CASE("null pipeline labels regions") {
  TempDir dir;
  io::write_time_series_binary(dir / "s.hcet", grouped_traces(2, 30, 150, 12));
  std::string regions = "roi,region\n";
  for (std::size_t i = 0; i < 60; ++i) regions += std::to_string(i) + (i < 30 ? ",left\n" : ",right\n");
  io::write_text(dir / "regions.csv", regions);
  RunConfig cfg = RunConfig::parse("instances = 3\nfilter_rois = false\n");
  cfg.set("series", (dir / "s.hcet").string());
  cfg.set("regions", (dir / "regions.csv").string());
  run_null_pipeline(cfg, dir / "a", 2);
  const std::string csv = io::read_text(dir / "a" / "communities.csv");
  CHECK(csv.find("left") != std::string::npos);
  CHECK(csv.find("right") != std::string::npos);
}

TEST_CASE("bench output") {
  TempDir dir;
  RunConfig cfg = RunConfig::parse("l = 2\ns0 = 5\nr = 2\nmean_degree = 3\nseed = 1\n");
  const PlantedNetwork net = run_bench("hnrg", cfg, dir / "b");
  CHECK(fs::exists(dir / "b" / "truth_level0.csv"));
  CHECK(fs::exists(dir / "b" / "truth_level1.csv"));
  CHECK(io::read_partition_csv(dir / "b" / "truth_level1.csv") == net.ground_truth[1]);
  const auto m = read_json(dir / "b" / "manifest.json");
  CHECK(m["stats"]["edges"] == net.edges.size());
  RunConfig bad = RunConfig::parse("mean_degree = 500\n");
  try {
    run_bench("hnrg", bad, dir / "c");
    FAIL("expected an infeasible configuration");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Infeasible);
  }
}

}  // TEST_SUITE
