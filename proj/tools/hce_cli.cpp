// hce: command-line front end. Every subcommand turns its flags into config
// keys (--max-levels -> max_levels) on top of an optional --config file.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hce/error.hpp"
#include "hce/hce.hpp"
#include "hce/io.hpp"
#include "hce/mcc.hpp"
#include "hce/metrics.hpp"
#include "hce/parallel.hpp"
#include "hce/pipeline.hpp"

namespace {

// String-valued options collected per subcommand, applied as config keys.
struct Options {
  explicit Options(CLI::App* a) : app(a) {}

  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> opts;
  std::vector<std::pair<std::string, CLI::Option*>> flags;

  void add(const std::string& name, const std::string& help) {
    std::string key = name;
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    opts.emplace_back(key, app->add_option("--" + name, values[key], help));
  }
  void flag(const std::string& name, const std::string& help) {
    std::string key = name;
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    flags.emplace_back(key, app->add_flag("--" + name, help));
  }
  hce::RunConfig config(const std::string& config_path) const {
    hce::RunConfig cfg;
    if (!config_path.empty()) cfg = hce::RunConfig::load(config_path);
    for (const auto& [key, opt] : opts) {
      if (opt->count() > 0) cfg.set(key, values.at(key));
    }
    for (const auto& [key, opt] : flags) {
      if (opt->count() > 0) cfg.set(key, "true");
    }
    return cfg;
  }
};

int exit_code(hce::ErrorCategory c) {
  switch (c) {
    case hce::ErrorCategory::Validation: return 2;
    case hce::ErrorCategory::Io: return 3;
    case hce::ErrorCategory::Infeasible: return 4;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical clustering entropy toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HCE_VERSION);
  std::size_t threads = hce::default_thread_count();
  std::string config_path;
  app.add_option("--threads", threads, "Worker threads (default: HCE_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", config_path,
                 "key = value file or a manifest.json from an earlier run");
  std::string out;

  // cluster
  Options cluster{app.add_subcommand("cluster", "Distances, UPGMA and HCE levels")};
  for (const char* k : {"edges", "dense", "series", "points", "linkage", "tree", "sc"}) {
    cluster.add(k, std::string("Input: ") + k);
  }
  cluster.add("distance", "cosine | correlation-matrix | precomputed | correlation | euclidean");
  cluster.add("max-levels", "Stop after this many levels (0: no limit)");
  cluster.add("seed", "Recorded in the manifest");
  cluster.add("filter-rois", "Filter traces before clustering (true/false)");
  cluster.flag("log1p", "Apply w = log(1 + w) to input weights");
  cluster.app->add_option("--out", out, "Output directory")->required();

  // hce
  Options hce_cmd{app.add_subcommand("hce", "HCE levels of an existing linkage")};
  hce_cmd.add("linkage", "Linkage CSV");
  hce_cmd.add("max-levels", "Stop after this many levels (0: no limit)");
  std::string sizes;
  std::size_t n_nodes = 0;
  hce_cmd.app->add_option("--sizes", sizes, "Print HCE of comma-separated community sizes");
  hce_cmd.app->add_option("--n", n_nodes, "Node count for --sizes (default: sum of sizes)");
  hce_cmd.app->add_option("--out", out, "Output directory");

  // bench hnrg | hb
  CLI::App* bench = app.add_subcommand("bench", "Generate a benchmark network");
  bench->require_subcommand(1);
  Options hnrg{bench->add_subcommand("hnrg", "Hierarchical nested random graph")};
  for (const char* k : {"s0", "r", "l", "mean-degree", "rho", "seed"}) hnrg.add(k, k);
  hnrg.app->add_option("--out", out, "Output directory")->required();
  Options hb{bench->add_subcommand("hb", "Asymmetric hierarchical benchmark")};
  for (const char* k : {"n", "l", "fractions", "degree-exponent", "min-degree", "max-degree",
                        "split-mean", "dirichlet-concentration", "seed"}) {
    hb.add(k, k);
  }
  hb.app->add_option("--out", out, "Output directory")->required();

  // sweep
  Options sweep{app.add_subcommand("sweep", "AMI of HCE levels over a benchmark grid")};
  for (const char* k : {"generator", "instances", "seed", "s0", "r", "l", "rho", "mean-degrees",
                        "n", "degree-exponent", "min-degree", "max-degree", "p1-values",
                        "p2-values", "p3"}) {
    sweep.add(k, k);
  }
  sweep.app->add_option("--out", out, "Output directory")->required();

  // ami
  CLI::App* ami_cmd = app.add_subcommand("ami", "Compare two partition CSVs");
  std::string u_path, v_path;
  ami_cmd->add_option("--u", u_path, "Partition CSV")->required();
  ami_cmd->add_option("--v", v_path, "Partition CSV")->required();

  // mcc-convert
  CLI::App* mcc = app.add_subcommand("mcc-convert", "Consensus tree to linkage CSV");
  std::string tree_path, sc_path;
  mcc->add_option("--tree", tree_path, "parent,child,similarity CSV")->required();
  mcc->add_option("--sc", sc_path, "node,community CSV")->required();
  mcc->add_option("--out", out, "Linkage CSV to write")->required();

  // tsprep
  Options tsprep{app.add_subcommand("tsprep", "Filter traces, optionally shift them")};
  tsprep.add("series", "Time-series file");
  tsprep.add("filter-rois", "true/false");
  tsprep.add("shift-seed", "Also write one circular-shift surrogate");
  tsprep.app->add_option("--out", out, "Output directory")->required();

  // null
  Options null_cmd{app.add_subcommand("null", "Null-community thresholds from shifted traces")};
  for (const char* k : {"series", "instances", "seed", "max-levels", "filter-rois", "regions",
                        "coords"}) {
    null_cmd.add(k, k);
  }
  null_cmd.app->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cluster.app->parsed()) {
      hce::run_cluster(cluster.config(config_path), out, threads);
    } else if (hce_cmd.app->parsed()) {
      if (!sizes.empty()) {
        std::vector<std::size_t> s;
        std::size_t total = 0;
        std::stringstream in(sizes);
        for (std::string item; std::getline(in, item, ',');) {
          s.push_back(std::stoul(item));
          total += s.back();
        }
        const std::size_t n = n_nodes ? n_nodes : total;
        nlohmann::json doc{{"n", n}, {"k", s.size()}, {"hce", hce::hce_value(s, n)}};
        std::cout << doc.dump(2) << "\n";
      } else {
        if (out.empty()) throw hce::Error(hce::ErrorCode::InvalidConfig, "--out is required");
        hce::run_cluster(hce_cmd.config(config_path), out, threads);
      }
    } else if (hnrg.app->parsed()) {
      hce::run_bench("hnrg", hnrg.config(config_path), out);
    } else if (hb.app->parsed()) {
      hce::run_bench("hb", hb.config(config_path), out);
    } else if (sweep.app->parsed()) {
      hce::run_sweep(sweep.config(config_path), out, threads);
    } else if (ami_cmd->parsed()) {
      const auto r = hce::ami_report(hce::io::read_partition_csv(u_path),
                                     hce::io::read_partition_csv(v_path));
      nlohmann::json doc{
          {"mi", r.mi}, {"emi", r.emi}, {"h_u", r.h_u}, {"h_v", r.h_v}, {"ami", r.ami}};
      std::cout << doc.dump(2) << "\n";
    } else if (mcc->parsed()) {
      hce::io::write_linkage_csv(
          out, hce::consensus_to_linkage(hce::io::read_consensus_tree(tree_path, sc_path)));
    } else if (tsprep.app->parsed()) {
      hce::run_tsprep(tsprep.config(config_path), out);
    } else if (null_cmd.app->parsed()) {
      hce::run_null_pipeline(null_cmd.config(config_path), out, threads);
    }
  } catch (const hce::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
