// avf: runner for boundary-avalanche experiments, oracles and Green checks.
//
// Exit codes: 0 all checks pass, 1 a scientific check failed, 2 usage or I/O.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avf/ensemble.hpp"
#include "avf/error.hpp"
#include "avf/exact.hpp"
#include "avf/greens.hpp"
#include "avf/io.hpp"
#include "avf/stats.hpp"
#include "avf/svg.hpp"

namespace fs = std::filesystem;
using avf::io::json;

namespace {

constexpr int kExitScience = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("AVF_SEED");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 0);
  if (*end != '\0') throw UsageError(std::string("AVF_SEED is not an integer: ") + env);
  return v;
}

struct RunOptions {
  std::string config_path;
  std::string geometry = "folded-cylinder";
  int lx = 16;
  int ly = 16;
  std::string process = "bt";
  std::int64_t samples = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out = "out";
  int snapshots = 0;
  bool analysis = false;
  std::string graph_path;
};

// Fills options from a JSON config unless the same flag was given.
void merge_config(const json& j, RunOptions& o, const CLI::App& app) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  const auto take = [&](const char* key, const char* flag, auto& target) {
    if (!j.contains(key) || app.count(flag) > 0) return;
    try {
      j.at(key).get_to(target);
    } catch (const json::exception&) {
      throw UsageError(std::string("config: field '") + key + "' has the wrong type");
    }
  };
  for (const auto& [key, _] : j.items()) {
    static const std::vector<std::string> known = {"geometry", "lx",      "ly",        "process",  "samples", "seed",
                                                   "workers",  "out",     "snapshots", "analysis", "graph"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("config: unknown field '" + key + "'");
    }
  }
  take("geometry", "--geometry", o.geometry);
  take("lx", "--lx", o.lx);
  take("ly", "--ly", o.ly);
  take("process", "--process", o.process);
  take("samples", "--samples", o.samples);
  take("seed", "--seed", o.seed);
  take("workers", "--workers", o.workers);
  take("out", "--out", o.out);
  take("snapshots", "--snapshots", o.snapshots);
  take("analysis", "--analysis", o.analysis);
  take("graph", "--graph", o.graph_path);
}

int cmd_run(RunOptions o, const CLI::App& app) {
  bool seed_given = app.count("--seed") > 0;
  if (!o.config_path.empty()) {
    const json j = avf::io::read_json(o.config_path);
    seed_given = seed_given || j.contains("seed");
    merge_config(j, o, app);
  }
  if (!seed_given) o.seed = default_seed();
  if (o.samples < 1) throw UsageError("samples must be >= 1");
  if (o.workers < 1) throw UsageError("workers must be >= 1");

  avf::EnsembleConfig c;
  c.process = avf::parse_process(o.process);
  c.samples = o.samples;
  c.seed = o.seed;
  c.workers = o.workers;
  c.geometry_analysis = o.analysis;
  c.snapshots = o.snapshots;
  avf::Graph g;
  if (!o.graph_path.empty()) {
    g = avf::io::load_custom_graph(o.graph_path);
    c.geometry = avf::Geometry::custom;
  } else {
    c.geometry = avf::parse_geometry(o.geometry);
    if (c.geometry == avf::Geometry::custom) throw UsageError("geometry 'custom' needs --graph");
    g = avf::build_geometry(c.geometry, o.lx, o.ly);
  }
  c.lx = g.lx();
  c.ly = g.ly();

  const avf::EnsembleResult r = avf::run_ensemble(c, g);
  const fs::path out(o.out);
  avf::io::write_text(out / "sizes.csv", avf::io::sizes_csv(r.sample));
  json meta = avf::io::sample_metadata_json(r.sample);
  meta["workers"] = c.workers;
  meta["streams"] = "realization i uses RandomSource::stream(seed, i)";
  meta["analysis"] = c.geometry_analysis;
  avf::io::write_text(out / "run-metadata.json", meta.dump(2) + "\n");
  for (const auto& s : r.snapshots) {
    avf::io::write_text(out / ("partition-" + std::to_string(s.realization) + ".json"),
                        avf::io::snapshot_to_json(s).dump() + "\n");
  }

  std::cout << "process " << o.process << " on " << avf::to_string(g.geometry()) << " " << g.lx() << "x" << g.ly()
            << ": " << r.sample.records.size() << " sizes from " << c.samples << " realizations\n";
  const avf::MeanSizeReport m = avf::mean_size_check(r.sample);
  std::printf("mean size %.4f +- %.4f (V/B = %.4f, z = %.2f)\n", m.pooled_mean, m.pooled_stderr, m.expected,
              m.pooled_z);
  if (c.process != avf::ProcessKind::single_site) {
    const auto giants = avf::giants_per_realization(r.sample);
    const auto one = std::count(giants.begin(), giants.end(), 1);
    std::printf("realizations with exactly one giant: %ld of %zu; giant fraction %.6f\n", static_cast<long>(one),
                giants.size(), avf::giant_fraction(r.sample));
    if (!m.partition_exact) {
      std::cout << "FAIL: some realization does not partition the sites\n";
      return kExitScience;
    }
  }
  if (!r.triple_by_height.empty()) {
    std::ostringstream csv;
    csv.precision(10);
    csv << "y,triple_per_length,triple_closed_form,quad_per_length,interfaces_mean,interfaces_closed_form\n";
    const double n = static_cast<double>(c.samples);
    for (int y = 1; y < g.ly(); ++y) {
      // A vertex at height y lies y + 1/2 above the absorbing row; a face row
      // y (1-based) lies y above it.
      csv << y << ',' << r.triple_by_height[y] / (n * g.lx()) << ',' << avf::closed_form_triple_density(y + 0.5)
          << ',' << r.quad_by_height[y] / (n * g.lx()) << ',' << r.interfaces_by_height[y] / n << ','
          << g.lx() * avf::closed_form_interface_density(y) << '\n';
    }
    avf::io::write_text(out / "heights.csv", csv.str());
  }
  std::cout << "wrote " << (out / "sizes.csv").string() << "\n";
  return 0;
}

int cmd_oracle(const std::string& builtin, const std::vector<int>& rect, const std::string& graph_path, int sigmas,
               std::uint64_t seed, const std::string& report_path) {
  const int given = static_cast<int>(!builtin.empty()) + static_cast<int>(!rect.empty()) +
                    static_cast<int>(!graph_path.empty());
  if (given != 1) throw UsageError("oracle needs exactly one of --builtin, --rect, --graph");
  avf::Graph g;
  if (!builtin.empty()) {
    if (builtin != "figure1") throw UsageError("unknown builtin graph '" + builtin + "'");
    g = avf::figure1_graph();
  } else if (!rect.empty()) {
    g = avf::build_open_rect(rect[0], rect[1]);
  } else {
    g = avf::io::load_custom_graph(graph_path);
  }
  // All orders for B <= 3, otherwise identity plus random ones.
  std::vector<std::vector<std::int32_t>> orders;
  std::vector<std::int32_t> sigma(static_cast<std::size_t>(g.num_boundary()));
  std::iota(sigma.begin(), sigma.end(), 0);
  if (g.num_boundary() <= 3) {
    do orders.push_back(sigma);
    while (std::next_permutation(sigma.begin(), sigma.end()));
  } else {
    orders.push_back(sigma);
    avf::RandomSource rng(seed);
    for (int k = 0; k < sigmas; ++k) orders.push_back(avf::random_permutation(g.num_boundary(), rng));
  }
  const avf::EquivalenceReport r = avf::verify_process_equivalence(g, orders);
  const json j = avf::io::equivalence_json(r);
  if (!report_path.empty()) avf::io::write_text(report_path, j.dump(2) + "\n");
  std::cout << "recurrent " << r.recurrent_count << ", forests " << r.forest_count << ", det " << r.determinant
            << ", bijection " << (r.bijection_ok ? "ok" : "BROKEN") << "\n";
  std::cout << "multiset " << avf::format_multiset(r.forest_multiset) << "\n";
  std::cout << (r.pass ? "PASS" : "FAIL") << " over " << orders.size() << " sigma orders\n";
  if (!r.pass) {
    std::cout << j.dump(2) << "\n";
    return kExitScience;
  }
  return 0;
}

struct GreensOptions {
  bool triple = false;
  bool interface = false;
  std::vector<double> ys{1, 2, 5, 10};
  bool oracle = false;
  int graphs = 20;
  int max_sites = 7;
  std::uint64_t seed = 0;
  std::string table_geometry;
  int lx = 0;
  int ly = 0;
  std::string table_out = "green.csv";
};

int cmd_greens(GreensOptions o, bool seed_given) {
  if (!seed_given) o.seed = default_seed();
  if (!o.triple && !o.interface && !o.oracle && o.table_geometry.empty()) o.triple = o.interface = true;
  bool ok = true;
  for (double y : o.ys) {
    if (!(y > 0)) throw UsageError("heights must be positive");
  }
  if (o.triple) {
    std::printf("%8s %18s %18s %12s\n", "y", "triple_density", "1/(2 pi y^2)", "rel_err");
    for (double y : o.ys) {
      const double v = avf::triple_point_density(y), e = avf::closed_form_triple_density(y);
      const double rel = std::abs(v - e) / e;
      ok = ok && rel <= 1e-4;
      std::printf("%8g %18.10g %18.10g %12.3e\n", y, v, e, rel);
    }
  }
  if (o.interface) {
    std::printf("%8s %18s %18s %12s\n", "y", "interface_density", "1/(pi y)", "rel_err");
    for (double y : o.ys) {
      const double v = avf::interface_density(y), e = avf::closed_form_interface_density(y);
      const double rel = std::abs(v - e) / e;
      ok = ok && rel <= 1e-4;
      std::printf("%8g %18.10g %18.10g %12.3e\n", y, v, e, rel);
    }
  }
  if (o.oracle) {
    avf::RandomSource rng(o.seed);
    int matches = 0;
    for (int i = 0; i < o.graphs; ++i) {
      const avf::Graph g = avf::random_oracle_graph(rng, o.max_sites);
      const int total = g.num_sites() + g.num_boundary();
      const int k = std::min<int>(static_cast<int>(rng.below(4)), (total - 1) / 2);
      const avf::RuvInstance in = avf::random_ruv_instance(g, rng, k);
      const double det = avf::z_ruv_determinant(g, in.roots, in.us, in.vs);
      const auto exact = static_cast<double>(avf::signed_forest_sum(g, in.roots, in.us, in.vs));
      const bool match = std::abs(det - exact) <= 1e-6 * std::max(1.0, std::abs(exact));
      matches += match;
      if (!match) std::printf("graph %d: determinant %.9g, enumeration %.0f\n", i, det, exact);
    }
    std::printf("determinant vs enumeration: %d/%d exact matches\n", matches, o.graphs);
    ok = ok && matches == o.graphs;
  }
  if (!o.table_geometry.empty()) {
    const avf::Graph g = avf::build_geometry(avf::parse_geometry(o.table_geometry), o.lx, o.ly);
    const avf::GreenTable t = avf::solve_green(g);
    double worst = 0.0;
    for (int u = 0; u < g.num_sites(); ++u) worst = std::max(worst, std::abs(t.row_sum(u) - 1.0));
    avf::io::write_text(o.table_out, avf::io::green_csv(t));
    std::printf("green table %dx%d: residual %.3e, worst row-sum deviation %.3e, wrote %s\n", g.lx(), g.ly(),
                t.residual(), worst, o.table_out.c_str());
    ok = ok && worst <= 1e-10 && t.residual() <= 1e-10;
  }
  return ok ? 0 : kExitScience;
}

avf::SizeSample load_sample(const std::string& sizes_path, std::string metadata_path) {
  std::ifstream in(sizes_path);
  if (!in) throw avf::io::IoError("cannot open " + sizes_path);
  std::stringstream buf;
  buf << in.rdbuf();
  avf::SizeSample s;
  s.records = avf::io::parse_sizes_csv(buf.str());
  if (metadata_path.empty()) {
    const fs::path guess = fs::path(sizes_path).parent_path() / "run-metadata.json";
    if (fs::exists(guess)) metadata_path = guess.string();
  }
  if (!metadata_path.empty()) avf::io::apply_sample_metadata(avf::io::read_json(metadata_path), s);
  return s;
}

int cmd_plot(const std::string& sizes_path, const std::string& partition_path, const std::string& out_path,
             double slope) {
  if (sizes_path.empty() == partition_path.empty()) throw UsageError("plot needs exactly one of --sizes, --partition");
  std::string svg;
  try {
    if (!sizes_path.empty()) {
      const avf::SizeSample s = load_sample(sizes_path, "");
      std::vector<std::int64_t> sizes;
      for (const auto& r : s.records) {
        if (s.sites == 0 || 2 * r.size <= s.sites) sizes.push_back(r.size);
      }
      svg = avf::svg::ordered_size_plot(sizes, slope);
    } else {
      svg = avf::svg::partition_raster(avf::io::snapshot_from_json(avf::io::read_json(partition_path)));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  avf::io::write_text(out_path, svg);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_stats(const std::string& sizes_path, const std::string& metadata_path, std::int64_t n_min,
              std::int64_t n_max, int k_max, const std::string& out_dir) {
  const avf::SizeSample s = load_sample(sizes_path, metadata_path);
  if (s.sites == 0) throw UsageError("stats needs run metadata (run-metadata.json next to sizes.csv or --metadata)");
  avf::TailWindow w = avf::default_window(s);
  if (n_min > 0) w.n_min = n_min;
  if (n_max > 0) w.n_max = n_max;
  const fs::path out(out_dir);
  int status = 0;
  try {
    const avf::TailFit fit = avf::fit_tail_exponent(s, w);
    avf::io::write_text(out / "fit.json", avf::io::fit_json(fit).dump(2) + "\n");
    std::printf("gammaHat %.4f +- %.4f on [%lld, %lld] from %lld sizes; rank slope %.4f (gamma %.4f)\n",
                fit.gamma_hat, fit.std_error, static_cast<long long>(w.n_min), static_cast<long long>(w.n_max),
                static_cast<long long>(fit.used), fit.rank_slope, fit.rank_gamma);
  } catch (const avf::InsufficientData& e) {
    std::cout << "tail fit skipped: " << e.what() << "\n";
    status = kExitScience;
  }
  std::printf("giant fraction %.6f (1/Lx = %.6f)\n", avf::giant_fraction(s), s.lx > 0 ? 1.0 / s.lx : 0.0);
  if (s.process != "single-site" && s.boundary > 1) {
    const avf::RankProfile p = avf::kth_largest_profile(s, std::min<int>(k_max, static_cast<int>(s.boundary) - 1));
    avf::io::write_text(out / "profile.csv", avf::io::profile_csv(p));
  }
  const avf::MeanSizeReport m = avf::mean_size_check(s);
  std::printf("mean size %.4f +- %.4f, V/B = %.4f, z = %.2f, partition %s\n", m.pooled_mean, m.pooled_stderr,
              m.expected, m.pooled_z, m.partition_exact ? "exact" : "BROKEN");
  if (!m.partition_exact) status = kExitScience;
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary avalanches of the abelian sandpile: simulation, oracles and Green-function checks"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run an ensemble and write sizes.csv and run-metadata.json");
  run_cmd->add_option("--config", run.config_path, "JSON config; flags given on the command line win");
  run_cmd->add_option("--geometry", run.geometry, "open-rect | cylinder | folded-cylinder");
  run_cmd->add_option("--lx", run.lx);
  run_cmd->add_option("--ly", run.ly);
  run_cmd->add_option("--process", run.process, "permutation | bt | single-site");
  run_cmd->add_option("--samples", run.samples, "number of realizations");
  run_cmd->add_option("--seed", run.seed, "default: $AVF_SEED, else 1");
  run_cmd->add_option("--workers", run.workers);
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_option("--snapshots", run.snapshots, "keep partitions of the first N realizations");
  run_cmd->add_flag("--analysis", run.analysis, "triple points and interfaces per height (heights.csv)");
  run_cmd->add_option("--graph", run.graph_path, "custom graph JSON");

  std::string builtin, graph_path, report_path;
  std::vector<int> rect;
  int sigmas = 3;
  std::uint64_t oracle_seed = 1;
  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive process-equivalence and bijection check");
  oracle_cmd->add_option("--builtin", builtin, "figure1");
  oracle_cmd->add_option("--rect", rect, "open rectangle LX LY")->expected(2);
  oracle_cmd->add_option("--graph", graph_path, "custom graph JSON");
  oracle_cmd->add_option("--sigmas", sigmas, "random sigma orders when B > 3");
  oracle_cmd->add_option("--seed", oracle_seed);
  oracle_cmd->add_option("--report", report_path, "write the JSON report here");

  GreensOptions greens;
  auto* greens_cmd = app.add_subcommand("greens", "quadrature densities, determinant oracle, Green tables");
  greens_cmd->add_flag("--triple", greens.triple, "triple-point density against 1/(2 pi y^2)");
  greens_cmd->add_flag("--interface", greens.interface, "interface density against 1/(pi y)");
  greens_cmd->add_option("--y", greens.ys, "heights")->expected(1, -1);
  greens_cmd->add_flag("--oracle", greens.oracle, "determinant against signed forest enumeration");
  greens_cmd->add_option("--graphs", greens.graphs);
  greens_cmd->add_option("--max-sites", greens.max_sites);
  greens_cmd->add_option("--seed", greens.seed);
  greens_cmd->add_option("--table", greens.table_geometry, "export the Green table of this geometry");
  greens_cmd->add_option("--lx", greens.lx);
  greens_cmd->add_option("--ly", greens.ly);
  greens_cmd->add_option("--out", greens.table_out, "CSV path for --table");

  std::string plot_sizes, plot_partition, plot_out = "plot.svg";
  double plot_slope = -0.5;
  auto* plot_cmd = app.add_subcommand("plot", "SVG plots: ordered sizes or a partition raster");
  plot_cmd->add_option("--sizes", plot_sizes, "sizes.csv");
  plot_cmd->add_option("--partition", plot_partition, "partition snapshot JSON");
  plot_cmd->add_option("--out", plot_out);
  plot_cmd->add_option("--slope", plot_slope, "reference line slope");

  std::string stats_sizes, stats_meta, stats_out = ".";
  std::int64_t n_min = 0, n_max = 0;
  int k_max = 20;
  auto* stats_cmd = app.add_subcommand("stats", "tail fit, giant fraction, rank profile, mean size");
  stats_cmd->add_option("--sizes", stats_sizes)->required();
  stats_cmd->add_option("--metadata", stats_meta);
  stats_cmd->add_option("--nmin", n_min);
  stats_cmd->add_option("--nmax", n_max);
  stats_cmd->add_option("--kmax", k_max);
  stats_cmd->add_option("--out", stats_out, "directory for fit.json and profile.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run, *run_cmd);
    if (*oracle_cmd) return cmd_oracle(builtin, rect, graph_path, sigmas, oracle_seed, report_path);
    if (*greens_cmd) return cmd_greens(greens, greens_cmd->count("--seed") > 0);
    if (*plot_cmd) return cmd_plot(plot_sizes, plot_partition, plot_out, plot_slope);
    if (*stats_cmd) return cmd_stats(stats_sizes, stats_meta, n_min, n_max, k_max, stats_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const avf::io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const avf::GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const avf::GuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const avf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitScience;
  } catch (const avf::NotRecurrentError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitScience;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
