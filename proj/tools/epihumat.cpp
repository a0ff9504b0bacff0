// epihumat: run, validate and plot epidemic scenarios.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error,
// 3 invalid scenario or input data, 4 missing or unwritable file.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "epihumat/error.hpp"
#include "epihumat/reporting.hpp"
#include "epihumat/scenario.hpp"
#include "epihumat/simulation.hpp"

namespace fs = std::filesystem;
using namespace epihumat;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kInvalid = 3, kFile = 4 };

constexpr const char* kOutEnv = "EPIHUMAT_OUT_DIR";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FileError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw FileError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw FileError("write failed for '" + p.string() + "'");
}

// A run manifest stands in for its scenario file.
ScenarioConfig load_config(const fs::path& path) {
  const auto text = slurp(path);
  if (looks_like_manifest(text)) return config_from_manifest(text, path.string());
  return load_scenario(path);
}

struct RunOptions {
  std::string scenario;
  int replicates = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool plots = false;
  std::string dump_graph;
  unsigned threads = 1;
  bool quiet = false;
};

int cmd_run(const RunOptions& o) {
  auto config = load_config(o.scenario);
  if (o.replicates > 0) config.replicates = o.replicates;
  if (o.seed_set) config.rng_seed = o.seed;

  fs::path out = o.out;
  if (out.empty()) {
    const char* env = std::getenv(kOutEnv);
    out = env && *env ? env : "epihumat-out";
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw FileError("cannot create output directory '" + out.string() + "': " + ec.message());

  const auto inputs = load_inputs(config);
  if (!o.dump_graph.empty()) {
    const auto world = init_world(config, inputs, config.rng_seed);
    std::ofstream g(o.dump_graph, std::ios::binary);
    if (!g) throw FileError("cannot write '" + o.dump_graph + "'");
    dump_graph(g, world.graph);
  }

  if (!o.quiet) {
    std::cerr << "running " << (config.name.empty() ? o.scenario : config.name) << ": " << config.replicates
              << " replicate(s), " << config.population.target_size << " agents, "
              << config.calendar.horizon_days << " days, seed " << config.rng_seed << "\n";
  }
  const auto result = run_replicates(config, config.replicates, o.threads, inputs);

  RunFiles files;
  for (std::size_t i = 0; i < result.replicates.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "replicate_%03zu.csv", i + 1);
    std::ostringstream csv;
    write_metrics_csv(csv, result.replicates[i], config.population.target_size);
    write_text(out / name, csv.str());
    files.replicate_csvs.emplace_back(name);
  }
  std::ostringstream mean;
  write_mean_csv(mean, result.mean);
  write_text(out / "mean.csv", mean.str());
  files.mean_csv = "mean.csv";
  write_text(out / "manifest.json", manifest_json(config, result, files));

  if (o.plots) {
    std::istringstream in(mean.str());
    const auto table = parse_metrics_csv(in, "mean.csv");
    PlotSpec spec;
    spec.series = default_plot_series();
    spec.title = (config.name.empty() ? std::string("scenario") : config.name) + " (mean of " +
                 std::to_string(result.replicates.size()) + ")";
    write_text(out / "mean.svg", render_svg(table, spec));
  }

  if (!o.quiet) {
    const auto s = summarize(result.mean);
    const double n = static_cast<double>(config.population.target_size);
    std::cout << "peak prevalence " << s.peak_prevalence / n * 100.0 << "% on day " << s.peak_day
              << ", final recovered+dead " << s.final_removed / n * 100.0 << "%, mean acceptance "
              << s.mean_acceptance * 100.0 << "%\n"
              << "wrote " << result.replicates.size() + 2 + (o.plots ? 1 : 0) << " files to " << out.string() << "\n";
  }
  return kOk;
}

int cmd_validate(const std::string& scenario) {
  const auto config = load_config(scenario);
  std::cout << scenario << ": ok (" << to_string(config.kind) << ", " << config.population.target_size
            << " agents, " << config.calendar.horizon_days << " days)\n";
  return kOk;
}

int cmd_plot(const std::string& csv, const std::string& out, const std::vector<std::string>& series,
             const std::string& title) {
  const auto table = read_metrics_csv(csv);
  PlotSpec spec;
  spec.series = series;
  spec.title = title;
  write_text(out, render_svg(table, spec));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based epidemic simulator with need-driven compliance"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write CSV time series");
  run_cmd->add_option("--scenario", run.scenario, "Scenario file or run manifest")->required();
  run_cmd->add_option("--replicates", run.replicates, "Number of replicates (overrides the file)")
      ->check(CLI::PositiveNumber);
  auto* seed_opt = run_cmd->add_option("--seed", run.seed, "Root seed (overrides the file)");
  run_cmd->add_option("--out", run.out, std::string("Output directory (default $") + kOutEnv + " or ./epihumat-out)");
  run_cmd->add_flag("--plots", run.plots, "Also render mean.svg");
  run_cmd->add_option("--dump-graph", run.dump_graph, "Write the initial social graph of the first replicate");
  run_cmd->add_option("--threads", run.threads, "Replicates run concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--quiet", run.quiet, "No progress output");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file and report every problem");
  validate_cmd->add_option("--scenario,scenario", validate_path, "Scenario file")->required();

  std::string plot_csv, plot_out, plot_title;
  std::vector<std::string> plot_series = default_plot_series();
  auto* plot_cmd = app.add_subcommand("plot", "Render a metrics CSV as an SVG chart");
  plot_cmd->add_option("--csv", plot_csv, "Metrics CSV")->required();
  plot_cmd->add_option("--out", plot_out, "SVG file to write")->required();
  plot_cmd->add_option("--series", plot_series, "Columns to draw")->delimiter(',');
  plot_cmd->add_option("--title", plot_title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  run.seed_set = seed_opt->count() > 0;

  try {
    if (*run_cmd) return cmd_run(run);
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*plot_cmd) {
      std::erase(plot_series, std::string{});
      if (plot_series.empty()) {
        std::cerr << "error: --series selects no columns\n";
        return kUsage;
      }
      return cmd_plot(plot_csv, plot_out, plot_series, plot_title);
    }
  } catch (const ValidationError& e) {
    std::cerr << "invalid input:\n";
    for (const auto& issue : e.issues()) std::cerr << "  - " << issue << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kFile;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
