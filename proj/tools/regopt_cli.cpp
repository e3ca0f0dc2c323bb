// regopt: run, sweep, verify and plot optimizer experiments.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "regopt/bench.hpp"

namespace {

using nlohmann::json;
using namespace regopt;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(path + ": " + e.what());
  }
}

// Applies --seed and --out overrides on top of the config file.
json with_overrides(json cfg, const std::optional<std::uint64_t>& seed, const std::string& out) {
  if (seed) cfg["seed"] = *seed;
  if (!out.empty()) cfg["output_dir"] = out;
  return cfg;
}

void print_warnings(const ExperimentConfig& cfg) {
  for (const auto& w : cfg.optimizer.reg.warnings()) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const std::string& config, const std::optional<std::uint64_t>& seed,
            const std::string& out) {
  const auto cfg = ExperimentConfig::from_json(with_overrides(load_json(config), seed, out));
  print_warnings(cfg);
  RunResult result;
  const auto csv = run_to_disk(cfg, &result);
  json summary = {{"csv", csv.string()},
                  {"status", result.status},
                  {"rows", result.record.size()},
                  {"final_f", result.record.f.empty() ? json(nullptr) : json(result.record.f.back())}};
  std::cout << summary.dump() << '\n';
  return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& grid_path,
              const std::optional<std::uint64_t>& seed, const std::string& out, std::size_t workers) {
  json base = with_overrides(load_json(config), seed, "");
  const Grid grid = parse_grid(load_json(grid_path));
  std::filesystem::path dir = out;
  if (dir.empty()) {
    dir = base.contains("output_dir") && !base["output_dir"].get<std::string>().empty()
              ? std::filesystem::path(base["output_dir"].get<std::string>())
              : default_output_dir();
  }
  print_warnings(ExperimentConfig::from_json(base));
  const SweepResult result = sweep(base, grid, dir, workers);
  write_summary_csv(std::cout, result);
  return kExitOk;
}

int cmd_verify(const std::string& theorem, const std::optional<std::uint64_t>& seed) {
  std::optional<TheoremId> only;
  if (!theorem.empty() && theorem != "all") only = parse_theorem_id(theorem);
  const auto reports = run_verification(only, seed.value_or(0));
  bool ok = true;
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back(r.to_json());
    if (!r.passed && !r.skipped) ok = false;
  }
  std::cout << arr.dump(2) << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& out, bool log_y) {
  std::vector<PlotSeries> series;
  for (const auto& p : csvs) series.push_back(read_run_csv(p));
  const std::string svg = render_svg(series, log_y);
  if (out.empty()) {
    std::cout << svg;
  } else {
    write_file_atomic(out, svg);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regopt: row/column-scaled momentum optimizer experiments"};
  app.require_subcommand(1);

  std::string config, grid_path, out, theorem;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
  bool log_y = false;
  std::vector<std::string> csvs;

  auto* run = app.add_subcommand("run", "Run one experiment and write run.csv and run.json");
  run->add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Output directory (default: $REGOPT_OUTPUT_DIR or ./regopt_out)");

  auto* sw = app.add_subcommand("sweep", "Run a grid of experiments; prints the summary CSV");
  sw->add_option("--config", config, "Base JSON experiment config")->required()->check(CLI::ExistingFile);
  sw->add_option("--grid", grid_path, "JSON object mapping dotted keys to value lists")
      ->required()
      ->check(CLI::ExistingFile);
  sw->add_option("--seed", seed, "Override the base seed");
  sw->add_option("--out", out, "Output directory");
  sw->add_option("--workers", workers, "Worker threads (0: hardware concurrency)");

  auto* ver = app.add_subcommand("verify", "Run theorem checks and print JSON reports");
  ver->add_option("--theorem", theorem, "all, T1a, T1b, T2, T3 or T4")->default_val("all");
  ver->add_option("--seed", seed, "Base seed for the checks");

  auto* plot = app.add_subcommand("plot", "Render run CSVs to an SVG of loss and g_k");
  plot->add_option("csv", csvs, "Run CSV files")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", out, "SVG path (default: stdout)");
  plot->add_flag("--log-y", log_y, "Logarithmic y axes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*run) return cmd_run(config, seed, out);
    if (*sw) return cmd_sweep(config, grid_path, seed, out, workers);
    if (*ver) return cmd_verify(theorem, seed);
    if (*plot) return cmd_plot(csvs, out, log_y);
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitConfigError;
}
