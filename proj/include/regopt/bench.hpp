#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regopt/optimizers.hpp"
#include "regopt/problems.hpp"
#include "regopt/verification.hpp"

#include <json.hpp>

namespace regopt {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCsvHeader = "iter,f,grad_fro,g_k,h_k,update_rms,lr";
inline constexpr const char* kOutputDirEnv = "REGOPT_OUTPUT_DIR";

/// Process exit codes shared by every CLI subcommand.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2 };

enum class ScheduleKind { Constant, CosineWithWarmup };

struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double warmup_fraction = 0.05;

  /// Learning-rate multiplier at step k of n. Cosine: linear ramp 0 → 1 over
  /// the first round(warmup_fraction·n) steps, then half-cosine to 0 at k = n−1.
  double multiplier(std::size_t k, std::size_t n) const;
};

/// Everything needed to reproduce a run. Serialized as a JSON object:
///
///   {"problem":   {"name": "quadratic", "m": 4, "n": 8},
///    "optimizer": {"name": "reg", "alpha": 0.01, "mu": 0.9, "p": "2", ...,
///                  "hybrid": {"adamw_groups": ["layer1"], "adamw": {...}}},
///    "schedule":  {"kind": "cosine", "warmup_fraction": 0.05},
///    "iterations": 1000, "seed": 0, "output_dir": "out", "threshold": 0.1}
///
/// Unknown keys are rejected.
struct ExperimentConfig {
  nlohmann::json problem = {{"name", "quadratic"}};
  OptimizerConfig optimizer{};
  std::vector<std::string> adamw_groups;
  AdamConfig hybrid_adamw{};
  Schedule schedule{};
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::optional<double> threshold;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Throws ConfigInvalid.
  void validate() const;
};

/// Builds a named problem. Names: quadratic (random instance; m, n),
/// identity_quadratic (½‖W‖²; m, n), logistic (samples, features, classes,
/// separation), mlp (inputs, hidden, outputs, samples, separation, loss),
/// rosenbrock (m, n).
Problem build_problem(const nlohmann::json& spec, std::uint64_t seed);

struct RunResult {
  RunRecord record;
  std::string status = "ok";  // "ok" or "diverged"
  Params final_params;
};

/// Deterministic in-memory run.
RunResult run_experiment(const ExperimentConfig& cfg);

/// One line per recorded iteration under kCsvHeader, values at 17 significant digits.
void write_csv(std::ostream& out, const RunRecord& record);
/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Runs `cfg` and writes run.csv and run.json into its output directory.
/// Returns the CSV path.
std::filesystem::path run_to_disk(const ExperimentConfig& cfg, RunResult* result = nullptr);

/// Dotted key path ("optimizer.alpha") and the values it takes.
using Grid = std::vector<std::pair<std::string, std::vector<nlohmann::json>>>;

struct SweepRow {
  std::size_t point = 0;
  std::vector<nlohmann::json> values;
  double final_f = 0.0;
  double min_f = 0.0;
  double min_g = 0.0;
  std::optional<std::size_t> iterations_to_threshold;
  std::string status;
};

struct SweepResult {
  std::vector<std::string> keys;
  std::vector<SweepRow> rows;
};

/// Cartesian product of `grid` applied to `base`; points run on a worker pool.
/// Every point shares the base seed so hyperparameter points see the same
/// problem instance and initialization (add "seed" to the grid to vary it).
/// Writes point_NNN.csv per point and summary.csv under `out_dir`.
SweepResult sweep(const nlohmann::json& base, const Grid& grid, const std::filesystem::path& out_dir,
                  std::size_t workers = 0);

Grid parse_grid(const nlohmann::json& j);
void write_summary_csv(std::ostream& out, const SweepResult& result);

/// The default theorem checks, optionally restricted to one theorem.
std::vector<TheoremReport> run_verification(std::optional<TheoremId> only, std::uint64_t seed);

struct PlotSeries {
  std::string label;
  std::vector<double> iter;
  std::vector<double> f;
  std::vector<double> g;
};

/// Parses a run CSV written by write_csv.
PlotSeries read_run_csv(const std::filesystem::path& path);
/// Two stacked panels (loss f and g_k against iteration), one polyline per series.
std::string render_svg(const std::vector<PlotSeries>& series, bool log_y);

std::filesystem::path default_output_dir();

}  // namespace regopt
