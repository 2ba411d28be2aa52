#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vrnmf/acceleration.hpp"
#include "vrnmf/datagen.hpp"
#include "vrnmf/stochastic_solvers.hpp"
#include "vrnmf/trace.hpp"

namespace vrnmf {

// Names accepted by SolverSpec::named and the "name" key of a solver section.
inline constexpr std::string_view kSolverNames[] = {
    "mu", "hals", "smu", "smu-acc", "svrmu", "svrmu-acc", "svrmu-minibatch", "rsvrmu"};

bool is_known_solver(std::string_view name);
std::string solver_name_list();  // comma-separated, for error messages

struct SolverSpec {
  std::string name;
  std::string label;  // defaults to name; must be unique within a config
  std::size_t batch_size = 1;
  std::optional<int> inner_iters;
  double alpha0 = 1.0;
  double decay = 1e-3;
  double beta = 0.5;
  double epsilon = 1e-3;
  double lambda = 1.0;        // rsvrmu only
  double outlier_init = 0.01;  // rsvrmu only: scale of the starting R

  // Unknown name raises ConfigError("name", ...) listing the valid names.
  static SolverSpec named(std::string_view name);

  bool accelerated() const noexcept { return name == "smu-acc" || name == "svrmu-acc"; }
  StochasticConfig stochastic(int epochs, std::uint64_t seed) const;
  std::optional<AccelConfig> accel() const;
};

struct DatasetSpec {
  enum class Kind { kSynthetic, kFile, kImages };
  Kind kind = Kind::kSynthetic;
  SyntheticSpec synthetic;
  std::filesystem::path path;  // matrix file or image directory
  std::size_t width = 0;       // images only
  std::size_t height = 0;
  double max_level = 255.0;
  std::optional<OutlierSpec> outliers;
};

struct HalsSpec {
  std::optional<int> max_iters;  // unset: min(1000, 10 * max_epochs)
  double rel_tol = 1e-10;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<SolverSpec> solvers;
  std::size_t rank = 10;
  int max_epochs = 50;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "results";
  int jobs = 1;
  bool record_wall_time = true;
  HalsSpec hals;

  // Throws ConfigError naming the offending key.
  void validate() const;
  int hals_iters() const;
};

// JSON configuration. Relative dataset paths resolve against `base_dir`.
// Schema violations raise ConfigError with a dotted key path.
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct LoadedDataset {
  NonnegativeMatrix V;
  std::optional<Matrix> V_clean;  // set when outliers were injected
};

// Synthetic and file data are corrupted as loaded. Image corpora are corrupted
// on the clamped pixel scale and then divided, together with the clean copy,
// by the corrupted maximum.
LoadedDataset load_dataset(const DatasetSpec& spec);

// Seeds derived from the run seed so factor initialisation, column sampling
// and outlier initialisation use unrelated streams.
std::uint64_t sampler_seed(std::uint64_t run_seed);
std::uint64_t outlier_seed(std::uint64_t run_seed);

struct FStar {
  double value = 0.0;
  int iterations = 0;  // HALS iterations of the best run
  bool from_cache = false;
};

// Minimum final HALS cost over `seeds`. With a non-empty cache_dir the value
// is read from / written to <cache_dir>/<digest>.fstar, the digest covering V
// and the rank.
FStar compute_f_star(const Matrix& v, std::size_t rank, const std::vector<std::uint64_t>& seeds,
                     int max_iters, double rel_tol,
                     const std::filesystem::path& cache_dir = {});

std::filesystem::path fstar_cache_path(const std::filesystem::path& dir, const Matrix& v,
                                       std::size_t rank);

struct RunResult {
  FactorPair factors;
  std::optional<Matrix> outliers;
  ConvergenceTrace trace;
};

// Runs one solver from init_factors(seed) for `epochs` epochs (iterations for
// mu and hals). Errors propagate.
RunResult run_solver(const SolverSpec& spec, const Matrix& v, std::size_t rank, int epochs,
                     std::uint64_t seed, const SolveOptions& options);

struct RunOutcome {
  std::string label;
  std::string solver;
  std::uint64_t seed = 0;
  std::optional<ConvergenceTrace> trace;  // empty when the run failed
  std::optional<RunResult> result;
  std::string error;
  bool numeric_failure = false;  // error came from a non-finite cost or iterate
  double clean_residual = 0.0;  // ||V_clean - W H||_F, or against V
  std::filesystem::path trace_path;

  bool ok() const noexcept { return trace.has_value(); }
};

struct ExperimentResult {
  FStar f_star;
  std::vector<RunOutcome> runs;  // ordered solver-major, then by seed
  std::filesystem::path summary_path;
};

// One trace per (solver, seed), executed on config.jobs threads. A failing
// run is reported in its RunOutcome and does not stop the others. Traces are
// written to <output>/<label>_seed<seed>.csv, the summary to
// <output>/summary.csv.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Trace CSV: header `epoch,grad_count,wall_ms,cost,optimality_gap`, one line
// per record, shortest round-trip number formatting.
inline constexpr std::string_view kTraceHeader = "epoch,grad_count,wall_ms,cost,optimality_gap";
std::string format_trace(const ConvergenceTrace& trace);
ConvergenceTrace parse_trace(std::string_view text);
void emit_trace(const ConvergenceTrace& trace, const std::filesystem::path& path);
ConvergenceTrace load_trace(const std::filesystem::path& path);

std::string format_summary(const std::vector<RunOutcome>& runs);

struct Mosaic {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t grid_cols = 0;
  std::size_t grid_rows = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

// Columns of W as tile_h x tile_w images (row-major) on a ceil(sqrt(K))-wide
// grid, each tile min-max scaled to 0..255. Constant tiles render as 0;
// unused grid cells are 0.
Mosaic basis_mosaic(const Matrix& w, std::size_t tile_w, std::size_t tile_h);
void emit_basis_mosaic(const Matrix& w, std::size_t tile_w, std::size_t tile_h,
                       const std::filesystem::path& path);

// Gap of the last record with grad_count <= budget; nullopt if none.
std::optional<double> gap_at_grad_count(const ConvergenceTrace& trace, std::int64_t budget);

// Compares two traces at the largest gradient count both have reached:
// the final grad_count of whichever run ends first.
struct GapComparison {
  std::int64_t budget = 0;
  double gap_a = 0.0;
  double gap_b = 0.0;
};
std::optional<GapComparison> compare_at_equal_gradients(const ConvergenceTrace& a,
                                                        const ConvergenceTrace& b);

}  // namespace vrnmf
