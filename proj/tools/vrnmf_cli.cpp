// vrnmf command-line front end.
//
// Exit codes: 0 success, 2 usage / configuration / input error, 3 numeric
// failure (non-finite cost or iterate).

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>

#include "vrnmf/acceleration.hpp"
#include "vrnmf/datagen.hpp"
#include "vrnmf/harness.hpp"
#include "vrnmf/io.hpp"

namespace fs = std::filesystem;
using namespace vrnmf;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

enum class Level { kError = 0, kInfo = 1, kDebug = 2 };

Level g_level = Level::kInfo;

void set_log_level_from_env() {
  const char* env = std::getenv("NMF_LOG_LEVEL");
  if (env == nullptr) return;
  if (std::strcmp(env, "error") == 0) g_level = Level::kError;
  else if (std::strcmp(env, "info") == 0) g_level = Level::kInfo;
  else if (std::strcmp(env, "debug") == 0) g_level = Level::kDebug;
  else std::fprintf(stderr, "[warn] NMF_LOG_LEVEL='%s' not one of error|info|debug\n", env);
}

template <typename... Args>
void log(Level level, const char* fmt, Args... args) {
  if (level > g_level) return;
  static const char* tags[] = {"error", "info", "debug"};
  std::fprintf(stderr, "[%s] ", tags[static_cast<int>(level)]);
  if constexpr (sizeof...(Args) == 0) {
    std::fputs(fmt, stderr);
  } else {
    std::fprintf(stderr, fmt, args...);
  }
  std::fputc('\n', stderr);
}

io::MatrixFormat parse_format(const std::string& s) {
  if (s == "csv") return io::MatrixFormat::kCsv;
  if (s == "binary") return io::MatrixFormat::kBinary;
  return io::MatrixFormat::kAuto;
}

struct SynthArgs {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string factors_prefix;
  std::string format = "auto";
};

int run_synth(const SynthArgs& a) {
  const SyntheticData d = gen_synthetic({a.rows, a.cols, a.rank, a.seed});
  const auto fmt = parse_format(a.format);
  io::save_matrix(a.out, d.V, fmt);
  if (!a.factors_prefix.empty()) {
    io::save_matrix(a.factors_prefix + "_W.nnmf", d.W_o, io::MatrixFormat::kBinary);
    io::save_matrix(a.factors_prefix + "_H.nnmf", d.H_o, io::MatrixFormat::kBinary);
  }
  log(Level::kInfo, "wrote %zux%zu matrix to %s", d.V.matrix().rows(), d.V.matrix().cols(),
      a.out.c_str());
  return 0;
}

struct FactorizeArgs {
  std::string data;
  std::string solver;
  std::size_t rank = 0;
  int epochs = 50;
  std::uint64_t seed = 0;
  std::string trace;
  std::string out_w;
  std::string out_h;
  std::string out_r;
  std::optional<double> f_star;
  std::optional<int> hals_iters;
  std::string timing = "wall";
  SolverSpec spec;
};

int run_factorize(FactorizeArgs& a) {
  if (!is_known_solver(a.solver)) {
    std::fprintf(stderr, "unknown solver '%s'; valid solvers: %s\n", a.solver.c_str(),
                 solver_name_list().c_str());
    return kExitUsage;
  }
  const std::string label = a.spec.label;
  SolverSpec spec = a.spec;
  spec.name = a.solver;
  spec.label = label.empty() ? a.solver : label;

  const NonnegativeMatrix v = io::load_matrix(a.data);
  const Matrix& vm = v;
  log(Level::kDebug, "loaded %zux%zu from %s", vm.rows(), vm.cols(), a.data.c_str());
  if (spec.accelerated()) {
    log(Level::kInfo, "repeated-h budget L = %d",
        compute_budget_L(vm.rows(), vm.cols(), a.rank, spec.beta));
  }

  SolveOptions opts;
  opts.record_wall_time = a.timing == "wall";
  if (a.f_star) {
    opts.f_star = *a.f_star;
  } else {
    const fs::path cache_dir = fs::path(a.trace).parent_path();
    const int iters = a.hals_iters.value_or(std::min(1000, 10 * a.epochs));
    const FStar f = compute_f_star(vm, a.rank, {a.seed}, iters, 1e-10,
                                   cache_dir.empty() ? fs::path(".") : cache_dir);
    opts.f_star = f.value;
    log(Level::kInfo, "f_star = %.17g (%s)", f.value, f.from_cache ? "cached" : "computed");
  }
  opts.on_epoch = [](const EpochView& e) { log(Level::kDebug, "epoch %d done", e.epoch); };

  const RunResult r = run_solver(spec, vm, a.rank, a.epochs, a.seed, opts);
  emit_trace(r.trace, a.trace);
  if (!a.out_w.empty()) io::save_matrix(a.out_w, r.factors.W);
  if (!a.out_h.empty()) io::save_matrix(a.out_h, r.factors.H);
  if (!a.out_r.empty()) {
    if (!r.outliers) {
      log(Level::kError, "--out-r requires the rsvrmu solver");
      return kExitUsage;
    }
    io::save_matrix(a.out_r, *r.outliers);
  }
  const auto& last = r.trace.back();
  log(Level::kInfo, "%s: %d epochs, %lld gradients, cost %.6g, gap %.6g", spec.name.c_str(),
      last.epoch, static_cast<long long>(last.grad_count), last.cost, last.optimality_gap);
  return 0;
}

struct BenchmarkArgs {
  std::string config;
  std::optional<int> jobs;
  std::string output;
};

int run_benchmark(const BenchmarkArgs& a) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.jobs) {
    if (*a.jobs < 1) throw ConfigError("jobs", "must be >= 1");
    cfg.jobs = *a.jobs;
  }
  if (!a.output.empty()) cfg.output_dir = a.output;
  const ExperimentResult res = run_experiment(cfg);
  log(Level::kInfo, "f_star = %.17g (%s)", res.f_star.value,
      res.f_star.from_cache ? "cached" : "computed");
  bool numeric = false;
  for (const auto& run : res.runs) {
    if (run.ok()) {
      log(Level::kInfo, "%s seed %llu: final gap %.6g", run.label.c_str(),
          static_cast<unsigned long long>(run.seed), run.trace->back().optimality_gap);
    } else {
      log(Level::kError, "%s seed %llu failed: %s", run.label.c_str(),
          static_cast<unsigned long long>(run.seed), run.error.c_str());
      numeric = numeric || run.numeric_failure;
    }
  }
  log(Level::kInfo, "summary written to %s", res.summary_path.string().c_str());
  return numeric ? kExitNumeric : 0;
}

struct InjectArgs {
  std::string data;
  std::string out;
  std::string mask;
  OutlierSpec spec;
};

int run_inject(const InjectArgs& a) {
  const NonnegativeMatrix v = io::load_matrix(a.data);
  const CorruptedData c = inject_outliers(v, a.spec);
  io::save_matrix(a.out, c.V);
  if (!a.mask.empty()) {
    const Matrix& vm = v;
    Matrix m(vm.rows(), vm.cols());
    for (std::size_t i = 0; i < c.mask.size(); ++i) m.data()[i] = c.mask[i];
    io::save_matrix(a.mask, m);
  }
  std::size_t hits = 0;
  for (auto b : c.mask) hits += b;
  log(Level::kInfo, "corrupted %zu of %zu entries", hits, c.mask.size());
  return 0;
}

struct MosaicArgs {
  std::string w;
  std::size_t tile_w = 0;
  std::size_t tile_h = 0;
  std::string out;
};

int run_mosaic(const MosaicArgs& a) {
  emit_basis_mosaic(io::load_matrix(a.w), a.tile_w, a.tile_h, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level_from_env();
  CLI::App app{"Variance-reduced stochastic multiplicative updates for NMF"};
  app.require_subcommand(1, 1);
  app.set_config("--flags-file", "", "Read subcommand flags from a TOML/INI file");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a normalized synthetic low-rank matrix");
  s->add_option("--rows", synth.rows, "F")->required()->check(CLI::PositiveNumber);
  s->add_option("--cols", synth.cols, "N")->required()->check(CLI::PositiveNumber);
  s->add_option("--rank", synth.rank, "K_o")->required()->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed)->required();
  s->add_option("--out", synth.out, "Output matrix file")->required();
  s->add_option("--factors-prefix", synth.factors_prefix,
                "Also write <prefix>_W.nnmf and <prefix>_H.nnmf");
  s->add_option("--format", synth.format)->check(CLI::IsMember({"auto", "csv", "binary"}));

  FactorizeArgs fz;
  auto* f = app.add_subcommand("factorize", "Factorize one matrix with one solver");
  f->add_option("--data", fz.data, "Input matrix (.csv or NNMF1 binary)")->required();
  f->add_option("--solver", fz.solver, "One of: " + solver_name_list())->required();
  f->add_option("--rank", fz.rank, "K")->required()->check(CLI::PositiveNumber);
  f->add_option("--epochs", fz.epochs, "Epochs (iterations for mu/hals)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  f->add_option("--seed", fz.seed)->capture_default_str();
  f->add_option("--trace", fz.trace, "Trace CSV output")->required();
  f->add_option("--out-w", fz.out_w);
  f->add_option("--out-h", fz.out_h);
  f->add_option("--out-r", fz.out_r, "Outlier matrix (rsvrmu)");
  f->add_option("--f-star", fz.f_star, "Reference optimum; default runs HALS");
  f->add_option("--hals-iters", fz.hals_iters);
  f->add_option("--timing", fz.timing)->check(CLI::IsMember({"wall", "none"}))
      ->capture_default_str();
  f->add_option("--label", fz.spec.label);
  f->add_option("--batch-size", fz.spec.batch_size)->capture_default_str()
      ->check(CLI::PositiveNumber);
  f->add_option("--inner-iters", fz.spec.inner_iters);
  f->add_option("--alpha0", fz.spec.alpha0)->capture_default_str();
  f->add_option("--decay", fz.spec.decay)->capture_default_str();
  f->add_option("--beta", fz.spec.beta)->capture_default_str();
  f->add_option("--epsilon", fz.spec.epsilon)->capture_default_str();
  f->add_option("--lambda", fz.spec.lambda)->capture_default_str();
  f->add_option("--outlier-init", fz.spec.outlier_init)->capture_default_str();

  BenchmarkArgs bm;
  auto* b = app.add_subcommand("benchmark", "Run a configured solver x seed comparison");
  b->add_option("--config", bm.config, "JSON experiment config")->required();
  b->add_option("--jobs", bm.jobs, "Parallel runs (overrides config)");
  b->add_option("--output", bm.output, "Output directory (overrides config)");

  InjectArgs inj;
  auto* o = app.add_subcommand("inject-outliers", "Add sparse nonnegative outliers to a matrix");
  o->add_option("--data", inj.data)->required();
  o->add_option("--out", inj.out)->required();
  o->add_option("--density", inj.spec.density, "rho")->required();
  o->add_option("--low", inj.spec.low)->capture_default_str();
  o->add_option("--high", inj.spec.high)->required();
  o->add_option("--seed", inj.spec.seed)->capture_default_str();
  o->add_option("--mask", inj.mask, "Write the 0/1 outlier mask");

  MosaicArgs mo;
  auto* m = app.add_subcommand("mosaic", "Render basis columns of W as a PGM tile grid");
  m->add_option("--w", mo.w, "W matrix (F x K)")->required();
  m->add_option("--tile-width", mo.tile_w)->required()->check(CLI::PositiveNumber);
  m->add_option("--tile-height", mo.tile_h)->required()->check(CLI::PositiveNumber);
  m->add_option("--out", mo.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return run_synth(synth);
    if (f->parsed()) return run_factorize(fz);
    if (b->parsed()) return run_benchmark(bm);
    if (o->parsed()) return run_inject(inj);
    if (m->parsed()) return run_mosaic(mo);
  } catch (const NumericError& e) {
    log(Level::kError, "numeric failure at epoch %d: %s", e.epoch(), e.what());
    return kExitNumeric;
  } catch (const ConfigError& e) {
    log(Level::kError, "config error at %s", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log(Level::kError, "%s", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
