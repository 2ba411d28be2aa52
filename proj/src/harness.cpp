#include "vrnmf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vrnmf/batch_solvers.hpp"
#include "vrnmf/io.hpp"
#include "vrnmf/linalg.hpp"
#include "vrnmf/robust.hpp"

namespace vrnmf {
namespace fs = std::filesystem;
using nlohmann::json;

bool is_known_solver(std::string_view name) {
  return std::find(std::begin(kSolverNames), std::end(kSolverNames), name) !=
         std::end(kSolverNames);
}

std::string solver_name_list() {
  std::string out;
  for (auto name : kSolverNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

SolverSpec SolverSpec::named(std::string_view name) {
  if (!is_known_solver(name)) {
    throw ConfigError("name", "unknown solver '" + std::string(name) + "' (valid: " +
                                  solver_name_list() + ")");
  }
  SolverSpec s;
  s.name = std::string(name);
  s.label = s.name;
  return s;
}

StochasticConfig SolverSpec::stochastic(int epochs, std::uint64_t seed) const {
  StochasticConfig c;
  c.epochs = epochs;
  c.inner_iters = inner_iters;
  c.alpha0 = alpha0;
  c.decay = decay;
  c.batch_size = batch_size;
  c.seed = sampler_seed(seed);
  return c;
}

std::optional<AccelConfig> SolverSpec::accel() const {
  if (!accelerated()) return std::nullopt;
  return AccelConfig(beta, epsilon);
}

std::uint64_t sampler_seed(std::uint64_t run_seed) {
  return run_seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL;
}

std::uint64_t outlier_seed(std::uint64_t run_seed) {
  return run_seed * 0xBF58476D1CE4E5B9ULL + 0x94D049BB133111EBULL;
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (solvers.empty()) throw ConfigError("solvers", "at least one solver is required");
  if (rank < 1) throw ConfigError("rank", "must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs", "must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (jobs < 1) throw ConfigError("jobs", "must be >= 1");
  if (hals.max_iters && *hals.max_iters < 1) throw ConfigError("hals.max_iters", "must be >= 1");
  if (!(hals.rel_tol >= 0.0)) throw ConfigError("hals.rel_tol", "must be >= 0");
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    const auto& s = solvers[i];
    const std::string at = "solvers[" + std::to_string(i) + "]";
    if (!is_known_solver(s.name)) {
      throw ConfigError(at + ".name", "unknown solver '" + s.name + "' (valid: " +
                                          solver_name_list() + ")");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (solvers[j].label == s.label) throw ConfigError(at + ".label", "duplicate label");
    }
    if (s.batch_size < 1) throw ConfigError(at + ".batch_size", "must be >= 1");
    if (s.inner_iters && *s.inner_iters < 1) throw ConfigError(at + ".inner_iters", "must be >= 1");
    if (!(s.alpha0 > 0.0 && s.alpha0 <= 1.0)) throw ConfigError(at + ".alpha0", "must lie in (0, 1]");
    if (!(s.decay >= 0.0)) throw ConfigError(at + ".decay", "must be >= 0");
    if (!(s.beta >= 0.0 && s.beta <= 1.0)) throw ConfigError(at + ".beta", "must lie in [0, 1]");
    if (!(s.epsilon > 0.0)) throw ConfigError(at + ".epsilon", "must be > 0");
    if (!(s.lambda > 0.0) || !std::isfinite(s.lambda)) throw ConfigError(at + ".lambda", "must be > 0");
    if (!(s.outlier_init > 0.0)) throw ConfigError(at + ".outlier_init", "must be > 0");
  }
}

int ExperimentConfig::hals_iters() const {
  return hals.max_iters.value_or(std::min(1000, 10 * max_epochs));
}

namespace {

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void reject_unknown(const json& obj, const std::string& at,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(join_path(at, key), "unknown key");
    }
  }
}

const json& require_key(const json& obj, const std::string& at, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join_path(at, key), "missing required key");
  return *it;
}

const json& require_object(const json& j, const std::string& at) {
  if (!j.is_object()) throw ConfigError(at, "expected an object");
  return j;
}

template <typename T>
T get_as(const json& j, const std::string& at) {
  if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) throw ConfigError(at, "expected a string");
    return j.get<std::string>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!j.is_number()) throw ConfigError(at, "expected a number");
    return j.get<double>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw ConfigError(at, "expected true or false");
    return j.get<bool>();
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!j.is_number_unsigned()) throw ConfigError(at, "expected a nonnegative integer");
    return j.get<T>();
  } else {
    if (!j.is_number_integer()) throw ConfigError(at, "expected an integer");
    return j.get<T>();
  }
}

template <typename T>
void read_opt(const json& obj, const std::string& at, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it != obj.end()) out = get_as<T>(*it, join_path(at, key));
}

DatasetSpec parse_dataset(const json& j, const fs::path& base_dir) {
  const std::string at = "dataset";
  require_object(j, at);
  DatasetSpec d;
  const std::string type = get_as<std::string>(require_key(j, at, "type"), at + ".type");
  if (type == "synthetic") {
    reject_unknown(j, at, {"type", "rows", "cols", "rank", "seed"});
    d.kind = DatasetSpec::Kind::kSynthetic;
    read_opt(j, at, "rows", d.synthetic.rows);
    read_opt(j, at, "cols", d.synthetic.cols);
    read_opt(j, at, "rank", d.synthetic.rank);
    read_opt(j, at, "seed", d.synthetic.seed);
    try {
      d.synthetic.validate();
    } catch (const DomainError& e) {
      throw ConfigError(at, e.what());
    }
  } else if (type == "file") {
    reject_unknown(j, at, {"type", "path"});
    d.kind = DatasetSpec::Kind::kFile;
    d.path = get_as<std::string>(require_key(j, at, "path"), at + ".path");
  } else if (type == "images") {
    reject_unknown(j, at, {"type", "dir", "width", "height", "max_level"});
    d.kind = DatasetSpec::Kind::kImages;
    d.path = get_as<std::string>(require_key(j, at, "dir"), at + ".dir");
    d.width = get_as<std::size_t>(require_key(j, at, "width"), at + ".width");
    d.height = get_as<std::size_t>(require_key(j, at, "height"), at + ".height");
    read_opt(j, at, "max_level", d.max_level);
    if (d.width == 0 || d.height == 0) throw ConfigError(at, "width and height must be >= 1");
    if (!(d.max_level > 0.0)) throw ConfigError(at + ".max_level", "must be > 0");
  } else {
    throw ConfigError(at + ".type", "expected synthetic, file or images, got '" + type + "'");
  }
  if (!d.path.empty() && d.path.is_relative() && !base_dir.empty()) d.path = base_dir / d.path;
  return d;
}

OutlierSpec parse_outliers(const json& j) {
  const std::string at = "outliers";
  require_object(j, at);
  reject_unknown(j, at, {"density", "low", "high", "seed"});
  OutlierSpec o;
  o.density = get_as<double>(require_key(j, at, "density"), at + ".density");
  read_opt(j, at, "low", o.low);
  read_opt(j, at, "high", o.high);
  read_opt(j, at, "seed", o.seed);
  try {
    o.validate();
  } catch (const DomainError& e) {
    throw ConfigError(at, e.what());
  }
  return o;
}

SolverSpec parse_solver(const json& j, const std::string& at) {
  require_object(j, at);
  reject_unknown(j, at, {"name", "label", "batch_size", "inner_iters", "alpha0", "decay", "beta",
                         "epsilon", "lambda", "outlier_init"});
  const std::string name = get_as<std::string>(require_key(j, at, "name"), at + ".name");
  if (!is_known_solver(name)) {
    throw ConfigError(at + ".name",
                      "unknown solver '" + name + "' (valid: " + solver_name_list() + ")");
  }
  SolverSpec s = SolverSpec::named(name);
  read_opt(j, at, "label", s.label);
  read_opt(j, at, "batch_size", s.batch_size);
  if (j.contains("inner_iters")) s.inner_iters = get_as<int>(j["inner_iters"], at + ".inner_iters");
  read_opt(j, at, "alpha0", s.alpha0);
  read_opt(j, at, "decay", s.decay);
  read_opt(j, at, "beta", s.beta);
  read_opt(j, at, "epsilon", s.epsilon);
  read_opt(j, at, "lambda", s.lambda);
  read_opt(j, at, "outlier_init", s.outlier_init);
  return s;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  require_object(root, "<root>");
  reject_unknown(root, "", {"dataset", "outliers", "rank", "max_epochs", "seeds", "solvers",
                            "hals", "output", "jobs", "timing"});

  ExperimentConfig c;
  c.dataset = parse_dataset(require_key(root, "", "dataset"), base_dir);
  if (root.contains("outliers")) c.dataset.outliers = parse_outliers(root["outliers"]);
  c.rank = get_as<std::size_t>(require_key(root, "", "rank"), "rank");
  read_opt(root, "", "max_epochs", c.max_epochs);
  if (root.contains("seeds")) {
    const json& seeds = root["seeds"];
    if (!seeds.is_array()) throw ConfigError("seeds", "expected an array of integers");
    c.seeds.clear();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      c.seeds.push_back(get_as<std::uint64_t>(seeds[i], "seeds[" + std::to_string(i) + "]"));
    }
  }
  const json& solvers = require_key(root, "", "solvers");
  if (!solvers.is_array()) throw ConfigError("solvers", "expected an array of solver sections");
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    c.solvers.push_back(parse_solver(solvers[i], "solvers[" + std::to_string(i) + "]"));
  }
  if (root.contains("hals")) {
    const json& h = require_object(root["hals"], "hals");
    reject_unknown(h, "hals", {"max_iters", "rel_tol"});
    if (h.contains("max_iters")) c.hals.max_iters = get_as<int>(h["max_iters"], "hals.max_iters");
    read_opt(h, "hals", "rel_tol", c.hals.rel_tol);
  }
  if (root.contains("output")) {
    c.output_dir = get_as<std::string>(root["output"], "output");
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
  }
  read_opt(root, "", "jobs", c.jobs);
  if (root.contains("timing")) {
    const auto timing = get_as<std::string>(root["timing"], "timing");
    if (timing != "wall" && timing != "none") throw ConfigError("timing", "expected wall or none");
    c.record_wall_time = timing == "wall";
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str(), path.parent_path());
}

// ---------------------------------------------------------------- data

LoadedDataset load_dataset(const DatasetSpec& spec) {
  if (spec.kind == DatasetSpec::Kind::kImages && spec.outliers) {
    // Outliers land on the pixel scale; both matrices then share one divisor.
    Matrix clean = io::load_image_dir_raw(spec.path, spec.width, spec.height, spec.max_level);
    CorruptedData corrupted = inject_outliers(clean, *spec.outliers);
    const double top = corrupted.V.max_entry();
    if (!(top > 0.0)) throw DomainError("load_dataset: image corpus is all zeros");
    for (double& x : clean.values()) x /= top;
    for (double& x : corrupted.V.values()) x /= top;
    return {NonnegativeMatrix(std::move(corrupted.V)), std::move(clean)};
  }
  std::optional<NonnegativeMatrix> v;
  switch (spec.kind) {
    case DatasetSpec::Kind::kSynthetic:
      v.emplace(gen_synthetic(spec.synthetic).V);
      break;
    case DatasetSpec::Kind::kFile:
      v.emplace(io::load_matrix(spec.path));
      break;
    case DatasetSpec::Kind::kImages:
      v.emplace(io::load_image_dir(spec.path, spec.width, spec.height, spec.max_level));
      break;
  }
  if (!spec.outliers) return {std::move(*v), std::nullopt};
  Matrix clean = v->matrix();
  CorruptedData corrupted = inject_outliers(clean, *spec.outliers);
  return {NonnegativeMatrix(std::move(corrupted.V)), std::move(clean)};
}

// ---------------------------------------------------------------- f_star

namespace {

std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return !tok.empty() && ec == std::errc() && ptr == tok.data() + tok.size();
}

std::optional<FStar> read_fstar(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string value_line;
  std::string iter_line;
  if (!std::getline(in, value_line) || !std::getline(in, iter_line)) return std::nullopt;
  FStar f;
  double iters = 0.0;
  if (!parse_number(value_line, f.value) || !parse_number(iter_line, iters)) return std::nullopt;
  if (!std::isfinite(f.value) || f.value < 0.0) return std::nullopt;
  f.iterations = static_cast<int>(iters);
  f.from_cache = true;
  return f;
}

}  // namespace

fs::path fstar_cache_path(const fs::path& dir, const Matrix& v, std::size_t rank) {
  return dir / (io::matrix_digest(v, rank) + ".fstar");
}

FStar compute_f_star(const Matrix& v, std::size_t rank, const std::vector<std::uint64_t>& seeds,
                     int max_iters, double rel_tol, const fs::path& cache_dir) {
  if (seeds.empty()) throw DomainError("compute_f_star: no seeds");
  fs::path cache;
  if (!cache_dir.empty()) {
    cache = fstar_cache_path(cache_dir, v, rank);
    if (auto cached = read_fstar(cache)) return *cached;
  }
  FStar best;
  best.value = std::numeric_limits<double>::infinity();
  SolveOptions quiet;
  quiet.record_wall_time = false;
  for (std::uint64_t seed : seeds) {
    const HalsResult r = hals_solve(v, rank, BatchConfig(max_iters, rel_tol, seed), quiet);
    if (r.f_star < best.value) {
      best.value = r.f_star;
      best.iterations = r.iterations;
    }
  }
  if (!cache.empty()) {
    fs::create_directories(cache_dir);
    std::ofstream out(cache, std::ios::trunc);
    out << format_number(best.value) << "\n" << best.iterations << "\n";
    if (!out) throw FormatError("cannot write " + cache.string());
  }
  return best;
}

// ---------------------------------------------------------------- runs

RunResult run_solver(const SolverSpec& spec, const Matrix& v, std::size_t rank, int epochs,
                     std::uint64_t seed, const SolveOptions& options) {
  if (spec.name == "mu") {
    BatchResult r = mu_batch_solve(v, rank, BatchConfig(epochs, 0.0, seed), options);
    return {std::move(r.factors), std::nullopt, std::move(r.trace)};
  }
  if (spec.name == "hals") {
    HalsResult r = hals_solve(v, rank, BatchConfig(epochs, 0.0, seed), options);
    return {std::move(r.factors), std::nullopt, std::move(r.trace)};
  }
  FactorPair start = init_factors(v.rows(), v.cols(), rank, seed);
  const StochasticConfig cfg = spec.stochastic(epochs, seed);
  if (spec.name == "smu" || spec.name == "smu-acc") {
    StochasticResult r = smu_solve(v, std::move(start), cfg, spec.accel(), options);
    return {std::move(r.factors), std::nullopt, std::move(r.trace)};
  }
  if (spec.name == "rsvrmu") {
    Matrix r0 = init_outliers(v.rows(), v.cols(), spec.outlier_init, outlier_seed(seed));
    RobustResult r =
        rsvrmu_solve(v, std::move(start), std::move(r0), cfg, spec.lambda, std::nullopt, options);
    return {std::move(r.factors), std::move(r.outliers.R), std::move(r.trace)};
  }
  if (spec.name == "svrmu" || spec.name == "svrmu-acc" || spec.name == "svrmu-minibatch") {
    StochasticResult r = svrmu_solve(v, std::move(start), cfg, spec.accel(), options);
    return {std::move(r.factors), std::nullopt, std::move(r.trace)};
  }
  throw ConfigError("name", "unknown solver '" + spec.name + "' (valid: " + solver_name_list() +
                                ")");
}

namespace {

double residual_norm(const Matrix& reference, const FactorPair& factors) {
  const Matrix wh = linalg::multiply(factors.W, factors.H);
  return std::sqrt(simd::active_kernels().sum_sq_diff(reference.data(), wh.data(), wh.size()));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const LoadedDataset data = load_dataset(config.dataset);
  const Matrix& v = data.V;
  if (config.rank > std::min(v.rows(), v.cols())) {
    throw ConfigError("rank", "K = " + std::to_string(config.rank) + " exceeds min(F, N) = " +
                                  std::to_string(std::min(v.rows(), v.cols())));
  }
  fs::create_directories(config.output_dir);

  ExperimentResult result;
  result.f_star = compute_f_star(v, config.rank, config.seeds, config.hals_iters(),
                                 config.hals.rel_tol, config.output_dir);

  for (const auto& solver : config.solvers) {
    for (std::uint64_t seed : config.seeds) {
      RunOutcome o;
      o.label = solver.label;
      o.solver = solver.name;
      o.seed = seed;
      o.trace_path = config.output_dir / (solver.label + "_seed" + std::to_string(seed) + ".csv");
      result.runs.push_back(std::move(o));
    }
  }

  const Matrix& reference = data.V_clean ? *data.V_clean : v;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.runs.size(); i = next++) {
      RunOutcome& o = result.runs[i];
      const SolverSpec& spec = config.solvers[i / config.seeds.size()];
      try {
        SolveOptions opts;
        opts.f_star = result.f_star.value;
        opts.record_wall_time = config.record_wall_time;
        RunResult r = run_solver(spec, v, config.rank, config.max_epochs, o.seed, opts);
        o.clean_residual = residual_norm(reference, r.factors);
        emit_trace(r.trace, o.trace_path);
        o.trace = r.trace;
        o.result = std::move(r);
      } catch (const NumericError& e) {
        o.error = e.what();
        o.numeric_failure = true;
        o.trace.reset();
        o.result.reset();
      } catch (const std::exception& e) {
        o.error = e.what();
        o.trace.reset();
        o.result.reset();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.jobs), result.runs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  result.summary_path = config.output_dir / "summary.csv";
  std::ofstream out(result.summary_path, std::ios::binary | std::ios::trunc);
  out << format_summary(result.runs);
  if (!out) throw FormatError("cannot write " + result.summary_path.string());
  return result;
}

std::string format_summary(const std::vector<RunOutcome>& runs) {
  std::string out =
      "label,solver,seed,status,epochs,grad_count,final_cost,final_gap,residual,error\n";
  for (const auto& o : runs) {
    out += csv_field(o.label) + "," + o.solver + "," + std::to_string(o.seed) + ",";
    if (o.ok() && !o.trace->empty()) {
      const auto& last = o.trace->back();
      out += "ok," + std::to_string(last.epoch) + "," + std::to_string(last.grad_count) + "," +
             format_number(last.cost) + "," + format_number(last.optimality_gap) + "," +
             format_number(o.clean_residual) + ",\n";
    } else {
      out += "failed,,,,,," + csv_field(o.error) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------- traces

std::string format_trace(const ConvergenceTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace.records()) {
    out += std::to_string(r.epoch) + "," + std::to_string(r.grad_count) + "," +
           format_number(r.wall_ms) + "," + format_number(r.cost) + "," +
           format_number(r.optimality_gap) + "\n";
  }
  return out;
}

ConvergenceTrace parse_trace(std::string_view text) {
  std::vector<TraceRecord> records;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kTraceHeader) throw FormatError("trace: unexpected header", line_no);
      header_seen = true;
      continue;
    }
    std::string_view fields[5];
    std::size_t count = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      if (count == 5) throw FormatError("trace: too many fields", line_no, count + 1);
      fields[count++] = line.substr(0, comma);
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (count != 5) throw FormatError("trace: expected 5 fields", line_no, count);
    TraceRecord r;
    if (!parse_number(fields[0], r.epoch)) throw FormatError("trace: bad epoch", line_no, 1);
    if (!parse_number(fields[1], r.grad_count)) throw FormatError("trace: bad grad_count", line_no, 2);
    if (!parse_number(fields[2], r.wall_ms)) throw FormatError("trace: bad wall_ms", line_no, 3);
    if (!parse_number(fields[3], r.cost)) throw FormatError("trace: bad cost", line_no, 4);
    if (!parse_number(fields[4], r.optimality_gap)) {
      throw FormatError("trace: bad optimality_gap", line_no, 5);
    }
    records.push_back(r);
  }
  if (!header_seen) throw FormatError("trace: empty input");
  ConvergenceTrace trace(records.empty() ? 0.0 : records.front().cost - records.front().optimality_gap);
  for (const auto& r : records) trace.append_record(r);
  return trace;
}

void emit_trace(const ConvergenceTrace& trace, const fs::path& path) {
  if (trace.empty()) throw DomainError("emit_trace: trace is empty");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << format_trace(trace);
  if (!out) throw FormatError("write to " + path.string() + " failed");
}

ConvergenceTrace load_trace(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

// ---------------------------------------------------------------- mosaic

Mosaic basis_mosaic(const Matrix& w, std::size_t tile_w, std::size_t tile_h) {
  if (tile_w == 0 || tile_h == 0 || w.rows() != tile_w * tile_h) {
    throw DimensionError("basis_mosaic: W has F = " + std::to_string(w.rows()) +
                         " rows, tiles are " + std::to_string(tile_w) + "x" +
                         std::to_string(tile_h));
  }
  const std::size_t k = w.cols();
  if (k == 0) throw DimensionError("basis_mosaic: W has no columns");
  Mosaic m;
  m.grid_cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(k))));
  while (m.grid_cols * m.grid_cols < k) ++m.grid_cols;
  m.grid_rows = (k + m.grid_cols - 1) / m.grid_cols;
  m.width = m.grid_cols * tile_w;
  m.height = m.grid_rows * tile_h;
  m.pixels.assign(m.width * m.height, 0);
  for (std::size_t c = 0; c < k; ++c) {
    const std::vector<double> tile = w.column(c);
    const auto [lo, hi] = std::minmax_element(tile.begin(), tile.end());
    const double span = *hi - *lo;
    const std::size_t x0 = (c % m.grid_cols) * tile_w;
    const std::size_t y0 = (c / m.grid_cols) * tile_h;
    if (!(span > 0.0)) continue;  // constant tile stays 0
    for (std::size_t y = 0; y < tile_h; ++y) {
      for (std::size_t x = 0; x < tile_w; ++x) {
        const double t = (tile[y * tile_w + x] - *lo) / span;
        m.pixels[(y0 + y) * m.width + x0 + x] =
            static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
      }
    }
  }
  return m;
}

void emit_basis_mosaic(const Matrix& w, std::size_t tile_w, std::size_t tile_h,
                       const fs::path& path) {
  const Mosaic m = basis_mosaic(w, tile_w, tile_h);
  io::write_pgm(path, m.width, m.height, m.pixels);
}

// ---------------------------------------------------------------- comparison

std::optional<double> gap_at_grad_count(const ConvergenceTrace& trace, std::int64_t budget) {
  std::optional<double> gap;
  for (const auto& r : trace.records()) {
    if (r.grad_count > budget) break;
    gap = r.optimality_gap;
  }
  return gap;
}

std::optional<GapComparison> compare_at_equal_gradients(const ConvergenceTrace& a,
                                                        const ConvergenceTrace& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  const std::int64_t budget = std::min(a.back().grad_count, b.back().grad_count);
  const auto ga = gap_at_grad_count(a, budget);
  const auto gb = gap_at_grad_count(b, budget);
  if (!ga || !gb) return std::nullopt;
  return GapComparison{budget, *ga, *gb};
}

}  // namespace vrnmf
