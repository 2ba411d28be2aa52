#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <vector>

#include "vrnmf/factor_model.hpp"

namespace vrnmf {

struct TraceRecord {
  int epoch = 0;
  std::int64_t grad_count = 0;
  double wall_ms = 0.0;
  double cost = 0.0;
  double optimality_gap = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Negative gap tolerated when a run edges below the reference optimum.
inline constexpr double kGapSlack = 1e-9;

// Per-epoch convergence history. append() enforces: grad_count strictly
// increasing, wall_ms non-decreasing, cost finite and >= 0, and
// optimality_gap >= -kGapSlack.
class ConvergenceTrace {
 public:
  explicit ConvergenceTrace(double f_star = 0.0) : f_star_(f_star) {}

  // Gap is derived as cost - f_star.
  void append(int epoch, std::int64_t grad_count, double wall_ms, double cost);
  // For records read back from disk; gap is taken verbatim.
  void append_record(const TraceRecord& record);

  const std::vector<TraceRecord>& records() const noexcept { return records_; }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t size() const noexcept { return records_.size(); }
  const TraceRecord& back() const { return records_.back(); }
  double f_star() const noexcept { return f_star_; }

 private:
  double f_star_;
  std::vector<TraceRecord> records_;
};

double optimality_gap(double cost, double f_star);

// Gradient-count accounting: a stochastic inner step over b samples costs b,
// a full-gradient snapshot or one batch iteration costs N.
struct GradientEvent {
  enum class Kind { kSampleStep, kFullPass, kBatchIteration };
  Kind kind;
  std::int64_t amount;

  static GradientEvent sample_step(std::size_t batch) {
    return {Kind::kSampleStep, static_cast<std::int64_t>(batch)};
  }
  static GradientEvent full_pass(std::size_t n) {
    return {Kind::kFullPass, static_cast<std::int64_t>(n)};
  }
  static GradientEvent batch_iteration(std::size_t n) {
    return {Kind::kBatchIteration, static_cast<std::int64_t>(n)};
  }
};

class GradientCounter {
 public:
  std::int64_t account(const GradientEvent& event);
  std::int64_t count() const noexcept { return count_; }

 private:
  std::int64_t count_ = 0;
};

// Observation hook invoked after each recorded epoch. `outliers` is non-null
// only for the robust solver.
struct EpochView {
  int epoch;
  const FactorPair& factors;
  const Matrix* outliers;
};

struct SolveOptions {
  double f_star = 0.0;
  bool record_wall_time = true;
  std::function<void(const EpochView&)> on_epoch;
};

// Solver wall-clock in milliseconds, excluding paused intervals (cost
// evaluation, observers). Reports 0 when disabled so traces can be made
// bit-reproducible.
class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(Clock::now()) {}
  double elapsed_ms() const;
  void pause();
  void resume();

 private:
  using Clock = std::chrono::steady_clock;
  bool enabled_;
  bool paused_ = false;
  Clock::time_point start_;
  Clock::time_point paused_at_{};
  Clock::duration excluded_{};
};

// Records one epoch with the clock paused: evaluates `cost`, throws
// NumericError if it is not finite, appends to the trace and notifies the
// observer.
void record_epoch(ConvergenceTrace& trace, const SolveOptions& options, Stopwatch& clock,
                  int epoch, std::int64_t grad_count, const std::function<double()>& cost,
                  const FactorPair& factors, const Matrix* outliers = nullptr);

}  // namespace vrnmf
