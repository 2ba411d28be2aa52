#include "vrnmf/trace.hpp"

#include <cmath>
#include <string>

namespace vrnmf {

double optimality_gap(double cost, double f_star) { return cost - f_star; }

void ConvergenceTrace::append(int epoch, std::int64_t grad_count, double wall_ms, double cost) {
  append_record({epoch, grad_count, wall_ms, cost, optimality_gap(cost, f_star_)});
}

void ConvergenceTrace::append_record(const TraceRecord& rec) {
  if (!std::isfinite(rec.cost) || rec.cost < 0.0) {
    throw NumericError("trace: cost " + std::to_string(rec.cost) + " at epoch " +
                           std::to_string(rec.epoch) + " is not a finite nonnegative number",
                       rec.epoch);
  }
  if (!records_.empty()) {
    const auto& last = records_.back();
    if (rec.grad_count <= last.grad_count) {
      throw DomainError("trace: grad_count must strictly increase (" +
                        std::to_string(last.grad_count) + " then " +
                        std::to_string(rec.grad_count) + ")");
    }
    if (rec.wall_ms < last.wall_ms) throw DomainError("trace: wall_ms decreased");
  }
  if (rec.wall_ms < 0.0) throw DomainError("trace: negative wall_ms");
  if (rec.optimality_gap < -kGapSlack) {
    throw DomainError("trace: optimality gap " + std::to_string(rec.optimality_gap) +
                      " at epoch " + std::to_string(rec.epoch) +
                      " is below the reference optimum");
  }
  records_.push_back(rec);
}

std::int64_t GradientCounter::account(const GradientEvent& event) {
  count_ += event.amount;
  return count_;
}

double Stopwatch::elapsed_ms() const {
  if (!enabled_) return 0.0;
  const auto now = paused_ ? paused_at_ : Clock::now();
  return std::chrono::duration<double, std::milli>(now - start_ - excluded_).count();
}

void Stopwatch::pause() {
  if (paused_) return;
  paused_ = true;
  paused_at_ = Clock::now();
}

void Stopwatch::resume() {
  if (!paused_) return;
  paused_ = false;
  excluded_ += Clock::now() - paused_at_;
}

void record_epoch(ConvergenceTrace& trace, const SolveOptions& options, Stopwatch& clock,
                  int epoch, std::int64_t grad_count, const std::function<double()>& cost,
                  const FactorPair& factors, const Matrix* outliers) {
  clock.pause();
  const double wall = clock.elapsed_ms();
  const double value = cost();
  if (!std::isfinite(value)) {
    throw NumericError("non-finite cost at epoch " + std::to_string(epoch), epoch);
  }
  trace.append(epoch, grad_count, wall, value);
  if (options.on_epoch) options.on_epoch(EpochView{epoch, factors, outliers});
  clock.resume();
}

}  // namespace vrnmf
