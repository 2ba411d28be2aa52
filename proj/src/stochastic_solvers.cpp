#include "vrnmf/stochastic_solvers.hpp"

#include <algorithm>
#include <string>

#include "vrnmf/linalg.hpp"

namespace vrnmf {

void StochasticConfig::validate(std::size_t n) const {
  if (epochs < 1) throw DomainError("StochasticConfig: epochs must be >= 1");
  if (inner_iters && *inner_iters < 1) {
    throw DomainError("StochasticConfig: inner iterations m_s must be > 0");
  }
  if (!(alpha0 > 0.0 && alpha0 <= 1.0)) {
    throw DomainError("StochasticConfig: alpha0 must lie in (0, 1]");
  }
  if (!(decay >= 0.0)) throw DomainError("StochasticConfig: decay must be >= 0");
  if (batch_size < 1) throw DomainError("StochasticConfig: batch_size must be >= 1");
  if (n > 0 && batch_size > n) {
    throw DomainError("StochasticConfig: batch_size " + std::to_string(batch_size) +
                      " exceeds the number of samples N = " + std::to_string(n));
  }
}

int StochasticConfig::inner_iters_for(std::size_t n) const {
  if (inner_iters) return *inner_iters;
  return static_cast<int>(std::max<std::size_t>(1, n / batch_size));
}

std::size_t ColumnSampler::draw(std::size_t n) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  return pick(rng_);
}

std::vector<std::size_t> ColumnSampler::draw_batch(std::size_t n, std::size_t b) {
  if (b == 0 || b > n) throw DomainError("ColumnSampler: batch size must lie in [1, N]");
  std::vector<std::size_t> out;
  out.reserve(b);
  std::vector<char> taken(n, 0);
  while (out.size() < b) {
    const std::size_t k = draw(n);
    if (taken[k]) continue;
    taken[k] = 1;
    out.push_back(k);
  }
  return out;
}

double stepsize_ratio(const StochasticConfig& config, std::int64_t j) {
  if (j < 0) throw DomainError("stepsize_ratio: inner index must be >= 0");
  return config.alpha0 / (1.0 + config.decay * static_cast<double>(j));
}

namespace {

void require_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError(std::string(what) + ": stepsize ratio alpha = " + std::to_string(alpha) +
                      " outside (0, 1]");
  }
}

void require_len(std::size_t got, std::size_t want, const char* what, const char* axis) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": " + axis + " has length " + std::to_string(got) +
                         ", expected " + std::to_string(want));
  }
}

void require_inner_shapes(const Matrix& w_t, const Snapshot& snap, const Matrix& v,
                          const Matrix& h, const char* what) {
  require_same_shape(w_t, snap.W_tilde, what);
  require_same_shape(h, snap.H_tilde, what);
  if (v.rows() != w_t.rows() || v.cols() != h.cols() || w_t.cols() != h.rows()) {
    throw DimensionError(std::string(what) + ": V " + shape_string(v) + " incompatible with W " +
                         shape_string(w_t) + " and H " + shape_string(h));
  }
}

void require_samples(std::span<const std::size_t> samples, std::size_t n, const char* what) {
  if (samples.empty()) throw DomainError(std::string(what) + ": empty sample set");
  std::vector<char> seen(n, 0);
  for (std::size_t k : samples) {
    if (k >= n) {
      throw DimensionError(std::string(what) + ": sample index " + std::to_string(k) +
                           " out of range for N = " + std::to_string(n));
    }
    if (seen[k]) throw DomainError(std::string(what) + ": duplicate sample index " +
                                   std::to_string(k));
    seen[k] = 1;
  }
}

void check_finite(const Matrix& m, const char* what, int epoch) {
  if (!m.all_finite()) {
    throw NumericError(std::string(what) + " became non-finite in epoch " + std::to_string(epoch),
                       epoch);
  }
}

// Per-sample h updates against a shared W (steps 7 of one inner iteration).
void update_h_columns(const Matrix& w, const Matrix& v, Matrix& h,
                      std::span<const std::size_t> samples, const std::optional<AccelConfig>& accel,
                      int budget) {
  const Matrix wtw = linalg::multiply_tn(w, w);
  for (std::size_t k : samples) {
    const std::vector<double> vk = v.column(k);
    const std::vector<double> hk = h.column(k);
    const std::vector<double> wtv = linalg::matvec_t(w, vk);
    if (accel) {
      h.set_column(k, repeat_h_update(hk, wtv, wtw, budget, accel->epsilon).h);
    } else {
      h.set_column(k, h_step(hk, wtv, wtw));
    }
  }
}

}  // namespace

std::vector<double> smu_update_h(const Matrix& w, std::span<const double> v,
                                 std::span<const double> h) {
  require_len(v.size(), w.rows(), "smu_update_h", "v");
  require_len(h.size(), w.cols(), "smu_update_h", "h");
  return h_step(h, linalg::matvec_t(w, v), linalg::multiply_tn(w, w));
}

Matrix smu_update_w(const Matrix& w, std::span<const double> v, std::span<const double> h,
                    double alpha) {
  require_alpha(alpha, "smu_update_w");
  require_len(v.size(), w.rows(), "smu_update_w", "v");
  require_len(h.size(), w.cols(), "smu_update_w", "h");
  const auto& k = simd::active_kernels();
  Matrix q(w.rows(), w.cols());
  Matrix p(w.rows(), w.cols());
  linalg::add_outer(q, 1.0, linalg::matvec(w, h, k), h, k);
  linalg::add_outer(p, 1.0, v, h, k);
  Matrix out = w;
  if (alpha == 1.0) {
    k.mul_div(out.data(), w.data(), p.data(), q.data(), w.size(), kDivGuard);
  } else {
    k.vr_scale(out.data(), q.data(), p.data(), alpha, w.size(), kDivGuard);
  }
  return out;
}

Matrix smu_minibatch_update_w(const Matrix& w, const Matrix& v, const Matrix& h,
                              std::span<const std::size_t> samples, double alpha) {
  require_alpha(alpha, "smu_minibatch_update_w");
  require_samples(samples, v.cols(), "smu_minibatch_update_w");
  const auto& k = simd::active_kernels();
  Matrix q(w.rows(), w.cols());
  Matrix p(w.rows(), w.cols());
  for (std::size_t s : samples) {
    const std::vector<double> hs = h.column(s);
    linalg::add_outer(q, 1.0, linalg::matvec(w, hs, k), hs, k);
    linalg::add_outer(p, 1.0, v.column(s), hs, k);
  }
  const double b = static_cast<double>(samples.size());
  for (double& x : q.values()) x /= b;
  for (double& x : p.values()) x /= b;
  Matrix out = w;
  if (alpha == 1.0) {
    k.mul_div(out.data(), w.data(), p.data(), q.data(), w.size(), kDivGuard);
  } else {
    k.vr_scale(out.data(), q.data(), p.data(), alpha, w.size(), kDivGuard);
  }
  return out;
}

InnerGradientParts compute_qp(const Matrix& w_t, const Snapshot& snap,
                              std::span<const double> v_k, std::span<const double> h_k,
                              std::span<const double> h_tilde_k) {
  require_same_shape(w_t, snap.W_tilde, "compute_qp (W_t vs W~)");
  require_len(v_k.size(), w_t.rows(), "compute_qp", "v_k");
  require_len(h_k.size(), w_t.cols(), "compute_qp", "h_k");
  require_len(h_tilde_k.size(), w_t.cols(), "compute_qp", "h~_k");
  const auto& k = simd::active_kernels();
  InnerGradientParts qp{Matrix(w_t.rows(), w_t.cols()), Matrix(w_t.rows(), w_t.cols())};
  linalg::add_outer(qp.Q, 1.0, linalg::matvec(w_t, h_k, k), h_k, k);
  linalg::add_outer(qp.Q, 1.0, v_k, h_tilde_k, k);
  k.axpy(qp.Q.data(), 1.0, snap.grad_part_a.data(), qp.Q.size());

  linalg::add_outer(qp.P, 1.0, v_k, h_k, k);
  linalg::add_outer(qp.P, 1.0, linalg::matvec(snap.W_tilde, h_tilde_k, k), h_tilde_k, k);
  k.axpy(qp.P.data(), 1.0, snap.grad_part_b.data(), qp.P.size());
  return qp;
}

InnerGradientParts compute_qp_minibatch(const Matrix& w_t, const Snapshot& snap, const Matrix& v,
                                        const Matrix& h, std::span<const std::size_t> samples) {
  require_inner_shapes(w_t, snap, v, h, "compute_qp_minibatch");
  require_samples(samples, v.cols(), "compute_qp_minibatch");
  const auto& k = simd::active_kernels();
  InnerGradientParts qp{Matrix(w_t.rows(), w_t.cols()), Matrix(w_t.rows(), w_t.cols())};
  for (std::size_t s : samples) {
    const std::vector<double> vs = v.column(s);
    const std::vector<double> hs = h.column(s);
    const std::vector<double> hts = snap.H_tilde.column(s);
    linalg::add_outer(qp.Q, 1.0, linalg::matvec(w_t, hs, k), hs, k);
    linalg::add_outer(qp.Q, 1.0, vs, hts, k);
    linalg::add_outer(qp.P, 1.0, vs, hs, k);
    linalg::add_outer(qp.P, 1.0, linalg::matvec(snap.W_tilde, hts, k), hts, k);
  }
  const double b = static_cast<double>(samples.size());
  for (double& x : qp.Q.values()) x /= b;
  for (double& x : qp.P.values()) x /= b;
  k.axpy(qp.Q.data(), 1.0, snap.grad_part_a.data(), qp.Q.size());
  k.axpy(qp.P.data(), 1.0, snap.grad_part_b.data(), qp.P.size());
  return qp;
}

Matrix svrmu_inner_step(const Matrix& w_t, const Snapshot& snap, const Matrix& v, const Matrix& h,
                        std::size_t k, double alpha) {
  require_alpha(alpha, "svrmu_inner_step");
  require_inner_shapes(w_t, snap, v, h, "svrmu_inner_step");
  if (k >= v.cols()) {
    throw DimensionError("svrmu_inner_step: sample index " + std::to_string(k) +
                         " out of range for N = " + std::to_string(v.cols()));
  }
  const InnerGradientParts qp = compute_qp(w_t, snap, v.column(k), h.column(k),
                                           snap.H_tilde.column(k));
  Matrix out = w_t;
  simd::active_kernels().vr_scale(out.data(), qp.Q.data(), qp.P.data(), alpha, out.size(),
                                  kDivGuard);
  return out;
}

Matrix svrmu_minibatch_inner_step(const Matrix& w_t, const Snapshot& snap, const Matrix& v,
                                  const Matrix& h, std::span<const std::size_t> samples,
                                  double alpha) {
  require_alpha(alpha, "svrmu_minibatch_inner_step");
  const InnerGradientParts qp = compute_qp_minibatch(w_t, snap, v, h, samples);
  Matrix out = w_t;
  simd::active_kernels().vr_scale(out.data(), qp.Q.data(), qp.P.data(), alpha, out.size(),
                                  kDivGuard);
  return out;
}

EpochOutcome svrmu_epoch(const Matrix& v, const Snapshot& snap, const StochasticConfig& config,
                         int epoch_index, StochasticState& state,
                         const std::optional<AccelConfig>& accel) {
  config.validate(v.cols());
  if (accel) accel->validate();
  require_inner_shapes(snap.W_tilde, snap, v, snap.H_tilde, "svrmu_epoch");
  const std::size_t n = v.cols();
  const int budget = accel ? compute_budget_L(v.rows(), n, snap.W_tilde.cols(), accel->beta) : 1;

  Matrix w = snap.W_tilde;
  Matrix h = snap.H_tilde;
  state.gradients.account(GradientEvent::full_pass(n));
  const int inner = config.inner_iters_for(n);
  for (int t = 0; t < inner; ++t) {
    const auto samples = state.sampler.draw_batch(n, config.batch_size);
    update_h_columns(w, v, h, samples, accel, budget);
    const double alpha = stepsize_ratio(config, state.inner_index++);
    w = samples.size() == 1 ? svrmu_inner_step(w, snap, v, h, samples.front(), alpha)
                            : svrmu_minibatch_inner_step(w, snap, v, h, samples, alpha);
    state.gradients.account(GradientEvent::sample_step(samples.size()));
  }
  check_finite(w, "W", epoch_index);
  check_finite(h, "H", epoch_index);
  FactorPair next(std::move(w), std::move(h));
  Snapshot next_snap = Snapshot::take(v, next);
  return {std::move(next), std::move(next_snap)};
}

EpochOutcome svrmu_epoch(const Matrix& v, const FactorPair& factors,
                         const StochasticConfig& config, int epoch_index, StochasticState& state,
                         const std::optional<AccelConfig>& accel) {
  return svrmu_epoch(v, Snapshot::take(v, factors), config, epoch_index, state, accel);
}

StochasticResult smu_solve(const Matrix& v, FactorPair start, const StochasticConfig& config,
                           const std::optional<AccelConfig>& accel, const SolveOptions& options) {
  config.validate(v.cols());
  if (accel) accel->validate();
  start.require_compatible(v, "smu_solve");
  const std::size_t n = v.cols();
  const int budget = accel ? compute_budget_L(v.rows(), n, start.rank(), accel->beta) : 1;
  const int inner = config.inner_iters_for(n);

  StochasticResult result{std::move(start), ConvergenceTrace(options.f_star)};
  auto& fp = result.factors;
  StochasticState state(config.seed);
  Stopwatch clock(options.record_wall_time);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int t = 0; t < inner; ++t) {
      const auto samples = state.sampler.draw_batch(n, config.batch_size);
      update_h_columns(fp.W, v, fp.H, samples, accel, budget);
      const double alpha = stepsize_ratio(config, state.inner_index++);
      if (samples.size() == 1) {
        const std::size_t k = samples.front();
        fp.W = smu_update_w(fp.W, v.column(k), fp.H.column(k), alpha);
      } else {
        fp.W = smu_minibatch_update_w(fp.W, v, fp.H, samples, alpha);
      }
      state.gradients.account(GradientEvent::sample_step(samples.size()));
    }
    check_finite(fp.W, "W", epoch);
    check_finite(fp.H, "H", epoch);
    record_epoch(result.trace, options, clock, epoch, state.gradients.count(),
                 [&] { return frobenius_cost(v, fp); }, fp);
  }
  return result;
}

StochasticResult svrmu_solve(const Matrix& v, FactorPair start, const StochasticConfig& config,
                             const std::optional<AccelConfig>& accel,
                             const SolveOptions& options) {
  config.validate(v.cols());
  start.require_compatible(v, "svrmu_solve");
  StochasticResult result{std::move(start), ConvergenceTrace(options.f_star)};
  StochasticState state(config.seed);
  Stopwatch clock(options.record_wall_time);
  Snapshot snap = Snapshot::take(v, result.factors);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochOutcome out = svrmu_epoch(v, snap, config, epoch, state, accel);
    result.factors = std::move(out.factors);
    snap = std::move(out.next_snapshot);
    record_epoch(result.trace, options, clock, epoch, state.gradients.count(),
                 [&] { return frobenius_cost(v, result.factors); }, result.factors);
  }
  return result;
}

}  // namespace vrnmf
