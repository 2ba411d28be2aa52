#include "vrnmf/robust.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vrnmf/linalg.hpp"

namespace vrnmf {
namespace {

void require_lambda(double lambda, const char* what) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError(std::string(what) + ": lambda must be a finite value >= 0");
  }
}

void require_vec(std::size_t got, std::size_t want, const char* what, const char* name) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": " + name + " has length " + std::to_string(got) +
                         ", expected " + std::to_string(want));
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
    if (seen[k]) throw DomainError(std::string(what) + ": duplicate sample index");
    seen[k] = 1;
  }
}

}  // namespace

RobustSnapshot RobustSnapshot::take(const Matrix& v, const FactorPair& factors, const Matrix& r) {
  require_same_shape(v, r, "RobustSnapshot::take (V vs R)");
  RobustSnapshot s{Snapshot::take(v, factors), r, Matrix()};
  Matrix rht = linalg::multiply_nt(r, factors.H);
  const double n = static_cast<double>(v.cols());
  for (double& x : rht.values()) x /= n;
  s.grad_part_a_robust = s.base.grad_part_a;
  simd::active_kernels().axpy(s.grad_part_a_robust.data(), 1.0, rht.data(), rht.size());
  return s;
}

std::vector<double> robust_update_h(const Matrix& w, std::span<const double> v,
                                    std::span<const double> h, std::span<const double> r) {
  require_vec(v.size(), w.rows(), "robust_update_h", "v");
  require_vec(h.size(), w.cols(), "robust_update_h", "h");
  require_vec(r.size(), w.rows(), "robust_update_h", "r");
  return h_step(h, linalg::matvec_t(w, v), linalg::multiply_tn(w, w), linalg::matvec_t(w, r));
}

std::vector<double> robust_update_r(const Matrix& w, std::span<const double> v,
                                    std::span<const double> h, std::span<const double> r,
                                    double lambda) {
  require_lambda(lambda, "robust_update_r");
  require_vec(v.size(), w.rows(), "robust_update_r", "v");
  require_vec(h.size(), w.cols(), "robust_update_r", "h");
  require_vec(r.size(), w.rows(), "robust_update_r", "r");
  const auto& k = simd::active_kernels();
  std::vector<double> den = linalg::matvec(w, h, k);
  for (std::size_t f = 0; f < den.size(); ++f) den[f] = den[f] + r[f] + lambda;
  std::vector<double> out(r.size());
  k.mul_div(out.data(), r.data(), v.data(), den.data(), r.size(), kDivGuard);
  return out;
}

InnerGradientParts compute_qp_robust(const Matrix& w_t, const RobustSnapshot& snap,
                                     const Matrix& v, const Matrix& h, const Matrix& r,
                                     std::span<const std::size_t> samples) {
  require_same_shape(w_t, snap.base.W_tilde, "compute_qp_robust (W_t vs W~)");
  require_same_shape(h, snap.base.H_tilde, "compute_qp_robust (H vs H~)");
  require_same_shape(v, r, "compute_qp_robust (V vs R)");
  require_same_shape(v, snap.R_tilde, "compute_qp_robust (V vs R~)");
  if (v.rows() != w_t.rows() || v.cols() != h.cols()) {
    throw DimensionError("compute_qp_robust: V " + shape_string(v) + " incompatible with W " +
                         shape_string(w_t) + " and H " + shape_string(h));
  }
  require_samples(samples, v.cols(), "compute_qp_robust");
  const auto& k = simd::active_kernels();
  InnerGradientParts qp{Matrix(w_t.rows(), w_t.cols()), Matrix(w_t.rows(), w_t.cols())};
  for (std::size_t s : samples) {
    const std::vector<double> vs = v.column(s);
    const std::vector<double> hs = h.column(s);
    const std::vector<double> hts = snap.base.H_tilde.column(s);
    std::vector<double> fit = linalg::matvec(w_t, hs, k);
    const std::vector<double> rs = r.column(s);
    for (std::size_t f = 0; f < fit.size(); ++f) fit[f] += rs[f];
    std::vector<double> fit_tilde = linalg::matvec(snap.base.W_tilde, hts, k);
    const std::vector<double> rts = snap.R_tilde.column(s);
    for (std::size_t f = 0; f < fit_tilde.size(); ++f) fit_tilde[f] += rts[f];

    linalg::add_outer(qp.Q, 1.0, fit, hs, k);
    linalg::add_outer(qp.Q, 1.0, vs, hts, k);
    linalg::add_outer(qp.P, 1.0, vs, hs, k);
    linalg::add_outer(qp.P, 1.0, fit_tilde, hts, k);
  }
  const double b = static_cast<double>(samples.size());
  for (double& x : qp.Q.values()) x /= b;
  for (double& x : qp.P.values()) x /= b;
  k.axpy(qp.Q.data(), 1.0, snap.grad_part_a_robust.data(), qp.Q.size());
  k.axpy(qp.P.data(), 1.0, snap.base.grad_part_b.data(), qp.P.size());
  return qp;
}

Matrix rsvrmu_minibatch_w_update(const Matrix& w_t, const RobustSnapshot& snap, const Matrix& v,
                                 const Matrix& h, const Matrix& r,
                                 std::span<const std::size_t> samples, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("rsvrmu_w_update: stepsize ratio alpha outside (0, 1]");
  }
  const InnerGradientParts qp = compute_qp_robust(w_t, snap, v, h, r, samples);
  Matrix out = w_t;
  simd::active_kernels().vr_scale(out.data(), qp.Q.data(), qp.P.data(), alpha, out.size(),
                                  kDivGuard);
  return out;
}

Matrix rsvrmu_w_update(const Matrix& w_t, const RobustSnapshot& snap, const Matrix& v,
                       const Matrix& h, const Matrix& r, std::size_t k, double alpha) {
  const std::size_t one[] = {k};
  return rsvrmu_minibatch_w_update(w_t, snap, v, h, r, one, alpha);
}

Matrix init_outliers(std::size_t f, std::size_t n, double scale, std::uint64_t seed) {
  if (!(scale > 0.0)) throw DomainError("init_outliers: scale must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix r(f, n);
  for (double& x : r.values()) x = (1.0 - unit(rng)) * scale;
  return r;
}

RobustResult rsvrmu_solve(const Matrix& v, FactorPair start, Matrix r_start,
                          const StochasticConfig& config, double lambda,
                          const std::optional<AccelConfig>& accel, const SolveOptions& options) {
  config.validate(v.cols());
  if (accel) accel->validate();
  require_lambda(lambda, "rsvrmu_solve");
  if (!(lambda > 0.0)) throw DomainError("rsvrmu_solve: lambda must be > 0");
  start.require_compatible(v, "rsvrmu_solve");
  require_same_shape(v, r_start, "rsvrmu_solve (V vs R)");
  require_nonnegative(r_start, "rsvrmu_solve R");

  const std::size_t n = v.cols();
  const int budget = accel ? compute_budget_L(v.rows(), n, start.rank(), accel->beta) : 1;
  const int inner = config.inner_iters_for(n);
  const auto& kt = simd::active_kernels();

  RobustResult result{std::move(start), OutlierModel{std::move(r_start), lambda},
                      ConvergenceTrace(options.f_star), 0.0};
  StochasticState state(config.seed);
  Stopwatch clock(options.record_wall_time);
  RobustSnapshot snap = RobustSnapshot::take(v, result.factors, result.outliers.R);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Matrix w = snap.base.W_tilde;
    Matrix h = snap.base.H_tilde;
    Matrix r = snap.R_tilde;
    state.gradients.account(GradientEvent::full_pass(n));
    for (int t = 0; t < inner; ++t) {
      const auto samples = state.sampler.draw_batch(n, config.batch_size);
      const Matrix wtw = linalg::multiply_tn(w, w, kt);
      for (std::size_t k : samples) {
        const std::vector<double> vk = v.column(k);
        const std::vector<double> rk = r.column(k);
        const std::vector<double> wtv = linalg::matvec_t(w, vk, kt);
        const std::vector<double> wtr = linalg::matvec_t(w, rk, kt);
        const std::vector<double> hk =
            accel ? repeat_h_update(h.column(k), wtv, wtw, budget, accel->epsilon, wtr).h
                  : h_step(h.column(k), wtv, wtw, wtr);
        h.set_column(k, hk);
        r.set_column(k, robust_update_r(w, vk, hk, rk, lambda));
      }
      const double alpha = stepsize_ratio(config, state.inner_index++);
      w = rsvrmu_minibatch_w_update(w, snap, v, h, r, samples, alpha);
      state.gradients.account(GradientEvent::sample_step(samples.size()));
    }
    if (!w.all_finite() || !h.all_finite() || !r.all_finite()) {
      throw NumericError("rsvrmu: non-finite iterate in epoch " + std::to_string(epoch), epoch);
    }
    result.factors = FactorPair(std::move(w), std::move(h));
    result.outliers.R = std::move(r);
    clock.pause();
    result.final_robust_cost = robust_cost(v, result.factors, result.outliers);
    clock.resume();
    if (!std::isfinite(result.final_robust_cost)) {
      throw NumericError("rsvrmu: non-finite robust cost in epoch " + std::to_string(epoch), epoch);
    }
    snap = RobustSnapshot::take(v, result.factors, result.outliers.R);
    record_epoch(result.trace, options, clock, epoch, state.gradients.count(),
                 [&] { return frobenius_cost(v, result.factors); }, result.factors,
                 &result.outliers.R);
  }
  return result;
}

}  // namespace vrnmf
