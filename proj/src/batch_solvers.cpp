#include "vrnmf/batch_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "vrnmf/linalg.hpp"

namespace vrnmf {

BatchConfig::BatchConfig(int max_iters_, double rel_tol_, std::uint64_t seed_)
    : max_iters(max_iters_), rel_tol(rel_tol_), seed(seed_) {
  validate();
}

void BatchConfig::validate() const {
  if (max_iters < 1) throw DomainError("BatchConfig: max_iters must be >= 1");
  if (!(rel_tol >= 0.0)) throw DomainError("BatchConfig: rel_tol must be >= 0");
}

FactorPair init_factors(std::size_t f, std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > std::min(f, n)) {
    throw DimensionError("init_factors: rank K = " + std::to_string(k) +
                         " must lie in [1, min(F, N)] = [1, " + std::to_string(std::min(f, n)) +
                         "]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix w(f, k);
  Matrix h(k, n);
  for (double& x : w.values()) x = (1.0 - unit(rng)) * scale;
  for (double& x : h.values()) x = (1.0 - unit(rng)) * scale;
  return FactorPair(std::move(w), std::move(h));
}

void mu_batch_step_in_place(const Matrix& v, FactorPair& fp) {
  fp.require_compatible(v, "mu_batch_step");
  const auto& k = simd::active_kernels();

  const Matrix wtv = linalg::multiply_tn(fp.W, v, k);
  const Matrix wtwh = linalg::multiply(linalg::multiply_tn(fp.W, fp.W, k), fp.H, k);
  k.mul_div(fp.H.data(), fp.H.data(), wtv.data(), wtwh.data(), fp.H.size(), kDivGuard);

  const Matrix vht = linalg::multiply_nt(v, fp.H, k);
  const Matrix whht = linalg::multiply(fp.W, linalg::multiply_nt(fp.H, fp.H, k), k);
  k.mul_div(fp.W.data(), fp.W.data(), vht.data(), whht.data(), fp.W.size(), kDivGuard);
}

FactorPair mu_batch_step(const Matrix& v, const FactorPair& factors) {
  FactorPair next = factors;
  mu_batch_step_in_place(v, next);
  return next;
}

namespace {

bool converged(double prev, double cur, double rel_tol) {
  if (rel_tol <= 0.0) return false;
  if (prev == 0.0) return true;
  return std::abs(prev - cur) / prev < rel_tol;
}

}  // namespace

BatchResult mu_batch_solve_from(const Matrix& v, FactorPair start, const BatchConfig& config,
                                const SolveOptions& options) {
  config.validate();
  start.require_compatible(v, "mu_batch_solve");
  BatchResult result{std::move(start), ConvergenceTrace(options.f_star)};
  auto& fp = result.factors;
  GradientCounter grads;
  Stopwatch clock(options.record_wall_time);
  double prev = frobenius_cost(v, fp);
  for (int it = 1; it <= config.max_iters; ++it) {
    mu_batch_step_in_place(v, fp);
    const auto count = grads.account(GradientEvent::batch_iteration(v.cols()));
    double cur = 0.0;
    record_epoch(result.trace, options, clock, it, count,
                 [&] { return cur = frobenius_cost(v, fp); }, fp);
    if (converged(prev, cur, config.rel_tol)) break;
    prev = cur;
  }
  return result;
}

BatchResult mu_batch_solve(const Matrix& v, std::size_t rank, const BatchConfig& config,
                           const SolveOptions& options) {
  config.validate();
  return mu_batch_solve_from(v, init_factors(v.rows(), v.cols(), rank, config.seed), config,
                             options);
}

namespace {

// In-place HALS sweep over the rows of `x` (K x M):
//   x_k <- max(floor, x_k + (a_k - sum_j g(k, j) x_j) / g(k, k)),
// where `a` is K x M and `g` is the symmetric K x K Gram matrix.
void hals_rows(Matrix& x, const Matrix& a, const Matrix& g, const simd::KernelTable& k) {
  const std::size_t m = x.cols();
  std::vector<double> residual(m);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto target = a.row(r);
    std::copy(target.begin(), target.end(), residual.begin());
    for (std::size_t j = 0; j < x.rows(); ++j) {
      const double gj = g(r, j);
      if (gj != 0.0) k.axpy(residual.data(), -gj, x.row(j).data(), m);
    }
    const double diag = std::max(g(r, r), kDivGuard);
    k.axpy(x.row(r).data(), 1.0 / diag, residual.data(), m);
    k.clamp_below(x.row(r).data(), kHalsFloor, m);
  }
}

}  // namespace

HalsResult hals_solve(const Matrix& v, std::size_t rank, const BatchConfig& config,
                      const SolveOptions& options) {
  config.validate();
  HalsResult result{init_factors(v.rows(), v.cols(), rank, config.seed), 0.0, 0,
                    ConvergenceTrace(options.f_star)};
  auto& fp = result.factors;
  fp.require_compatible(v, "hals_solve");
  const auto& k = simd::active_kernels();
  GradientCounter grads;
  Stopwatch clock(options.record_wall_time);

  double prev = frobenius_cost(v, fp);
  result.f_star = prev;
  Matrix wt = fp.W.transposed();
  for (int it = 1; it <= config.max_iters; ++it) {
    // H rows against W^T V and W^T W.
    hals_rows(fp.H, linalg::multiply_tn(fp.W, v, k), linalg::multiply_tn(fp.W, fp.W, k), k);
    // Columns of W, handled as rows of W^T against H V^T and H H^T.
    hals_rows(wt, linalg::multiply_nt(fp.H, v, k), linalg::multiply_nt(fp.H, fp.H, k), k);
    fp.W = wt.transposed();

    const auto count = grads.account(GradientEvent::batch_iteration(v.cols()));
    double cur = 0.0;
    record_epoch(result.trace, options, clock, it, count,
                 [&] { return cur = frobenius_cost(v, fp); }, fp);
    result.iterations = it;
    result.f_star = std::min(result.f_star, cur);
    if (converged(prev, cur, config.rel_tol)) break;
    prev = cur;
  }
  return result;
}

}  // namespace vrnmf
