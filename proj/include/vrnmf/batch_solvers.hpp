#pragma once

#include <cstdint>

#include "vrnmf/factor_model.hpp"
#include "vrnmf/trace.hpp"

namespace vrnmf {

struct BatchConfig {
  int max_iters = 100;
  // Stop once |f_prev - f| / f_prev < rel_tol. Zero disables early stopping.
  double rel_tol = 0.0;
  std::uint64_t seed = 0;

  BatchConfig() = default;
  // Throws DomainError for max_iters < 1 or rel_tol < 0.
  BatchConfig(int max_iters, double rel_tol, std::uint64_t seed);
  void validate() const;
};

// Strictly positive initial factors: entries uniform on (0, 1] scaled by
// 1/sqrt(K), W drawn before H from a 64-bit Mersenne twister seeded with `seed`.
FactorPair init_factors(std::size_t f, std::size_t n, std::size_t k, std::uint64_t seed);

// One Lee-Seung sweep, H first and then W using the new H:
//   H <- H .* (W^T V) ./ (W^T W H),   W <- W .* (V H^T) ./ (W H H^T).
FactorPair mu_batch_step(const Matrix& v, const FactorPair& factors);
void mu_batch_step_in_place(const Matrix& v, FactorPair& factors);

struct BatchResult {
  FactorPair factors;
  ConvergenceTrace trace;
};

// Iterates mu_batch_step from init_factors(config.seed); one trace record per
// iteration, each worth N gradients.
BatchResult mu_batch_solve(const Matrix& v, std::size_t rank, const BatchConfig& config,
                           const SolveOptions& options = {});

// Continue from a given starting point instead of init_factors.
BatchResult mu_batch_solve_from(const Matrix& v, FactorPair start, const BatchConfig& config,
                                const SolveOptions& options = {});

struct HalsResult {
  FactorPair factors;
  double f_star = 0.0;  // lowest cost seen
  int iterations = 0;
  ConvergenceTrace trace;
};

// Hierarchical alternating least squares: exact coordinate minimisation of
// each row of H and column of W in turn, clipped below at kHalsFloor.
inline constexpr double kHalsFloor = 1e-16;
HalsResult hals_solve(const Matrix& v, std::size_t rank, const BatchConfig& config,
                      const SolveOptions& options = {});

}  // namespace vrnmf
