#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vrnmf/acceleration.hpp"
#include "vrnmf/factor_model.hpp"
#include "vrnmf/stochastic_solvers.hpp"
#include "vrnmf/trace.hpp"

namespace vrnmf {

// Snapshot for the outlier-aware model V ~ W H + R. grad_part_a_robust holds
// (W~ H~ + R~) H~^T / N, evaluated as grad_part_a + R~ H~^T / N.
struct RobustSnapshot {
  Snapshot base;
  Matrix R_tilde;
  Matrix grad_part_a_robust;

  static RobustSnapshot take(const Matrix& v, const FactorPair& factors, const Matrix& r);
};

// h <- h .* (W^T v) ./ (W^T W h + W^T r)
std::vector<double> robust_update_h(const Matrix& w, std::span<const double> v,
                                    std::span<const double> h, std::span<const double> r);

// r <- r .* v ./ (W h + r + lambda)
std::vector<double> robust_update_r(const Matrix& w, std::span<const double> v,
                                    std::span<const double> h, std::span<const double> r,
                                    double lambda);

// Q = (W_t h + r) h^T + v h~^T + (W~ H~ + R~) H~^T / N
// P = v h^T + (W~ h~ + r~) h~^T + V H~^T / N
// with sample terms averaged over `samples` (columns of V, live H, live R).
InnerGradientParts compute_qp_robust(const Matrix& w_t, const RobustSnapshot& snapshot,
                                     const Matrix& v, const Matrix& h, const Matrix& r,
                                     std::span<const std::size_t> samples);

// W <- W - (alpha W ./ Q) .* (Q - P) with the robust Q, P of sample k.
Matrix rsvrmu_w_update(const Matrix& w_t, const RobustSnapshot& snapshot, const Matrix& v,
                       const Matrix& h, const Matrix& r, std::size_t k, double alpha);
Matrix rsvrmu_minibatch_w_update(const Matrix& w_t, const RobustSnapshot& snapshot,
                                 const Matrix& v, const Matrix& h, const Matrix& r,
                                 std::span<const std::size_t> samples, double alpha);

// Strictly positive starting outliers, uniform on (0, scale], so the
// multiplicative r update is not locked at zero.
Matrix init_outliers(std::size_t f, std::size_t n, double scale, std::uint64_t seed);

struct RobustResult {
  FactorPair factors;
  OutlierModel outliers;
  ConvergenceTrace trace;  // cost column: frobenius_cost of W H against V
  double final_robust_cost = 0.0;
};

// R-SVRMU. Per inner iteration: h_k, then r_k, then W. Throws NumericError if
// the robust cost turns non-finite at an epoch boundary.
RobustResult rsvrmu_solve(const Matrix& v, FactorPair start, Matrix r_start,
                          const StochasticConfig& config, double lambda,
                          const std::optional<AccelConfig>& accel = {},
                          const SolveOptions& options = {});

}  // namespace vrnmf
