#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "vrnmf/acceleration.hpp"
#include "vrnmf/factor_model.hpp"
#include "vrnmf/trace.hpp"

namespace vrnmf {

struct StochasticConfig {
  int epochs = 50;
  // Inner iterations m_s per epoch; unset means max(1, N / batch_size), i.e.
  // one pass over the data in expectation.
  std::optional<int> inner_iters;
  double alpha0 = 1.0;
  double decay = 1e-3;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;

  // Throws DomainError on: epochs < 1, inner_iters < 1, alpha0 outside
  // (0, 1], decay < 0, batch_size < 1, or (when n > 0) batch_size > n.
  void validate(std::size_t n = 0) const;
  int inner_iters_for(std::size_t n) const;
};

// Uniform column sampling. Consecutive draws are independent (with
// replacement); a batch holds distinct indices.
class ColumnSampler {
 public:
  explicit ColumnSampler(std::uint64_t seed) : rng_(seed) {}
  std::size_t draw(std::size_t n);
  // b distinct indices in draw order; draw_batch(n, 1) consumes the generator
  // exactly like draw(n).
  std::vector<std::size_t> draw_batch(std::size_t n, std::size_t b);

 private:
  std::mt19937_64 rng_;
};

// alpha_j = alpha0 / (1 + decay * j) over the global inner-iteration index j.
double stepsize_ratio(const StochasticConfig& config, std::int64_t j);

// h <- h .* (W^T v) ./ (W^T W h)
std::vector<double> smu_update_h(const Matrix& w, std::span<const double> v,
                                 std::span<const double> h);

// W <- W - S .* (W h h^T - v h^T) with S = alpha W ./ (W h h^T).
// alpha == 1 evaluates the multiplicative form W .* (v h^T) ./ (W h h^T).
Matrix smu_update_w(const Matrix& w, std::span<const double> v, std::span<const double> h,
                    double alpha);

// Mini-batch form of smu_update_w: the sample terms are averaged over the
// columns in `samples` of V and H.
Matrix smu_minibatch_update_w(const Matrix& w, const Matrix& v, const Matrix& h,
                              std::span<const std::size_t> samples, double alpha);

// Both parts of the variance-reduced gradient estimate, Q - P.
struct InnerGradientParts {
  Matrix Q;
  Matrix P;
};

// Q = W_t h h^T + v h~^T + W~ H~ H~^T / N
// P = v h^T + W~ h~ h~^T + V H~^T / N
InnerGradientParts compute_qp(const Matrix& w_t, const Snapshot& snapshot,
                              std::span<const double> v_k, std::span<const double> h_k,
                              std::span<const double> h_tilde_k);

// Mini-batch Q and P: per-sample terms summed over `samples` and divided by
// b, snapshot terms kept at 1/N. `h` is the live H (already updated columns).
InnerGradientParts compute_qp_minibatch(const Matrix& w_t, const Snapshot& snapshot,
                                        const Matrix& v, const Matrix& h,
                                        std::span<const std::size_t> samples);

// W <- W - (alpha W ./ Q) .* (Q - P), for Q, P from compute_qp on column k of
// V and of the live H.
Matrix svrmu_inner_step(const Matrix& w_t, const Snapshot& snapshot, const Matrix& v,
                        const Matrix& h, std::size_t k, double alpha);

Matrix svrmu_minibatch_inner_step(const Matrix& w_t, const Snapshot& snapshot, const Matrix& v,
                                  const Matrix& h, std::span<const std::size_t> samples,
                                  double alpha);

// Cross-epoch state of a stochastic run: sampler, global inner index j and
// gradient count.
struct StochasticState {
  explicit StochasticState(std::uint64_t seed) : sampler(seed) {}
  ColumnSampler sampler;
  std::int64_t inner_index = 0;
  GradientCounter gradients;
};

struct EpochOutcome {
  FactorPair factors;
  Snapshot next_snapshot;
};

// One SVRMU outer iteration starting from `snapshot` (W_0 = W~, H = H~):
// m_s inner steps of sample / h update / Q,P / stepsize / W update, then the
// snapshot for the following epoch.
EpochOutcome svrmu_epoch(const Matrix& v, const Snapshot& snapshot,
                         const StochasticConfig& config, int epoch_index,
                         StochasticState& state, const std::optional<AccelConfig>& accel = {});
EpochOutcome svrmu_epoch(const Matrix& v, const FactorPair& factors,
                         const StochasticConfig& config, int epoch_index,
                         StochasticState& state, const std::optional<AccelConfig>& accel = {});

struct StochasticResult {
  FactorPair factors;
  ConvergenceTrace trace;
};

// Stochastic MU (optionally mini-batch and/or repeated-h); one epoch is
// inner_iters_for(N) steps.
StochasticResult smu_solve(const Matrix& v, FactorPair start, const StochasticConfig& config,
                           const std::optional<AccelConfig>& accel = {},
                           const SolveOptions& options = {});

// SVRMU (single-sample or mini-batch by config.batch_size, optionally with
// repeated-h).
StochasticResult svrmu_solve(const Matrix& v, FactorPair start, const StochasticConfig& config,
                             const std::optional<AccelConfig>& accel = {},
                             const SolveOptions& options = {});

}  // namespace vrnmf
