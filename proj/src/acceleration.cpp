#include "vrnmf/acceleration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vrnmf/factor_model.hpp"
#include "vrnmf/linalg.hpp"

namespace vrnmf {

AccelConfig::AccelConfig(double beta_, double epsilon_) : beta(beta_), epsilon(epsilon_) {
  validate();
}

void AccelConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("AccelConfig: beta must lie in [0, 1]");
  if (!(epsilon > 0.0)) throw DomainError("AccelConfig: epsilon must be > 0");
}

int compute_budget_L(std::size_t f, std::size_t n, std::size_t k, double beta) {
  if (f == 0 || n == 0 || k == 0) throw DomainError("compute_budget_L: F, N, K must be positive");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("compute_budget_L: beta must lie in [0, 1]");
  const double w_cost = 3.0 * static_cast<double>(f * k) + 2.0 * static_cast<double>(f * n);
  const double h_cost = 3.0 * static_cast<double>(f * k) + 2.0 * static_cast<double>(k);
  const double budget = std::floor(beta * w_cost / h_cost);
  return std::max(static_cast<int>(budget), 1);
}

std::vector<double> h_step(std::span<const double> h, std::span<const double> wtv,
                           const Matrix& wtw, std::span<const double> offset) {
  if (wtw.rows() != h.size() || wtw.cols() != h.size() || wtv.size() != h.size() ||
      (!offset.empty() && offset.size() != h.size())) {
    throw DimensionError("h_step: expected K = " + std::to_string(h.size()) +
                         " for W^T v, W^T W and offset, got " + std::to_string(wtv.size()) +
                         ", " + shape_string(wtw) + ", " + std::to_string(offset.size()));
  }
  const auto& k = simd::active_kernels();
  std::vector<double> den = linalg::matvec(wtw, h, k);
  if (!offset.empty()) k.axpy(den.data(), 1.0, offset.data(), den.size());
  std::vector<double> out(h.size());
  k.mul_div(out.data(), h.data(), wtv.data(), den.data(), h.size(), kDivGuard);
  return out;
}

RepeatedH repeat_h_update(std::span<const double> h, std::span<const double> wtv,
                          const Matrix& wtw, int max_updates, double epsilon,
                          std::span<const double> offset) {
  if (max_updates < 1) throw DomainError("repeat_h_update: L must be >= 1");
  RepeatedH out{std::vector<double>(h.begin(), h.end()), 0};
  const std::vector<double> h0 = out.h;
  for (int l = 1; l <= max_updates; ++l) {
    std::vector<double> next = h_step(out.h, wtv, wtw, offset);
    out.updates = l;
    const bool repeated = next == out.h;
    const double step = linalg::distance2(next, out.h);
    const double travel = linalg::distance2(next, h0);
    out.h = std::move(next);
    if (repeated || step < epsilon * travel) break;
  }
  return out;
}

}  // namespace vrnmf
