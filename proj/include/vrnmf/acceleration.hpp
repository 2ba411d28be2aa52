#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vrnmf/matrix.hpp"

namespace vrnmf {

// Repeated-h settings. beta scales the budget L, epsilon is the dynamic stop
// ratio.
struct AccelConfig {
  double beta = 0.5;
  double epsilon = 1e-3;

  AccelConfig() = default;
  // Throws DomainError unless 0 <= beta <= 1 and epsilon > 0.
  AccelConfig(double beta, double epsilon);
  void validate() const;
};

// L = max(floor(beta * (3FK + 2FN) / (3FK + 2K)), 1): the cost ratio of one
// W update to one h update, scaled by beta.
int compute_budget_L(std::size_t f, std::size_t n, std::size_t k, double beta);

// One multiplicative h step from precomputed products:
//   h .* wtv ./ max(wtw h + offset, guard)
// `offset` may be empty (treated as zero).
std::vector<double> h_step(std::span<const double> h, std::span<const double> wtv,
                           const Matrix& wtw, std::span<const double> offset = {});

struct RepeatedH {
  std::vector<double> h;
  int updates = 0;  // h steps actually applied
};

// Applies h_step up to L times, returning early when an iterate repeats
// exactly or when ||h_l - h_{l-1}|| < epsilon ||h_l - h_0||. W^T v and W^T W
// are computed once by the caller and shared by all L steps.
RepeatedH repeat_h_update(std::span<const double> h, std::span<const double> wtv,
                          const Matrix& wtw, int max_updates, double epsilon,
                          std::span<const double> offset = {});

}  // namespace vrnmf
