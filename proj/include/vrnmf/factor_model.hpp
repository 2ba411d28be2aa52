#pragma once

#include <cstddef>

#include "vrnmf/matrix.hpp"

namespace vrnmf {

// Floor applied to every denominator of a multiplicative rule: x / max(d, kDivGuard).
inline constexpr double kDivGuard = 1e-12;

// Current iterate (W, H) of a rank-K factorization V ~ W H, W is F x K and
// H is K x N. The constructor validates shapes and nonnegativity; solvers then
// update W and H in place through multiplicative rules that preserve it.
struct FactorPair {
  Matrix W;
  Matrix H;

  FactorPair() = default;
  FactorPair(Matrix w, Matrix h);

  std::size_t rank() const noexcept { return W.cols(); }
  std::size_t features() const noexcept { return W.rows(); }
  std::size_t samples() const noexcept { return H.cols(); }

  // Throws DimensionError when W, H cannot factor an F x N matrix V.
  void require_compatible(const Matrix& v, const char* what) const;
};

// Epoch anchor (W~, H~) and the two full-gradient components
//   grad_part_a = W~ H~ H~^T / N,   grad_part_b = V H~^T / N.
struct Snapshot {
  Matrix W_tilde;
  Matrix H_tilde;
  Matrix grad_part_a;
  Matrix grad_part_b;

  static Snapshot take(const Matrix& v, const FactorPair& factors);
};

// Outlier matrix R (same shape as V) with l1 weight lambda.
struct OutlierModel {
  Matrix R;
  double lambda = 1.0;
};

// (1/N) sum_n 1/2 ||v_n - W h_n||^2
double frobenius_cost(const Matrix& v, const FactorPair& factors);

// (1/N) sum_n [ 1/2 ||v_n - W h_n - r_n||^2 + lambda ||r_n||_1 ]
double robust_cost(const Matrix& v, const FactorPair& factors, const OutlierModel& outliers);

// a .* b ./ max(c, kDivGuard)
Matrix elementwise_mul_div(const Matrix& a, const Matrix& b, const Matrix& c);

}  // namespace vrnmf
