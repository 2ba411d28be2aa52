#include "vrnmf/factor_model.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "vrnmf/linalg.hpp"

namespace vrnmf {
namespace {

std::string dim(std::size_t n) { return std::to_string(n); }

// Row f of W*H into `out`.
void reconstruct_row(const FactorPair& fp, std::size_t f, std::vector<double>& out,
                     const simd::KernelTable& k) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < fp.rank(); ++j) {
    const double w = fp.W(f, j);
    if (w != 0.0) k.axpy(out.data(), w, fp.H.row(j).data(), out.size());
  }
}

}  // namespace

FactorPair::FactorPair(Matrix w, Matrix h) : W(std::move(w)), H(std::move(h)) {
  if (W.cols() != H.rows()) {
    throw DimensionError("FactorPair: rank K disagrees, W has " + dim(W.cols()) +
                         " columns but H has " + dim(H.rows()) + " rows");
  }
  if (W.cols() == 0) throw DimensionError("FactorPair: rank K must be positive");
  if (W.cols() > std::min(W.rows(), H.cols())) {
    throw DimensionError("FactorPair: rank K = " + dim(W.cols()) + " exceeds min(F, N) = " +
                         dim(std::min(W.rows(), H.cols())));
  }
  require_nonnegative(W, "FactorPair.W");
  require_nonnegative(H, "FactorPair.H");
}

void FactorPair::require_compatible(const Matrix& v, const char* what) const {
  if (v.rows() != W.rows()) {
    throw DimensionError(std::string(what) + ": rows F disagree, V has " + dim(v.rows()) +
                         " but W has " + dim(W.rows()));
  }
  if (v.cols() != H.cols()) {
    throw DimensionError(std::string(what) + ": columns N disagree, V has " + dim(v.cols()) +
                         " but H has " + dim(H.cols()));
  }
  if (W.cols() != H.rows()) {
    throw DimensionError(std::string(what) + ": rank K disagrees, W has " + dim(W.cols()) +
                         " columns but H has " + dim(H.rows()) + " rows");
  }
}

Snapshot Snapshot::take(const Matrix& v, const FactorPair& factors) {
  factors.require_compatible(v, "Snapshot::take");
  const double n = static_cast<double>(v.cols());
  Snapshot s;
  s.W_tilde = factors.W;
  s.H_tilde = factors.H;
  const Matrix hht = linalg::multiply_nt(factors.H, factors.H);
  s.grad_part_a = linalg::multiply(factors.W, hht);
  s.grad_part_b = linalg::multiply_nt(v, factors.H);
  for (double& x : s.grad_part_a.values()) x /= n;
  for (double& x : s.grad_part_b.values()) x /= n;
  return s;
}

double frobenius_cost(const Matrix& v, const FactorPair& factors) {
  factors.require_compatible(v, "frobenius_cost");
  const auto& k = simd::active_kernels();
  std::vector<double> wh(v.cols());
  double total = 0.0;
  for (std::size_t f = 0; f < v.rows(); ++f) {
    reconstruct_row(factors, f, wh, k);
    total += k.sum_sq_diff(v.row(f).data(), wh.data(), wh.size());
  }
  return 0.5 * total / static_cast<double>(v.cols());
}

double robust_cost(const Matrix& v, const FactorPair& factors, const OutlierModel& outliers) {
  factors.require_compatible(v, "robust_cost");
  require_same_shape(v, outliers.R, "robust_cost (V vs R)");
  const auto& k = simd::active_kernels();
  std::vector<double> fit(v.cols());
  double total = 0.0;
  double l1 = 0.0;
  for (std::size_t f = 0; f < v.rows(); ++f) {
    reconstruct_row(factors, f, fit, k);
    const auto r = outliers.R.row(f);
    for (std::size_t n = 0; n < fit.size(); ++n) {
      fit[n] += r[n];
      l1 += r[n];
    }
    total += k.sum_sq_diff(v.row(f).data(), fit.data(), fit.size());
  }
  const double n = static_cast<double>(v.cols());
  return 0.5 * total / n + outliers.lambda * l1 / n;
}

Matrix elementwise_mul_div(const Matrix& a, const Matrix& b, const Matrix& c) {
  require_same_shape(a, b, "elementwise_mul_div (A vs B)");
  require_same_shape(a, c, "elementwise_mul_div (A vs C)");
  Matrix out(a.rows(), a.cols());
  simd::active_kernels().mul_div(out.data(), a.data(), b.data(), c.data(), a.size(), kDivGuard);
  return out;
}

}  // namespace vrnmf
