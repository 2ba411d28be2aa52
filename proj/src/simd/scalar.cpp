#include <algorithm>

#include "vrnmf/simd/kernels.hpp"

namespace vrnmf::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_div(double* out, const double* a, const double* b, const double* c, std::size_t n,
             double guard) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i] / std::max(c[i], guard);
}

void vr_scale(double* w, const double* q, const double* p, double alpha, std::size_t n,
              double guard) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = (q[i] - p[i]) / std::max(q[i], guard);
    w[i] *= 1.0 - alpha * ratio;
  }
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void clamp_below(double* x, double floor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(x[i], floor);
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", dot, axpy, mul_div, vr_scale, sum_sq_diff, clamp_below};
  return table;
}

}  // namespace vrnmf::simd
