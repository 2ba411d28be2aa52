// AArch64 only; NEON is part of the baseline ISA there so no runtime probe is
// needed beyond the compile-time guard.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>

#include "vrnmf/simd/kernels.hpp"

namespace vrnmf::simd::neon {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// vmaxq_f64 propagates NaN, which differs from std::max(c, guard) only for
// NaN inputs; the solvers reject non-finite data before it reaches here.
void mul_div(double* out, const double* a, const double* b, const double* c, std::size_t n,
             double guard) {
  const float64x2_t vg = vdupq_n_f64(guard);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t den = vmaxq_f64(vld1q_f64(c + i), vg);
    vst1q_f64(out + i, vdivq_f64(vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), den));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i] / std::max(c[i], guard);
}

void vr_scale(double* w, const double* q, const double* p, double alpha, std::size_t n,
              double guard) {
  const float64x2_t vg = vdupq_n_f64(guard);
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vq = vld1q_f64(q + i);
    const float64x2_t ratio = vdivq_f64(vsubq_f64(vq, vld1q_f64(p + i)), vmaxq_f64(vq, vg));
    vst1q_f64(w + i, vmulq_f64(vld1q_f64(w + i), vfmsq_f64(one, va, ratio)));
  }
  for (; i < n; ++i) {
    const double ratio = (q[i] - p[i]) / std::max(q[i], guard);
    w[i] *= 1.0 - alpha * ratio;
  }
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void clamp_below(double* x, double floor, std::size_t n) {
  const float64x2_t vf = vdupq_n_f64(floor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmaxq_f64(vld1q_f64(x + i), vf));
  for (; i < n; ++i) x[i] = std::max(x[i], floor);
}

}  // namespace

const KernelTable& table() noexcept {
  static const KernelTable t{"neon", dot, axpy, mul_div, vr_scale, sum_sq_diff, clamp_below};
  return t;
}

}  // namespace vrnmf::simd::neon

#endif
