// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>

#include "vrnmf/simd/kernels.hpp"

namespace vrnmf::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_div(double* out, const double* a, const double* b, const double* c, std::size_t n,
             double guard) {
  const __m256d vg = _mm256_set1_pd(guard);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // max(c, guard): operand order picks c when c is NaN, matching std::max(c, guard).
    const __m256d den = _mm256_max_pd(vg, _mm256_loadu_pd(c + i));
    const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, den));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i] / std::max(c[i], guard);
}

void vr_scale(double* w, const double* q, const double* p, double alpha, std::size_t n,
              double guard) {
  const __m256d vg = _mm256_set1_pd(guard);
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vq = _mm256_loadu_pd(q + i);
    const __m256d ratio =
        _mm256_div_pd(_mm256_sub_pd(vq, _mm256_loadu_pd(p + i)), _mm256_max_pd(vg, vq));
    const __m256d factor = _mm256_fnmadd_pd(va, ratio, one);
    _mm256_storeu_pd(w + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), factor));
  }
  for (; i < n; ++i) {
    const double ratio = (q[i] - p[i]) / std::max(q[i], guard);
    w[i] *= 1.0 - alpha * ratio;
  }
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void clamp_below(double* x, double floor, std::size_t n) {
  const __m256d vf = _mm256_set1_pd(floor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_max_pd(vf, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] = std::max(x[i], floor);
}

}  // namespace

const KernelTable& table() noexcept {
  static const KernelTable t{"avx2", dot, axpy, mul_div, vr_scale, sum_sq_diff, clamp_below};
  return t;
}

}  // namespace vrnmf::simd::avx2
