#pragma once

// Inner-loop kernels shared by every solver. Each backend (scalar reference,
// AVX2+FMA, NEON) fills one KernelTable; the active table is chosen once at
// first use from CPU capabilities, overridable through VRNMF_SIMD
// (scalar | avx2 | neon | auto).
//
// Output pointers may alias an input of the same length. All lengths are in
// elements.

#include <cstddef>
#include <string_view>

namespace vrnmf::simd {

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
  // out[i] = a[i] * b[i] / max(c[i], guard)
  void (*mul_div)(double* out, const double* a, const double* b, const double* c, std::size_t n,
                  double guard);
  // w[i] *= 1 - alpha * (q[i] - p[i]) / max(q[i], guard)
  // Stays >= 0 for w, p, q >= 0 and alpha in (0,1] since q - p <= q.
  void (*vr_scale)(double* w, const double* q, const double* p, double alpha, std::size_t n,
                   double guard);
  // sum_i (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // x[i] = max(x[i], floor)
  void (*clamp_below)(double* x, double floor, std::size_t n);
};

enum class Backend { kScalar, kAvx2, kNeon };

const KernelTable& scalar_kernels() noexcept;
// nullptr when the backend was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

// Table used by the library. Resolved once; thread-safe.
const KernelTable& active_kernels() noexcept;

}  // namespace vrnmf::simd
