#pragma once

#include <span>
#include <vector>

#include "vrnmf/matrix.hpp"
#include "vrnmf/simd/kernels.hpp"

// Dense products built from the dispatched kernels. Every function takes the
// kernel table explicitly (defaulting to the active one) so tests can pin a
// backend.
namespace vrnmf::linalg {

using simd::KernelTable;

// A * B
Matrix multiply(const Matrix& a, const Matrix& b, const KernelTable& k = simd::active_kernels());
// A^T * B
Matrix multiply_tn(const Matrix& a, const Matrix& b,
                   const KernelTable& k = simd::active_kernels());
// A * B^T
Matrix multiply_nt(const Matrix& a, const Matrix& b,
                   const KernelTable& k = simd::active_kernels());

// A * x
std::vector<double> matvec(const Matrix& a, std::span<const double> x,
                           const KernelTable& k = simd::active_kernels());
// A^T * x
std::vector<double> matvec_t(const Matrix& a, std::span<const double> x,
                             const KernelTable& k = simd::active_kernels());

// out += alpha * x * y^T, out is x.size() by y.size().
void add_outer(Matrix& out, double alpha, std::span<const double> x, std::span<const double> y,
               const KernelTable& k = simd::active_kernels());

double dot(std::span<const double> a, std::span<const double> b,
           const KernelTable& k = simd::active_kernels());
double norm2(std::span<const double> a, const KernelTable& k = simd::active_kernels());
double distance2(std::span<const double> a, std::span<const double> b,
                 const KernelTable& k = simd::active_kernels());

}  // namespace vrnmf::linalg
