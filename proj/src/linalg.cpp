#include "vrnmf/linalg.hpp"

#include <cmath>
#include <string>

namespace vrnmf::linalg {
namespace {

void require(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    throw DimensionError(std::string(op) + ": incompatible operands " + shape_string(a) + " and " +
                         shape_string(b));
  }
}

}  // namespace

Matrix multiply(const Matrix& a, const Matrix& b, const KernelTable& k) {
  require(a.cols() == b.rows(), "multiply", a, b);
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.row(i).data();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s != 0.0) k.axpy(out, s, b.row(j).data(), b.cols());
    }
  }
  return c;
}

Matrix multiply_tn(const Matrix& a, const Matrix& b, const KernelTable& k) {
  require(a.rows() == b.rows(), "multiply_tn", a, b);
  Matrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* brow = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = a(r, i);
      if (s != 0.0) k.axpy(c.row(i).data(), s, brow, b.cols());
    }
  }
  return c;
}

Matrix multiply_nt(const Matrix& a, const Matrix& b, const KernelTable& k) {
  require(a.cols() == b.cols(), "multiply_nt", a, b);
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j)
      c(i, j) = k.dot(a.row(i).data(), b.row(j).data(), a.cols());
  return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x, const KernelTable& k) {
  if (x.size() != a.cols()) {
    throw DimensionError("matvec: matrix " + shape_string(a) + " times vector of length " +
                         std::to_string(x.size()));
  }
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = k.dot(a.row(i).data(), x.data(), a.cols());
  return y;
}

std::vector<double> matvec_t(const Matrix& a, std::span<const double> x, const KernelTable& k) {
  if (x.size() != a.rows()) {
    throw DimensionError("matvec_t: transposed matrix " + shape_string(a) +
                         " times vector of length " + std::to_string(x.size()));
  }
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r)
    if (x[r] != 0.0) k.axpy(y.data(), x[r], a.row(r).data(), a.cols());
  return y;
}

void add_outer(Matrix& out, double alpha, std::span<const double> x, std::span<const double> y,
               const KernelTable& k) {
  if (out.rows() != x.size() || out.cols() != y.size()) {
    throw DimensionError("add_outer: target " + shape_string(out) + " vs outer product " +
                         std::to_string(x.size()) + "x" + std::to_string(y.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = alpha * x[i];
    if (s != 0.0) k.axpy(out.row(i).data(), s, y.data(), y.size());
  }
}

double dot(std::span<const double> a, std::span<const double> b, const KernelTable& k) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  return k.dot(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> a, const KernelTable& k) {
  return std::sqrt(k.dot(a.data(), a.data(), a.size()));
}

double distance2(std::span<const double> a, std::span<const double> b, const KernelTable& k) {
  if (a.size() != b.size()) throw DimensionError("distance2: length mismatch");
  return std::sqrt(k.sum_sq_diff(a.data(), b.data(), a.size()));
}

}  // namespace vrnmf::linalg
