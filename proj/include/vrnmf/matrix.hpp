#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vrnmf/errors.hpp"

namespace vrnmf {

// Dense row-major matrix of doubles. Entries may be any real value; use
// NonnegativeMatrix where the nonnegativity invariant must hold.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  // Nested initializer, one inner list per row.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  // Strided column copy / write-back.
  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  Matrix transposed() const;
  void fill(double value);

  double min_entry() const;
  double max_entry() const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Renders "FxN" for error messages.
std::string shape_string(const Matrix& m);

// Throws DimensionError naming `what` unless a and b share a shape.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

// Matrix whose entries are all finite and >= 0. Construction validates; the
// wrapped matrix is only reachable as const.
class NonnegativeMatrix {
 public:
  NonnegativeMatrix() = default;
  explicit NonnegativeMatrix(Matrix m);
  NonnegativeMatrix(std::size_t rows, std::size_t cols) : m_(rows, cols) {}

  const Matrix& matrix() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }  // NOLINT(google-explicit-constructor)
  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  double operator()(std::size_t r, std::size_t c) const noexcept { return m_(r, c); }
  Matrix release() && { return std::move(m_); }

  friend bool operator==(const NonnegativeMatrix&, const NonnegativeMatrix&) = default;

 private:
  Matrix m_;
};

// Throws DomainError (with the offending index) if any entry is negative or
// non-finite.
void require_nonnegative(const Matrix& m, const char* what);

}  // namespace vrnmf
