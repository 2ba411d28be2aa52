#include "vrnmf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vrnmf {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix storage holds " + std::to_string(data_.size()) +
                         " entries, expected rows*cols = " + std::to_string(rows_ * cols_));
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged row in matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  if (c >= cols_ || values.size() != rows_) {
    throw DimensionError("set_column: column " + std::to_string(c) + " of length " +
                         std::to_string(values.size()) + " does not fit " + shape_string(*this));
  }
  for (std::size_t r = 0; r < rows_; ++r) data_[r * cols_ + c] = values[r];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = data_[r * cols_ + c];
  return t;
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

double Matrix::min_entry() const {
  if (data_.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(data_.begin(), data_.end());
}

double Matrix::max_entry() const {
  if (data_.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::max_element(data_.begin(), data_.end());
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + shape_string(a) + " vs " +
                         shape_string(b));
  }
}

void require_nonnegative(const Matrix& m, const char* what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double x = m(r, c);
      if (!std::isfinite(x) || x < 0.0) {
        throw DomainError(std::string(what) + ": entry (" + std::to_string(r) + "," +
                          std::to_string(c) + ") = " + std::to_string(x) +
                          " is not a finite nonnegative number");
      }
    }
  }
}

NonnegativeMatrix::NonnegativeMatrix(Matrix m) : m_(std::move(m)) {
  require_nonnegative(m_, "NonnegativeMatrix");
}

}  // namespace vrnmf
