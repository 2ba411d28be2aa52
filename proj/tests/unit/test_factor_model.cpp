#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../support/oracles.hpp"
#include "vrnmf/factor_model.hpp"
#include "vrnmf/linalg.hpp"

using namespace vrnmf;

TEST_CASE("Matrix basics") {
  Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6);
  CHECK(m.column(1) == std::vector<double>{2, 5});
  CHECK(m.transposed()(2, 0) == 3);
  CHECK(m.min_entry() == 1);
  CHECK(m.max_entry() == 6);
  m.set_column(0, std::vector<double>{7, 8});
  CHECK(m(1, 0) == 8);
  CHECK_THROWS_AS(m.set_column(0, std::vector<double>{1}), DimensionError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>(3)), DimensionError);
  CHECK_THROWS_AS(Matrix::from_rows({{1, 2}, {3}}), DimensionError);
}

TEST_CASE("NonnegativeMatrix rejects negative and non-finite entries") {
  CHECK_NOTHROW(NonnegativeMatrix(Matrix::from_rows({{0, 1}})));
  CHECK_THROWS_AS(NonnegativeMatrix(Matrix::from_rows({{0, -1e-300}})), DomainError);
  CHECK_THROWS_AS(NonnegativeMatrix(Matrix::from_rows({{NAN}})), DomainError);
  CHECK_THROWS_AS(NonnegativeMatrix(Matrix::from_rows({{INFINITY}})), DomainError);
}

TEST_CASE("FactorPair validates rank and shapes") {
  CHECK_NOTHROW(FactorPair(Matrix(3, 2, 1.0), Matrix(2, 4, 1.0)));
  CHECK_THROWS_AS(FactorPair(Matrix(3, 2, 1.0), Matrix(3, 4, 1.0)), DimensionError);
  CHECK_THROWS_AS(FactorPair(Matrix(3, 0), Matrix(0, 4)), DimensionError);
  // K may not exceed min(F, N).
  CHECK_THROWS_AS(FactorPair(Matrix(2, 3, 1.0), Matrix(3, 4, 1.0)), DimensionError);
  CHECK_THROWS_AS(FactorPair(Matrix(3, 2, -1.0), Matrix(2, 4, 1.0)), DomainError);
  FactorPair fp(Matrix(3, 2, 1.0), Matrix(2, 4, 1.0));
  try {
    fp.require_compatible(Matrix(5, 4), "test");
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("F") != std::string::npos);
  }
}

TEST_CASE("frobenius_cost") {
  SUBCASE("exact factorization gives zero") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Matrix w = oracle::random_matrix(6, 3, seed);
      const Matrix h = oracle::random_matrix(3, 8, seed + 100);
      CHECK(frobenius_cost(oracle::mul(w, h), FactorPair(w, h)) < 1e-28);
    }
  }
  SUBCASE("hand value") {
    const Matrix v = Matrix::from_rows({{3}, {4}});
    CHECK(frobenius_cost(v, FactorPair(Matrix(2, 1), Matrix(1, 1))) == 12.5);
  }
  SUBCASE("matches double-loop oracle") {
    const Matrix v = oracle::random_matrix(5, 7, 1);
    const Matrix w = oracle::random_matrix(5, 2, 2);
    const Matrix h = oracle::random_matrix(2, 7, 3);
    CHECK(std::abs(frobenius_cost(v, FactorPair(w, h)) - oracle::cost(v, w, h)) < 1e-14);
  }
  SUBCASE("symmetric under a joint permutation of the rank axis") {
    const Matrix v = oracle::random_matrix(5, 7, 4);
    const Matrix w = oracle::random_matrix(5, 3, 5);
    const Matrix h = oracle::random_matrix(3, 7, 6);
    const std::size_t perm[] = {2, 0, 1};
    Matrix wp(5, 3), hp(3, 7);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t f = 0; f < 5; ++f) wp(f, k) = w(f, perm[k]);
      for (std::size_t n = 0; n < 7; ++n) hp(k, n) = h(perm[k], n);
    }
    CHECK(frobenius_cost(v, FactorPair(w, h)) ==
          doctest::Approx(frobenius_cost(v, FactorPair(wp, hp))).epsilon(1e-14));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(frobenius_cost(Matrix(4, 7), FactorPair(Matrix(5, 2), Matrix(2, 7))),
                    DimensionError);
  }
}

TEST_CASE("robust_cost") {
  const Matrix v = oracle::random_matrix(4, 6, 11);
  const Matrix w = oracle::random_matrix(4, 2, 12);
  const Matrix h = oracle::random_matrix(2, 6, 13);
  SUBCASE("R = 0 reduces to frobenius_cost exactly") {
    CHECK(robust_cost(v, FactorPair(w, h), OutlierModel{Matrix(4, 6), 1.0}) ==
          frobenius_cost(v, FactorPair(w, h)));
  }
  SUBCASE("residual fully explained by R") {
    CHECK(robust_cost(v, FactorPair(Matrix(4, 2), h), OutlierModel{v, 0.0}) == 0.0);
  }
  SUBCASE("matches double-loop oracle") {
    const Matrix r = oracle::random_matrix(4, 6, 14, 0.0, 0.3);
    CHECK(std::abs(robust_cost(v, FactorPair(w, h), OutlierModel{r, 0.1}) -
                   oracle::robust_cost(v, w, h, r, 0.1)) < 1e-14);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(robust_cost(v, FactorPair(w, h), OutlierModel{Matrix(4, 5), 0.1}),
                    DimensionError);
  }
}

TEST_CASE("elementwise_mul_div") {
  const Matrix ones(2, 3, 1.0);
  CHECK(elementwise_mul_div(ones, ones, ones) == ones);
  CHECK(elementwise_mul_div(Matrix::from_rows({{2}}), Matrix::from_rows({{3}}),
                            Matrix::from_rows({{4}}))(0, 0) == 1.5);
  // A*B = 0 over a zero denominator stays 0 instead of NaN.
  const Matrix out = elementwise_mul_div(Matrix::from_rows({{0, 1}}), Matrix::from_rows({{5, 1}}),
                                         Matrix::from_rows({{0, 1}}));
  CHECK(out(0, 0) == 0.0);
  CHECK(out.all_finite());
  CHECK_THROWS_AS(elementwise_mul_div(ones, Matrix(3, 2), ones), DimensionError);
}

TEST_CASE("nonnegativity closure over random inputs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = oracle::random_matrix(4, 5, seed, 0.0, 1.0);
    const Matrix b = oracle::random_matrix(4, 5, seed + 50, 0.0, 1.0);
    const Matrix c = oracle::random_matrix(4, 5, seed + 90, 0.0, 1.0);
    CHECK(elementwise_mul_div(a, b, c).min_entry() >= 0.0);
  }
}

TEST_CASE("Snapshot precomputations are recomputable") {
  const Matrix v = oracle::random_matrix(5, 7, 21);
  const FactorPair fp(oracle::random_matrix(5, 2, 22), oracle::random_matrix(2, 7, 23));
  const Snapshot s = Snapshot::take(v, fp);
  const Matrix ht = oracle::transpose(fp.H);
  CHECK(oracle::max_abs_diff(s.grad_part_a, oracle::scale(oracle::mul(oracle::mul(fp.W, fp.H), ht), 1.0 / 7)) < 1e-14);
  CHECK(oracle::max_abs_diff(s.grad_part_b, oracle::scale(oracle::mul(v, ht), 1.0 / 7)) < 1e-14);
  CHECK(Snapshot::take(v, fp).grad_part_a == s.grad_part_a);
  CHECK(s.grad_part_a.min_entry() >= 0.0);
  CHECK(s.grad_part_b.min_entry() >= 0.0);
}

TEST_CASE("linalg products match loop oracles") {
  const Matrix a = oracle::random_matrix(7, 5, 31);
  const Matrix b = oracle::random_matrix(5, 9, 32);
  const Matrix c = oracle::random_matrix(7, 9, 33);
  CHECK(oracle::max_abs_diff(linalg::multiply(a, b), oracle::mul(a, b)) < 1e-13);
  CHECK(oracle::max_abs_diff(linalg::multiply_tn(a, c), oracle::mul(oracle::transpose(a), c)) < 1e-13);
  CHECK(oracle::max_abs_diff(linalg::multiply_nt(c, b), oracle::mul(c, oracle::transpose(b))) < 1e-13);
  const auto x = oracle::random_vec(5, 34);
  const auto y = oracle::random_vec(7, 35);
  CHECK(oracle::max_abs_diff(linalg::matvec(a, x), oracle::matvec(a, x)) < 1e-14);
  CHECK(oracle::max_abs_diff(linalg::matvec_t(a, y), oracle::matvec_t(a, y)) < 1e-14);
  Matrix acc(7, 5);
  linalg::add_outer(acc, 2.0, y, x);
  CHECK(oracle::max_abs_diff(acc, oracle::scale(oracle::outer(y, x), 2.0)) < 1e-15);
  CHECK_THROWS_AS(linalg::multiply(a, c), DimensionError);
  CHECK_THROWS_AS(linalg::matvec(a, y), DimensionError);
}
