#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../support/oracles.hpp"
#include "vrnmf/batch_solvers.hpp"
#include "vrnmf/datagen.hpp"
#include "vrnmf/robust.hpp"

using namespace vrnmf;

TEST_CASE("robust_update_h") {
  const Matrix w = oracle::random_matrix(6, 3, 1);
  const auto v = oracle::random_vec(6, 2);
  const auto h = oracle::random_vec(3, 3);
  SUBCASE("r = 0 reduces to the plain update") {
    CHECK(robust_update_h(w, v, h, std::vector<double>(6, 0.0)) == smu_update_h(w, v, h));
  }
  SUBCASE("matches loop oracle") {
    const auto r = oracle::random_vec(6, 4);
    CHECK(oracle::max_abs_diff(robust_update_h(w, v, h, r), oracle::h_update(w, v, h, &r)) <
          1e-14);
  }
  SUBCASE("v = W h + r is a fixed point") {
    const auto r = oracle::random_vec(6, 5);
    auto v2 = oracle::matvec(w, h);
    for (std::size_t i = 0; i < 6; ++i) v2[i] += r[i];
    CHECK(oracle::max_abs_diff(robust_update_h(w, v2, h, r), h) < 1e-14);
  }
}

TEST_CASE("robust_update_r") {
  const Matrix w1 = Matrix::from_rows({{1}});
  SUBCASE("scalar hand value") {
    // 1 * 3 / (1 + 1 + 1)
    CHECK(robust_update_r(w1, std::vector<double>{3}, std::vector<double>{1},
                          std::vector<double>{1}, 1.0)[0] == 1.0);
    // 2 * 6 / (1 + 2 + 1)
    CHECK(robust_update_r(w1, std::vector<double>{6}, std::vector<double>{1},
                          std::vector<double>{2}, 1.0)[0] == 3.0);
  }
  SUBCASE("v = 0 drives r to 0") {
    const Matrix w = oracle::random_matrix(5, 2, 6);
    const auto r = robust_update_r(w, std::vector<double>(5, 0.0), oracle::random_vec(2, 7),
                                   oracle::random_vec(5, 8), 0.3);
    for (double x : r) CHECK(x == 0.0);
  }
  SUBCASE("r = 0 stays 0") {
    const Matrix w = oracle::random_matrix(5, 2, 9);
    const auto r = robust_update_r(w, oracle::random_vec(5, 10), oracle::random_vec(2, 11),
                                   std::vector<double>(5, 0.0), 0.3);
    for (double x : r) CHECK(x == 0.0);
  }
  SUBCASE("elementwise loop oracle and nonnegativity") {
    const Matrix w = oracle::random_matrix(5, 2, 12);
    const auto v = oracle::random_vec(5, 13);
    const auto h = oracle::random_vec(2, 14);
    const auto r = oracle::random_vec(5, 15);
    const auto fit = oracle::matvec(w, h);
    const auto got = robust_update_r(w, v, h, r, 0.25);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(got[i] == doctest::Approx(r[i] * v[i] / (fit[i] + r[i] + 0.25)).epsilon(1e-14));
      CHECK(got[i] >= 0.0);
    }
  }
  SUBCASE("lambda validated") {
    CHECK_THROWS_AS(robust_update_r(w1, std::vector<double>{1}, std::vector<double>{1},
                                    std::vector<double>{1}, -1.0),
                    DomainError);
  }
}

TEST_CASE("robust W update") {
  const Matrix v = oracle::random_matrix(5, 7, 20);
  const FactorPair tilde(oracle::random_matrix(5, 2, 21), oracle::random_matrix(2, 7, 22));
  const Matrix r_tilde = oracle::random_matrix(5, 7, 23, 0.0, 0.3);
  const RobustSnapshot snap = RobustSnapshot::take(v, tilde, r_tilde);
  const Matrix w_t = oracle::random_matrix(5, 2, 24);
  const Matrix h = oracle::random_matrix(2, 7, 25);
  const Matrix r = oracle::random_matrix(5, 7, 26, 0.0, 0.3);

  SUBCASE("single sample matches a literal transcription") {
    for (std::size_t k = 0; k < 7; ++k) {
      const auto br = oracle::bracket(w_t, tilde.W, tilde.H, v, h, {k}, &r, &r_tilde);
      CHECK(oracle::max_abs_diff(rsvrmu_w_update(w_t, snap, v, h, r, k, 0.6),
                                 oracle::vr_step(w_t, br, 0.6)) < 1e-12);
    }
  }
  SUBCASE("mini-batch matches a literal transcription") {
    const std::vector<std::size_t> s = {6, 0, 3};
    const auto br = oracle::bracket(w_t, tilde.W, tilde.H, v, h, s, &r, &r_tilde);
    const auto qp = compute_qp_robust(w_t, snap, v, h, r, s);
    CHECK(oracle::max_abs_diff(qp.Q, br.Q) < 1e-12);
    CHECK(oracle::max_abs_diff(qp.P, br.P) < 1e-12);
    CHECK(oracle::max_abs_diff(rsvrmu_minibatch_w_update(w_t, snap, v, h, r, s, 1.0),
                               oracle::vr_step(w_t, br, 1.0)) < 1e-12);
  }
  SUBCASE("R = R~ = 0 reduces to the plain variance-reduced step") {
    const Matrix zero(5, 7);
    const RobustSnapshot zsnap = RobustSnapshot::take(v, tilde, zero);
    const Snapshot plain = Snapshot::take(v, tilde);
    for (std::size_t k = 0; k < 7; ++k) {
      CHECK(oracle::max_abs_diff(rsvrmu_w_update(w_t, zsnap, v, h, zero, k, 0.8),
                                 svrmu_inner_step(w_t, plain, v, h, k, 0.8)) <= 1e-15);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(rsvrmu_w_update(w_t, snap, v, h, r, 0, 0.0), DomainError);
    CHECK_THROWS_AS(rsvrmu_w_update(w_t, snap, v, h, Matrix(5, 6), 0, 0.5), DimensionError);
    CHECK_THROWS_AS(rsvrmu_w_update(w_t, snap, v, h, r, 7, 0.5), DimensionError);
  }
}

TEST_CASE("init_outliers") {
  const Matrix r = init_outliers(4, 6, 0.01, 3);
  CHECK(r.min_entry() > 0.0);
  CHECK(r.max_entry() <= 0.01);
  CHECK(r == init_outliers(4, 6, 0.01, 3));
  CHECK_THROWS_AS(init_outliers(4, 6, 0.0, 3), DomainError);
}

TEST_CASE("rsvrmu_solve") {
  const SyntheticData d = gen_synthetic({20, 40, 3, 7});
  const FactorPair start = init_factors(20, 40, 3, 1);
  StochasticConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 5;
  cfg.seed = 11;
  SolveOptions opts;
  opts.record_wall_time = false;

  SUBCASE("zero outliers follow the plain solver") {
    const auto robust = rsvrmu_solve(d.V, start, Matrix(20, 40), cfg, 0.5, std::nullopt, opts);
    const auto plain = svrmu_solve(d.V, start, cfg, std::nullopt, opts);
    CHECK(robust.outliers.R.max_entry() == 0.0);
    CHECK(oracle::max_abs_diff(robust.factors.W, plain.factors.W) < 1e-12);
    CHECK(oracle::max_abs_diff(robust.factors.H, plain.factors.H) < 1e-12);
    REQUIRE(robust.trace.size() == plain.trace.size());
    for (std::size_t i = 0; i < plain.trace.size(); ++i) {
      CHECK(robust.trace.records()[i].grad_count == plain.trace.records()[i].grad_count);
      CHECK(robust.trace.records()[i].cost ==
            doctest::Approx(plain.trace.records()[i].cost).epsilon(1e-10));
    }
  }
  SUBCASE("large lambda shrinks R towards zero") {
    // Each visit scales r_k by at most max(v) / lambda = 0.02.
    const Matrix r0 = init_outliers(20, 40, 0.1, 2);
    cfg.epochs = 30;
    const auto res = rsvrmu_solve(d.V, start, r0, cfg, 50.0, std::nullopt, opts);
    double before = 0.0, after = 0.0;
    for (double x : r0.values()) before += x;
    for (double x : res.outliers.R.values()) after += x;
    CHECK(after < 1e-6 * before);
    CHECK(res.outliers.R.min_entry() >= 0.0);
  }
  SUBCASE("outlier entries receive more of R than clean entries") {
    const CorruptedData c = inject_outliers(d.V, {0.1, 0.5, 1.0, 9});
    cfg.epochs = 20;
    const auto res =
        rsvrmu_solve(c.V, start, init_outliers(20, 40, 0.01, 4), cfg, 0.1, std::nullopt, opts);
    double on = 0.0, off = 0.0;
    std::size_t n_on = 0, n_off = 0;
    const auto rv = res.outliers.R.values();
    for (std::size_t i = 0; i < rv.size(); ++i) {
      if (c.mask[i]) {
        on += rv[i];
        ++n_on;
      } else {
        off += rv[i];
        ++n_off;
      }
    }
    REQUIRE(n_on > 0);
    CHECK(on / static_cast<double>(n_on) > 5.0 * off / static_cast<double>(n_off));
  }
  SUBCASE("deterministic and reports the robust cost") {
    const Matrix r0 = init_outliers(20, 40, 0.01, 5);
    const auto a = rsvrmu_solve(d.V, start, r0, cfg, 0.2, std::nullopt, opts);
    const auto b = rsvrmu_solve(d.V, start, r0, cfg, 0.2, std::nullopt, opts);
    CHECK(a.trace.records() == b.trace.records());
    CHECK(a.final_robust_cost ==
          doctest::Approx(oracle::robust_cost(d.V, a.factors.W, a.factors.H, a.outliers.R, 0.2))
              .epsilon(1e-12));
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(rsvrmu_solve(d.V, start, Matrix(20, 40), cfg, 0.0), DomainError);
    CHECK_THROWS_AS(rsvrmu_solve(d.V, start, Matrix(20, 39), cfg, 0.5), DimensionError);
  }
}
