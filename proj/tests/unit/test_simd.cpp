#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vrnmf/simd/kernels.hpp"

using vrnmf::simd::KernelTable;

namespace {

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  if (auto* t = vrnmf::simd::avx2_kernels()) out.push_back(t);
  if (auto* t = vrnmf::simd::neon_kernels()) out.push_back(t);
  return out;
}

std::vector<double> rand_vec(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("scalar kernels on hand values") {
  const auto& s = vrnmf::simd::scalar_kernels();
  const double a[] = {1, 2, 3};
  const double b[] = {4, 5, 6};
  CHECK(s.dot(a, b, 3) == 32);
  CHECK(s.sum_sq_diff(a, b, 3) == 27);
  double y[] = {1, 1, 1};
  s.axpy(y, 2.0, a, 3);
  CHECK(y[2] == 7);
  double out[3];
  const double c[] = {0, 2, 4};
  s.mul_div(out, a, b, c, 3, 1e-12);
  CHECK(out[1] == 5);
  CHECK(out[2] == 4.5);
  double w[] = {1, 1};
  const double q[] = {2, 1};
  const double p[] = {1, 3};
  s.vr_scale(w, q, p, 1.0, 2, 1e-12);
  CHECK(w[0] == 0.5);  // 1 - (2-1)/2
  CHECK(w[1] == 3.0);  // 1 - (1-3)/1
  double x[] = {-1, 0.5};
  s.clamp_below(x, 0.0, 2);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 0.5);
}

TEST_CASE("active table is one of the compiled backends") {
  const auto& t = vrnmf::simd::active_kernels();
  CHECK((t.name == "scalar" || t.name == "avx2" || t.name == "neon"));
}

TEST_CASE("vector backends agree with the scalar reference") {
  const auto& ref = vrnmf::simd::scalar_kernels();
  const auto tables = vector_tables();
  if (tables.empty()) {
    MESSAGE("no vector backend available on this host");
    return;
  }
  for (const KernelTable* t : tables) {
    CAPTURE(t->name);
    for (std::size_t n = 0; n <= 67; ++n) {
      CAPTURE(n);
      const auto a = rand_vec(n, 10 + n, 0.0, 2.0);
      const auto b = rand_vec(n, 20 + n, 0.0, 2.0);
      auto c = rand_vec(n, 30 + n, 0.0, 2.0);
      if (n > 3) c[3] = 0.0;  // exercise the guard

      CHECK(close(t->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-13));
      CHECK(close(t->sum_sq_diff(a.data(), b.data(), n), ref.sum_sq_diff(a.data(), b.data(), n),
                  1e-13));

      auto y1 = c, y2 = c;
      t->axpy(y1.data(), 0.7, a.data(), n);
      ref.axpy(y2.data(), 0.7, a.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 4e-16));

      std::vector<double> m1(n), m2(n);
      t->mul_div(m1.data(), a.data(), b.data(), c.data(), n, 1e-12);
      ref.mul_div(m2.data(), a.data(), b.data(), c.data(), n, 1e-12);
      for (std::size_t i = 0; i < n; ++i) CHECK(m1[i] == m2[i]);

      auto w1 = a, w2 = a;
      t->vr_scale(w1.data(), c.data(), b.data(), 0.6, n, 1e-12);
      ref.vr_scale(w2.data(), c.data(), b.data(), 0.6, n, 1e-12);
      for (std::size_t i = 0; i < n; ++i) CHECK(close(w1[i], w2[i], 1e-14));

      auto x1 = rand_vec(n, 40 + n, -1.0, 1.0), x2 = x1;
      t->clamp_below(x1.data(), 1e-16, n);
      ref.clamp_below(x2.data(), 1e-16, n);
      CHECK(x1 == x2);
    }
  }
}

TEST_CASE("vr_scale keeps nonnegative inputs nonnegative on every backend") {
  std::vector<const KernelTable*> all = vector_tables();
  all.push_back(&vrnmf::simd::scalar_kernels());
  for (const KernelTable* t : all) {
    CAPTURE(t->name);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const std::size_t n = 37;
      auto w = rand_vec(n, seed, 0.0, 3.0);
      auto q = rand_vec(n, seed + 1000, 0.0, 1.0);
      auto p = rand_vec(n, seed + 2000, 0.0, 5.0);
      q[0] = 0.0;
      p[1] = 0.0;
      const double alpha = 0.01 + 0.99 * static_cast<double>(seed) / 49.0;
      t->vr_scale(w.data(), q.data(), p.data(), alpha, n, 1e-12);
      for (double x : w) CHECK(x >= 0.0);
    }
  }
}
