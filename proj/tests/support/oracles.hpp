#pragma once

// Independent reference computations for tests. Everything here is written
// with plain loops over Matrix entries and must not call into vrnmf::linalg,
// the kernel tables or any solver.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vrnmf/matrix.hpp"

namespace oracle {

using vrnmf::Matrix;
using Vec = std::vector<double>;

inline Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double lo = 0.05,
                            double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

inline Vec random_vec(std::size_t n, std::uint64_t seed, double lo = 0.05, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline Matrix mul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
      out(i, j) = s;
    }
  return out;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Vec col(const Matrix& m, std::size_t c) {
  Vec v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, c);
  return v;
}

inline Vec matvec(const Matrix& a, const Vec& x) {
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

inline Vec matvec_t(const Matrix& a, const Vec& x) {
  Vec y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
  return y;
}

inline Matrix outer(const Vec& x, const Vec& y) {
  Matrix m(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) m(i, j) = x[i] * y[j];
  return m;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
  Matrix m = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) += b(i, j);
  return m;
}

inline Matrix sub(const Matrix& a, const Matrix& b) {
  Matrix m = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) -= b(i, j);
  return m;
}

inline Matrix scale(const Matrix& a, double s) {
  Matrix m = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) *= s;
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// (1/N) sum_n 1/2 ||v_n - W h_n||^2 as a double loop.
inline double cost(const Matrix& v, const Matrix& w, const Matrix& h) {
  double total = 0.0;
  for (std::size_t n = 0; n < v.cols(); ++n) {
    double s = 0.0;
    for (std::size_t f = 0; f < v.rows(); ++f) {
      double fit = 0.0;
      for (std::size_t k = 0; k < w.cols(); ++k) fit += w(f, k) * h(k, n);
      s += (v(f, n) - fit) * (v(f, n) - fit);
    }
    total += 0.5 * s;
  }
  return total / static_cast<double>(v.cols());
}

// (1/N) sum_n [1/2 ||v_n - W h_n - r_n||^2 + lambda ||r_n||_1].
inline double robust_cost(const Matrix& v, const Matrix& w, const Matrix& h, const Matrix& r,
                          double lambda) {
  double total = 0.0;
  for (std::size_t n = 0; n < v.cols(); ++n) {
    double s = 0.0;
    double l1 = 0.0;
    for (std::size_t f = 0; f < v.rows(); ++f) {
      double fit = 0.0;
      for (std::size_t k = 0; k < w.cols(); ++k) fit += w(f, k) * h(k, n);
      const double e = v(f, n) - fit - r(f, n);
      s += e * e;
      l1 += std::abs(r(f, n));
    }
    total += 0.5 * s + lambda * l1;
  }
  return total / static_cast<double>(v.cols());
}

// Multiplicative h step: h .* (W^T v) ./ (W^T W h + W^T r).
inline Vec h_update(const Matrix& w, const Vec& v, const Vec& h, const Vec* r = nullptr) {
  const Vec num = matvec_t(w, v);
  Vec fit = matvec(w, h);
  if (r) for (std::size_t f = 0; f < fit.size(); ++f) fit[f] += (*r)[f];
  const Vec den = matvec_t(w, fit);
  Vec out(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) out[k] = h[k] * num[k] / den[k];
  return out;
}

// Variance-reduced bracket with mini-batch averaging, literally:
//   (1/b) sum_k [ (W_t h_k + r_k) h_k^T - v_k h_k^T
//                 - ((W~ h~_k + r~_k) h~_k^T - v_k h~_k^T) ]
//   + ((W~ H~ + R~) H~^T - V H~^T) / N
// Passing empty R, R~ gives the plain bracket.
struct Bracket {
  Matrix grad;  // the bracket itself
  Matrix Q;     // positive part
  Matrix P;     // negative part
};

inline Bracket bracket(const Matrix& wt, const Matrix& w_tilde, const Matrix& h_tilde,
                       const Matrix& v, const Matrix& h, const std::vector<std::size_t>& ks,
                       const Matrix* r = nullptr, const Matrix* r_tilde = nullptr) {
  const std::size_t F = wt.rows();
  const std::size_t K = wt.cols();
  const double N = static_cast<double>(v.cols());
  const double b = static_cast<double>(ks.size());
  Matrix qs(F, K), ps(F, K);
  for (std::size_t k : ks) {
    const Vec vk = col(v, k);
    const Vec hk = col(h, k);
    const Vec htk = col(h_tilde, k);
    Vec fit = matvec(wt, hk);
    Vec fit_t = matvec(w_tilde, htk);
    if (r) for (std::size_t f = 0; f < F; ++f) fit[f] += (*r)(f, k);
    if (r_tilde) for (std::size_t f = 0; f < F; ++f) fit_t[f] += (*r_tilde)(f, k);
    qs = add(qs, add(outer(fit, hk), outer(vk, htk)));
    ps = add(ps, add(outer(vk, hk), outer(fit_t, htk)));
  }
  Matrix wh = mul(w_tilde, h_tilde);
  if (r_tilde) wh = add(wh, *r_tilde);
  const Matrix ht = transpose(h_tilde);
  const Matrix full_q = scale(mul(wh, ht), 1.0 / N);
  const Matrix full_p = scale(mul(v, ht), 1.0 / N);
  Bracket out;
  out.Q = add(scale(qs, 1.0 / b), full_q);
  out.P = add(scale(ps, 1.0 / b), full_p);
  out.grad = sub(out.Q, out.P);
  return out;
}

// W - S .* grad with S = alpha W ./ Q.
inline Matrix vr_step(const Matrix& wt, const Bracket& br, double alpha) {
  Matrix out = wt;
  for (std::size_t i = 0; i < wt.rows(); ++i)
    for (std::size_t j = 0; j < wt.cols(); ++j)
      out(i, j) = wt(i, j) - alpha * wt(i, j) / br.Q(i, j) * br.grad(i, j);
  return out;
}

}  // namespace oracle
