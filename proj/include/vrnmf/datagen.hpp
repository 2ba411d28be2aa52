#pragma once

#include <cstdint>
#include <vector>

#include "vrnmf/matrix.hpp"

namespace vrnmf {

struct SyntheticSpec {
  std::size_t rows = 300;  // F
  std::size_t cols = 1000;  // N
  std::size_t rank = 10;  // K_o
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  NonnegativeMatrix V;  // normalization_projector(W_o H_o)
  Matrix W_o;           // F x K_o, |N(0, 1/sqrt(K_o))| entries
  Matrix H_o;           // K_o x N, same law
};

// Ground-truth factors with entries |g|, g ~ N(0, variance 1/sqrt(K_o)),
// W_o drawn before H_o; V is their product scaled into [0, 1].
SyntheticData gen_synthetic(const SyntheticSpec& spec);

// Global max-scaling: M / max(M). Throws DomainError for an all-zero or
// negative input.
NonnegativeMatrix normalization_projector(const Matrix& m);

struct OutlierSpec {
  double density = 0.0;  // rho
  double low = 0.0;
  double high = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CorruptedData {
  Matrix V;
  std::vector<std::uint8_t> mask;  // row-major, 1 where an outlier was added
};

// Each entry independently receives, with probability rho, an additive draw
// from U[low, high]. Visits entries in row-major order; per entry the
// Bernoulli draw precedes the magnitude draw.
CorruptedData inject_outliers(const Matrix& v, const OutlierSpec& spec);

}  // namespace vrnmf
