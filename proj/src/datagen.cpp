#include "vrnmf/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "vrnmf/linalg.hpp"

namespace vrnmf {

void SyntheticSpec::validate() const {
  if (rows == 0 || cols == 0 || rank == 0) {
    throw DomainError("SyntheticSpec: rows, cols and rank must be positive");
  }
  if (rank > std::min(rows, cols)) {
    throw DomainError("SyntheticSpec: rank K_o = " + std::to_string(rank) +
                      " exceeds min(F, N) = " + std::to_string(std::min(rows, cols)));
  }
}

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const double stddev = std::pow(static_cast<double>(spec.rank), -0.25);
  std::normal_distribution<double> gauss(0.0, stddev);
  Matrix w(spec.rows, spec.rank);
  Matrix h(spec.rank, spec.cols);
  for (double& x : w.values()) x = std::abs(gauss(rng));
  for (double& x : h.values()) x = std::abs(gauss(rng));
  NonnegativeMatrix v = normalization_projector(linalg::multiply(w, h));
  return {std::move(v), std::move(w), std::move(h)};
}

NonnegativeMatrix normalization_projector(const Matrix& m) {
  require_nonnegative(m, "normalization_projector");
  const double top = m.max_entry();
  if (!(top > 0.0)) throw DomainError("normalization_projector: input is all zeros");
  Matrix out = m;
  for (double& x : out.values()) x /= top;
  return NonnegativeMatrix(std::move(out));
}

void OutlierSpec::validate() const {
  if (!(density >= 0.0 && density <= 1.0)) {
    throw DomainError("OutlierSpec: density must lie in [0, 1]");
  }
  if (!(low >= 0.0) || !(high >= low) || !std::isfinite(high)) {
    throw DomainError("OutlierSpec: need 0 <= low <= high < inf");
  }
}

CorruptedData inject_outliers(const Matrix& v, const OutlierSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution hit(spec.density);
  std::uniform_real_distribution<double> magnitude(spec.low, spec.high);
  CorruptedData out{v, std::vector<std::uint8_t>(v.size(), 0)};
  auto values = out.V.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!hit(rng)) continue;
    out.mask[i] = 1;
    values[i] += spec.low == spec.high ? spec.low : magnitude(rng);
  }
  return out;
}

}  // namespace vrnmf
