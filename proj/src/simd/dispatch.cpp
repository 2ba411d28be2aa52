#include <cstdlib>
#include <string_view>

#include "vrnmf/simd/kernels.hpp"

namespace vrnmf::simd {

#if defined(VRNMF_HAVE_AVX2)
namespace avx2 {
const KernelTable& table() noexcept;
}
#endif
#if defined(__aarch64__)
namespace neon {
const KernelTable& table() noexcept;
}
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(VRNMF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() noexcept {
#if defined(__aarch64__)
  return &neon::table();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& resolve() noexcept {
  const char* env = std::getenv("VRNMF_SIMD");
  const std::string_view request = env ? env : "auto";
  if (request == "scalar") return scalar_kernels();
  if (request == "avx2" && avx2_kernels()) return *avx2_kernels();
  if (request == "neon" && neon_kernels()) return *neon_kernels();
  if (const auto* t = avx2_kernels()) return *t;
  if (const auto* t = neon_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = resolve();
  return table;
}

}  // namespace vrnmf::simd
