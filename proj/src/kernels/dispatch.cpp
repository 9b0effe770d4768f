#include "freqlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace freqlab::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(FREQLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &detail::mfs2_scalar, &detail::mfs3_scalar, &detail::dot_scalar,
                                 &detail::log_scalar};
  return table;
}

const KernelTable* avx2_kernels() {
#if defined(FREQLAB_HAVE_AVX2)
  static const KernelTable table{"avx2", &detail::mfs2_avx2, &detail::mfs3_avx2, &detail::dot_avx2,
                                 &detail::log_avx2};
  static const bool ok = cpu_has_avx2();
  return ok ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("FREQLAB_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return scalar_kernels();
    const KernelTable* fast = avx2_kernels();
    return fast != nullptr ? *fast : scalar_kernels();
  }();
  return chosen;
}

}  // namespace freqlab::kernels
