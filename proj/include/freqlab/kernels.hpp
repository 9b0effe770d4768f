#pragma once

#include <cstddef>

namespace freqlab::kernels {

// Sums over charges c_j with weights w_j of the 2-D kernel (1/2) log|X - c|^2.
struct MfsSums2 {
  double value = 0, gx = 0, gy = 0;
  double hxx = 0, hxy = 0, hyy = 0;
};

// Sums of the 3-D kernel 1/|X - c|; Hessian packed as xx, xy, xz, yy, yz, zz.
struct MfsSums3 {
  double value = 0;
  double g[3] = {0, 0, 0};
  double h[6] = {0, 0, 0, 0, 0, 0};
};

// order: 0 value, 1 value + gradient, 2 value + gradient + Hessian.
using Mfs2Fn = void (*)(const double* __restrict__ cx, const double* __restrict__ cy,
                        const double* __restrict__ w, std::size_t n, double x, double y, int order,
                        MfsSums2* out) noexcept;
using Mfs3Fn = void (*)(const double* __restrict__ cx, const double* __restrict__ cy,
                        const double* __restrict__ cz, const double* __restrict__ w, std::size_t n,
                        double x, double y, double z, int order, MfsSums3* out) noexcept;
using DotFn = double (*)(const double* __restrict__ a, const double* __restrict__ b, std::size_t n) noexcept;
using LogFn = void (*)(const double* __restrict__ in, double* __restrict__ out, std::size_t n) noexcept;

struct KernelTable {
  const char* name;
  Mfs2Fn mfs2;
  Mfs3Fn mfs3;
  DotFn dot;
  LogFn log;  // elementwise natural log of positive normal numbers
};

const KernelTable& scalar_kernels();
// nullptr when the AVX2 variant was not compiled or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();
// Chosen once: AVX2 when available unless FREQLAB_SIMD=scalar is set in the environment.
const KernelTable& active_kernels();

namespace detail {
void mfs2_scalar(const double* __restrict__ cx, const double* __restrict__ cy, const double* __restrict__ w,
                 std::size_t n, double x, double y, int order, MfsSums2* out) noexcept;
void mfs3_scalar(const double* __restrict__ cx, const double* __restrict__ cy, const double* __restrict__ cz,
                 const double* __restrict__ w, std::size_t n, double x, double y, double z, int order,
                 MfsSums3* out) noexcept;
double dot_scalar(const double* __restrict__ a, const double* __restrict__ b, std::size_t n) noexcept;
void log_scalar(const double* __restrict__ in, double* __restrict__ out, std::size_t n) noexcept;

#if defined(FREQLAB_HAVE_AVX2)
void mfs2_avx2(const double* __restrict__ cx, const double* __restrict__ cy, const double* __restrict__ w,
               std::size_t n, double x, double y, int order, MfsSums2* out) noexcept;
void mfs3_avx2(const double* __restrict__ cx, const double* __restrict__ cy, const double* __restrict__ cz,
               const double* __restrict__ w, std::size_t n, double x, double y, double z, int order,
               MfsSums3* out) noexcept;
double dot_avx2(const double* __restrict__ a, const double* __restrict__ b, std::size_t n) noexcept;
void log_avx2(const double* __restrict__ in, double* __restrict__ out, std::size_t n) noexcept;
#endif
}  // namespace detail

}  // namespace freqlab::kernels
