#include "freqlab/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace freqlab::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// ln x for positive normal x: x = 2^e m, m in [sqrt(1/2), sqrt(2)),
// ln m = 2 atanh(s) with s = (m - 1) / (m + 1), |s| <= 0.1716.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_mask = _mm256_set1_epi64x(0x7ff0000000000000LL);
  const __m256i man_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, man_mask), one_bits));
  // Biased exponent as double via the 2^52 magic constant.
  const __m256i ebits = _mm256_srli_epi64(_mm256_and_si256(bits, exp_mask), 52);
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, _mm256_castpd_si256(magic))), magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 23.0);
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 21.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 3.0));
  // ln m = 2 s + 2 s^3 p
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d lnm = _mm256_fmadd_pd(_mm256_mul_pd(two_s, s2), p, two_s);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  return _mm256_fmadd_pd(e, ln2_hi, _mm256_fmadd_pd(e, ln2_lo, lnm));
}

}  // namespace

void log_avx2(const double* __restrict__ in, double* __restrict__ out, std::size_t n) noexcept {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, log_pd(_mm256_loadu_pd(in + i)));
  for (; i < n; ++i) out[i] = std::log(in[i]);
}

void mfs2_avx2(const double* __restrict__ cx, const double* __restrict__ cy, const double* __restrict__ w,
               std::size_t n, double x, double y, int order, MfsSums2* out) noexcept {
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vy = _mm256_set1_pd(y);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d mtwo = _mm256_set1_pd(-2.0);
  __m256d sv = _mm256_setzero_pd(), sgx = sv, sgy = sv, shxx = sv, shxy = sv;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(cx + j));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(cy + j));
    const __m256d wj = _mm256_loadu_pd(w + j);
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    sv = _mm256_fmadd_pd(_mm256_mul_pd(wj, half), log_pd(r2), sv);
    if (order >= 1) {
      const __m256d inv = _mm256_div_pd(wj, r2);
      sgx = _mm256_fmadd_pd(inv, dx, sgx);
      sgy = _mm256_fmadd_pd(inv, dy, sgy);
      if (order >= 2) {
        const __m256d inv2 = _mm256_div_pd(inv, r2);
        shxx = _mm256_fmadd_pd(inv2, _mm256_fmsub_pd(dy, dy, _mm256_mul_pd(dx, dx)), shxx);
        shxy = _mm256_fmadd_pd(_mm256_mul_pd(mtwo, inv2), _mm256_mul_pd(dx, dy), shxy);
      }
    }
  }
  MfsSums2 s;
  s.value = hsum(sv);
  s.gx = hsum(sgx);
  s.gy = hsum(sgy);
  s.hxx = hsum(shxx);
  s.hxy = hsum(shxy);
  if (j < n) {
    MfsSums2 tail;
    mfs2_scalar(cx + j, cy + j, w + j, n - j, x, y, order, &tail);
    s.value += tail.value;
    s.gx += tail.gx;
    s.gy += tail.gy;
    s.hxx += tail.hxx;
    s.hxy += tail.hxy;
  }
  s.hyy = -s.hxx;
  *out = s;
}

void mfs3_avx2(const double* __restrict__ cx, const double* __restrict__ cy, const double* __restrict__ cz,
               const double* __restrict__ w, std::size_t n, double x, double y, double z, int order,
               MfsSums3* out) noexcept {
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vy = _mm256_set1_pd(y);
  const __m256d vz = _mm256_set1_pd(z);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d three = _mm256_set1_pd(3.0);
  __m256d sv = _mm256_setzero_pd();
  __m256d g0 = sv, g1 = sv, g2 = sv;
  __m256d h0 = sv, h1 = sv, h2 = sv, h3 = sv, h4 = sv, h5 = sv;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(cx + j));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(cy + j));
    const __m256d dz = _mm256_sub_pd(vz, _mm256_loadu_pd(cz + j));
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dz, dz)));
    const __m256d ir = _mm256_div_pd(one, _mm256_sqrt_pd(r2));
    const __m256d wr = _mm256_mul_pd(_mm256_loadu_pd(w + j), ir);
    sv = _mm256_add_pd(sv, wr);
    if (order >= 1) {
      const __m256d w3 = _mm256_mul_pd(wr, _mm256_mul_pd(ir, ir));
      g0 = _mm256_fnmadd_pd(w3, dx, g0);
      g1 = _mm256_fnmadd_pd(w3, dy, g1);
      g2 = _mm256_fnmadd_pd(w3, dz, g2);
      if (order >= 2) {
        const __m256d w5 = _mm256_mul_pd(three, _mm256_mul_pd(w3, _mm256_mul_pd(ir, ir)));
        const __m256d w5x = _mm256_mul_pd(w5, dx);
        const __m256d w5y = _mm256_mul_pd(w5, dy);
        h0 = _mm256_add_pd(h0, _mm256_fmsub_pd(w5x, dx, w3));
        h1 = _mm256_fmadd_pd(w5x, dy, h1);
        h2 = _mm256_fmadd_pd(w5x, dz, h2);
        h3 = _mm256_add_pd(h3, _mm256_fmsub_pd(w5y, dy, w3));
        h4 = _mm256_fmadd_pd(w5y, dz, h4);
        h5 = _mm256_add_pd(h5, _mm256_fmsub_pd(_mm256_mul_pd(w5, dz), dz, w3));
      }
    }
  }
  MfsSums3 s;
  s.value = hsum(sv);
  s.g[0] = hsum(g0);
  s.g[1] = hsum(g1);
  s.g[2] = hsum(g2);
  s.h[0] = hsum(h0);
  s.h[1] = hsum(h1);
  s.h[2] = hsum(h2);
  s.h[3] = hsum(h3);
  s.h[4] = hsum(h4);
  s.h[5] = hsum(h5);
  if (j < n) {
    MfsSums3 tail;
    mfs3_scalar(cx + j, cy + j, cz + j, w + j, n - j, x, y, z, order, &tail);
    s.value += tail.value;
    for (int k = 0; k < 3; ++k) s.g[k] += tail.g[k];
    for (int k = 0; k < 6; ++k) s.h[k] += tail.h[k];
  }
  *out = s;
}

double dot_avx2(const double* __restrict__ a, const double* __restrict__ b, std::size_t n) noexcept {
  __m256d s0 = _mm256_setzero_pd(), s1 = s0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace freqlab::kernels::detail
