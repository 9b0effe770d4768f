#include "freqlab/kernels.hpp"

#include <cmath>

namespace freqlab::kernels::detail {

void mfs2_scalar(const double* __restrict__ cx, const double* __restrict__ cy, const double* __restrict__ w,
                 std::size_t n, double x, double y, int order, MfsSums2* out) noexcept {
  MfsSums2 s;
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = x - cx[j];
    const double dy = y - cy[j];
    const double r2 = dx * dx + dy * dy;
    s.value += w[j] * 0.5 * std::log(r2);
    if (order >= 1) {
      const double inv = w[j] / r2;
      s.gx += inv * dx;
      s.gy += inv * dy;
      if (order >= 2) {
        const double inv2 = inv / r2;
        s.hxx += inv2 * (dy * dy - dx * dx);
        s.hxy += -2.0 * inv2 * dx * dy;
      }
    }
  }
  s.hyy = -s.hxx;
  *out = s;
}

void mfs3_scalar(const double* __restrict__ cx, const double* __restrict__ cy, const double* __restrict__ cz,
                 const double* __restrict__ w, std::size_t n, double x, double y, double z, int order,
                 MfsSums3* out) noexcept {
  MfsSums3 s;
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = x - cx[j];
    const double dy = y - cy[j];
    const double dz = z - cz[j];
    const double r2 = dx * dx + dy * dy + dz * dz;
    const double ir = 1.0 / std::sqrt(r2);
    const double wr = w[j] * ir;
    s.value += wr;
    if (order >= 1) {
      const double w3 = wr * ir * ir;
      s.g[0] -= w3 * dx;
      s.g[1] -= w3 * dy;
      s.g[2] -= w3 * dz;
      if (order >= 2) {
        const double w5 = 3.0 * w3 * ir * ir;
        s.h[0] += w5 * dx * dx - w3;
        s.h[1] += w5 * dx * dy;
        s.h[2] += w5 * dx * dz;
        s.h[3] += w5 * dy * dy - w3;
        s.h[4] += w5 * dy * dz;
        s.h[5] += w5 * dz * dz - w3;
      }
    }
  }
  *out = s;
}

double dot_scalar(const double* __restrict__ a, const double* __restrict__ b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void log_scalar(const double* __restrict__ in, double* __restrict__ out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log(in[i]);
}

}  // namespace freqlab::kernels::detail
