#include "freqlab/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace freqlab::kernels;

namespace {

struct Charges {
  std::vector<double> x, y, z, w;
};

Charges random_charges(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-3.0, 3.0), wt(-1.0, 1.0);
  Charges c;
  for (std::size_t i = 0; i < n; ++i) {
    c.x.push_back(pos(rng));
    c.y.push_back(pos(rng) - 4.0);
    c.z.push_back(pos(rng));
    c.w.push_back(wt(rng));
  }
  return c;
}

double rel(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

}  // namespace

TEST_CASE("scalar mfs2 matches a direct sum") {
  const Charges c = random_charges(7, 3);
  MfsSums2 s;
  detail::mfs2_scalar(c.x.data(), c.y.data(), c.w.data(), c.x.size(), 0.3, 0.2, 2, &s);
  double v = 0, gx = 0, gy = 0;
  for (std::size_t j = 0; j < c.x.size(); ++j) {
    const double dx = 0.3 - c.x[j], dy = 0.2 - c.y[j], q = dx * dx + dy * dy;
    v += c.w[j] * 0.5 * std::log(q);
    gx += c.w[j] * dx / q;
    gy += c.w[j] * dy / q;
  }
  CHECK(s.value == doctest::Approx(v).epsilon(1e-14));
  CHECK(s.gx == doctest::Approx(gx).epsilon(1e-14));
  CHECK(s.gy == doctest::Approx(gy).epsilon(1e-14));
  // The kernel is harmonic away from the charges.
  CHECK(std::abs(s.hxx + s.hyy) < 1e-12 * (std::abs(s.hxx) + 1.0));
}

TEST_CASE("scalar mfs3 is harmonic and matches a direct sum") {
  const Charges c = random_charges(9, 5);
  MfsSums3 s;
  detail::mfs3_scalar(c.x.data(), c.y.data(), c.z.data(), c.w.data(), c.x.size(), 0.1, 0.5, -0.2, 2, &s);
  double v = 0;
  for (std::size_t j = 0; j < c.x.size(); ++j) {
    const double dx = 0.1 - c.x[j], dy = 0.5 - c.y[j], dz = -0.2 - c.z[j];
    v += c.w[j] / std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  CHECK(s.value == doctest::Approx(v).epsilon(1e-14));
  CHECK(std::abs(s.h[0] + s.h[3] + s.h[5]) < 1e-12 * (std::abs(s.h[0]) + 1.0));
}

TEST_CASE("active kernel table is one of the compiled variants") {
  const KernelTable& k = active_kernels();
  const KernelTable* avx = avx2_kernels();
  CHECK((&k == &scalar_kernels() || (avx != nullptr && &k == avx)));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const KernelTable* avx = avx2_kernels();
  if (avx == nullptr) {
    MESSAGE("AVX2 variant unavailable; equivalence skipped");
    return;
  }
  const KernelTable& sc = scalar_kernels();
  // Sizes cover the vector body, the remainder and the empty case.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 160u, 601u}) {
    const Charges c = random_charges(n, 11 + static_cast<unsigned>(n));
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double x = u(rng), y = 0.5 + u(rng) * 0.4, z = u(rng);
      for (int order = 0; order <= 2; ++order) {
        MfsSums2 a, b;
        sc.mfs2(c.x.data(), c.y.data(), c.w.data(), n, x, y, order, &a);
        avx->mfs2(c.x.data(), c.y.data(), c.w.data(), n, x, y, order, &b);
        const double scale = 1.0 + static_cast<double>(n);
        CHECK(rel(a.value, b.value, scale) < 1e-13);
        if (order >= 1) {
          CHECK(rel(a.gx, b.gx, scale) < 1e-13);
          CHECK(rel(a.gy, b.gy, scale) < 1e-13);
        }
        if (order >= 2) {
          CHECK(rel(a.hxx, b.hxx, scale) < 1e-13);
          CHECK(rel(a.hxy, b.hxy, scale) < 1e-13);
          CHECK(rel(a.hyy, b.hyy, scale) < 1e-13);
        }
        MfsSums3 p, q;
        sc.mfs3(c.x.data(), c.y.data(), c.z.data(), c.w.data(), n, x, y, z, order, &p);
        avx->mfs3(c.x.data(), c.y.data(), c.z.data(), c.w.data(), n, x, y, z, order, &q);
        CHECK(rel(p.value, q.value, scale) < 1e-13);
        for (int i = 0; i < 3 && order >= 1; ++i) CHECK(rel(p.g[i], q.g[i], scale) < 1e-13);
        for (int i = 0; i < 6 && order >= 2; ++i) CHECK(rel(p.h[i], q.h[i], scale) < 1e-13);
      }
    }
  }
}

TEST_CASE("avx2 dot and log agree with the scalar reference") {
  const KernelTable* avx = avx2_kernels();
  if (avx == nullptr) return;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> e(-300.0, 300.0);
  for (std::size_t n : {0u, 1u, 2u, 7u, 8u, 9u, 100u, 1001u}) {
    std::vector<double> a(n), b(n), pos(n), la(n), lb(n);
    double sabs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      sabs += std::abs(a[i] * b[i]);
      pos[i] = std::abs(u(rng)) * std::pow(10.0, e(rng));
    }
    CHECK(std::abs(scalar_kernels().dot(a.data(), b.data(), n) - avx->dot(a.data(), b.data(), n)) <=
          1e-14 * (sabs + 1e-300));
    scalar_kernels().log(pos.data(), la.data(), n);
    avx->log(pos.data(), lb.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(la[i] == doctest::Approx(std::log(pos[i])).epsilon(1e-15));
      CHECK(std::abs(la[i] - lb[i]) <= 4e-16 * std::max(1.0, std::abs(la[i])));
    }
  }
}

TEST_CASE("log kernel near one and at exact powers of two") {
  const KernelTable* avx = avx2_kernels();
  if (avx == nullptr) return;
  std::vector<double> in{1.0, 1.0 + 1e-12, 1.0 - 1e-12, 0.5, 2.0, 1024.0, 0.7071067811865476, 1.4142135623730951};
  std::vector<double> out(in.size());
  avx->log(in.data(), out.data(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) CHECK(std::abs(out[i] - std::log(in[i])) <= 4e-16 * std::max(1.0, std::abs(std::log(in[i]))));
}
