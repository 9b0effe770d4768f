#include "freqlab/conformal2d.hpp"
#include "freqlab/mfs.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace freqlab;

namespace {

std::shared_ptr<const ConformalMap2D> bump_map() {
  static const auto m = build_map(GraphDomain::quadratic_bump(2, 1e-3), 0.5);
  return m;
}

}  // namespace

TEST_CASE("flat domain: the map is a real multiple of z") {
  const auto m = build_map(GraphDomain::flat(2), 0.5);
  // g = y / sup_{B_{7R/4}} y, so Φ(z) = z / (7R/4).
  const double c = 1.0 / (1.75 * 0.5);
  for (const Vec& X : {vec2(0.2, 0.1), vec2(-0.3, 0.4), vec2(0.0, 0.6)}) {
    const std::complex<double> w = m->phi(X);
    CHECK(w.real() == doctest::Approx(c * X(0)).epsilon(1e-6));
    CHECK(w.imag() == doctest::Approx(c * X(1)).epsilon(1e-6));
  }
  CHECK(m->hopf_c() == doctest::Approx(c * c).epsilon(1e-5));
}

TEST_CASE("curved map: Cauchy-Riemann, Jacobian and path independence") {
  const auto m = bump_map();
  CHECK(m->boundary_image_residual() < 1e-6);
  CHECK(m->hopf_c() > 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  for (int i = 0; i < 10; ++i) {
    Vec X = vec2(u(rng), std::abs(u(rng)) + 0.02);
    if (X.norm() > 0.5) continue;
    CHECK(m->cr_residual(X) < 1e-8);
    const Mat J = m->jacobian(X);
    CHECK((J - m->jacobian_fd(X, 1e-3)).norm() < 1e-8 * J.norm());
    // Conformal: det DΦ = |Φ'|^2 > 0.
    CHECK(J.determinant() == doctest::Approx(std::norm(m->dphi(X))).epsilon(1e-12));
    CHECK(m->conjugate(X) == doctest::Approx(m->conjugate_path(X, 0.05)).epsilon(1e-9));
    CHECK(m->conjugate_path(X, 0.1) == doctest::Approx(m->conjugate_path(X, 0.02)).epsilon(1e-9));
  }
}

TEST_CASE("inverse map round trip") {
  const auto m = bump_map();
  for (const Vec& X : {vec2(0.1, 0.2), vec2(-0.3, 0.05), vec2(0.0, 0.4)}) {
    const Vec Y = m->inverse(m->phi(X));
    CHECK((Y - X).norm() < 1e-10);
  }
}

TEST_CASE("graph maps into the real axis") {
  const auto m = bump_map();
  const GraphDomain& dom = m->domain();
  for (double x : {-0.6, -0.2, 0.0, 0.3, 0.7}) {
    Vec t(1);
    t << x;
    CHECK(std::abs(m->phi(dom.boundary_point(t)).imag()) < 1e-6);
  }
}

TEST_CASE("pushed field is odd across the real axis") {
  const auto m = bump_map();
  // u must vanish on the graph for the reflection to hold.
  const auto u = solve_mfs(m->domain(), graph_adapted_data(m->domain(), exact_polynomial(2, 2)));
  PushedField uh(u, m);
  CHECK(uh.oddness_residual(vec2(0.2, 0.1)) < 1e-6);
  const Vec X = vec2(0.15, 0.2);
  const std::complex<double> w = m->phi(X);
  CHECK(uh.value(vec2(w.real(), w.imag())) == doctest::Approx(u->value(X)).epsilon(1e-9));
}

TEST_CASE("critical point counts transfer through the map") {
  const auto m = bump_map();
  const GraphDomain& dom = m->domain();
  const auto u = solve_mfs(dom, graph_adapted_data(dom, exact_polynomial(2, 3)), MfsOptions{});
  const TransferResult t = transfer_count(*m, u, 0.5);
  CHECK(t.matched);
  CHECK(t.count_before == t.count_after);
  CHECK(t.min_det >= 0.5 * t.hopf_c);
  CHECK(t.max_image_mismatch < 1e-6);
}

TEST_CASE("build_map rejects an inadmissible domain") {
  CHECK_THROWS_AS(build_map(GraphDomain::quadratic_bump(2, 0.05), 1.0), Error);
}
