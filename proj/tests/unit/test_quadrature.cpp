#include "freqlab/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace freqlab;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureSpec tight() {
  QuadratureSpec s;
  s.tol = 1e-12;
  return s;
}

// Area of B_r(p) ∩ {y > a x^2} by a fine 1-D chord integral (midpoint rule on x).
double bump_ball_area_oracle(double a, double px, double py, double r) {
  const int n = 200000;
  double area = 0.0;
  const double h = 2 * r / n;
  for (int i = 0; i < n; ++i) {
    const double x = px - r + (i + 0.5) * h;
    const double half = std::sqrt(std::max(0.0, r * r - (x - px) * (x - px)));
    const double lo = std::max(py - half, a * x * x);
    const double hi = py + half;
    if (hi > lo) area += (hi - lo) * h;
  }
  return area;
}

}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 64, 128}) {
    const GaussRule& g = gauss_legendre(n);
    REQUIRE(g.nodes.size() == static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1 && k <= 40; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(exact).scale(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("adaptive Gauss handles an endpoint singularity and an absolute floor") {
  const QuadResult q =
      adaptive_gauss([](double t, double* o) { o[0] = std::sqrt(t); o[1] = t * std::log(t); }, 2, 0.0, 1.0, 8, 1e-10, 40);
  CHECK(q.converged);
  CHECK(q[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(q[1] == doctest::Approx(-0.25).epsilon(1e-9));

  // An odd integrand cancels; the floor lets it stop at a coarse level.
  Values floor{};
  floor[0] = 1.0;
  const QuadResult c =
      adaptive_gauss([](double t, double* o) { o[0] = std::sin(40 * t) * t * t; }, 1, -1.0, 1.0, 8, 1e-10, 30, floor);
  CHECK(c.converged);
  CHECK(std::abs(c[0]) < 1e-10);
}

TEST_CASE("periodic trapezoid is spectrally accurate") {
  const QuadResult q = periodic_trapezoid([](double t, double* o) { o[0] = std::exp(std::cos(t)); }, 1, 2 * kPi, 8, 1e-14, 10);
  // 2π I_0(1).
  CHECK(q[0] == doctest::Approx(2 * kPi * std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-13));
}

TEST_CASE("flat half ball, sphere and disk measures") {
  const GraphDomain f2 = GraphDomain::flat(2), f3 = GraphDomain::flat(3);
  const QuadratureSpec s = tight();
  auto one = [](const Vec&) { return 1.0; };
  CHECK(ball_integral(one, f2, vec2(0.0, 0.0), 0.5, s)[0] == doctest::Approx(kPi * 0.125).epsilon(1e-11));
  CHECK(ball_integral(one, f3, vec3(0.0, 0.0, 0.0), 0.5, s)[0] == doctest::Approx(2 * kPi * 0.125 / 3).epsilon(1e-11));
  CHECK(sphere_cap_integral(one, f2, vec2(0.0, 0.0), 0.5, s)[0] == doctest::Approx(kPi * 0.5).epsilon(1e-11));
  CHECK(sphere_cap_integral(one, f3, vec3(0.0, 0.0, 0.0), 0.5, s)[0] == doctest::Approx(2 * kPi * 0.25).epsilon(1e-11));
  CHECK(boundary_patch_integral(one, f2, vec2(0.0, 0.0), 0.5, s)[0] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(boundary_patch_integral(one, f3, vec3(0.0, 0.0, 0.0), 0.5, s)[0] == doctest::Approx(kPi * 0.25).epsilon(1e-11));
}

TEST_CASE("circular segment above a flat boundary") {
  // Center at height h < r: area r^2 acos(-h/r) + h sqrt(r^2 - h^2).
  const double r = 0.4, h = 0.1;
  const double area = r * r * std::acos(-h / r) + h * std::sqrt(r * r - h * h);
  const QuadResult q = ball_integral([](const Vec&) { return 1.0; }, GraphDomain::flat(2), vec2(0.0, h), r, tight());
  CHECK(q[0] == doctest::Approx(area).epsilon(1e-11));
  const double arc = 2 * r * (kPi - std::acos(h / r));
  CHECK(sphere_cap_integral([](const Vec&) { return 1.0; }, GraphDomain::flat(2), vec2(0.0, h), r, tight())[0] ==
        doctest::Approx(arc).epsilon(1e-11));
}

TEST_CASE("annulus integral of a radial monomial") {
  // ∫_{r1<|X|<r2, y>0} |X|^2 = π (r2^4 - r1^4) / 4.
  const QuadResult q = ball_integral([](const Vec& X) { return X.squaredNorm(); }, GraphDomain::flat(2), vec2(0.0, 1.0),
                                     0.6, tight());
  CHECK(q[0] == doctest::Approx(kPi * 0.6 * 0.6 * (0.6 * 0.6 / 2 + 1.0)).epsilon(1e-11));
  PointIntegrand f = [](const Vec& X, double* o) { o[0] = X.squaredNorm(); };
  const QuadResult a = ball_integral(f, 1, GraphDomain::flat(2), vec2(0.0, 0.0), 0.8, tight(), 0.3);
  CHECK(a[0] == doctest::Approx(kPi * (std::pow(0.8, 4) - std::pow(0.3, 4)) / 4).epsilon(1e-11));
}

TEST_CASE("curved ball area agrees with a chord-integral oracle") {
  const double a = 0.5;
  const GraphDomain dom = GraphDomain::quadratic_bump(2, a);
  for (const Vec& p : {vec2(0.0, 0.05), vec2(0.2, 0.03), vec2(0.1, 0.005 + 0.5 * 0.01)}) {
    const double r = 0.3;
    const QuadResult q = ball_integral([](const Vec&) { return 1.0; }, dom, p, r, tight());
    CHECK(q[0] == doctest::Approx(bump_ball_area_oracle(a, p(0), p(1), r)).epsilon(1e-8));
  }
}

TEST_CASE("divergence theorem on a curved ball") {
  // F = (0, y): ∫_{B∩D} div F = ∫_{∂(B∩D)} F.ν = sphere part + boundary part.
  const GraphDomain dom = GraphDomain::cosine_window(2, 0.1, 2.0);
  const Vec p = vec2(0.05, 0.1);
  const double r = 0.35;
  const QuadratureSpec s = tight();
  const double vol = ball_integral([](const Vec&) { return 1.0; }, dom, p, r, s)[0];
  const double sph = sphere_cap_integral([&](const Vec& X) { return X(1) * (X(1) - p(1)) / r; }, dom, p, r, s)[0];
  PatchIntegrand flux = [](const Vec& X, const Vec& n, double* o) { o[0] = -X(1) * n(1); };
  const double bdy = boundary_patch_integral(flux, 1, dom, p, r, s)[0];
  CHECK(vol == doctest::Approx(sph + bdy).epsilon(1e-10));
}

TEST_CASE("3-D divergence theorem on a curved ball") {
  const GraphDomain dom = GraphDomain::quadratic_bump(3, 0.2);
  const Vec p = vec3(0.1, -0.05, 0.08);
  const double r = 0.3;
  QuadratureSpec s;
  s.tol = 1e-10;
  const double vol = ball_integral([](const Vec&) { return 1.0; }, dom, p, r, s)[0];
  const double sph = sphere_cap_integral([&](const Vec& X) { return X(2) * (X(2) - p(2)) / r; }, dom, p, r, s)[0];
  PatchIntegrand flux = [](const Vec& X, const Vec& n, double* o) { o[0] = -X(2) * n(2); };
  const double bdy = boundary_patch_integral(flux, 1, dom, p, r, s)[0];
  CHECK(vol == doctest::Approx(sph + bdy).epsilon(1e-8));
}

TEST_CASE("rim integral in 2-D sums the two rim points") {
  const GraphDomain f2 = GraphDomain::flat(2);
  const QuadResult q =
      sphere_rim_integral([](const Vec& X, double* o) { o[0] = X(0) * X(0) + 1.0; }, 1, f2, vec2(0.0, 0.3), 0.5, tight());
  // Rim points x = ±0.4.
  CHECK(q[0] == doctest::Approx(2 * (0.16 + 1.0)).epsilon(1e-12));
  const QuadResult c =
      sphere_rim_integral([](const Vec&, double* o) { o[0] = 1.0; }, 1, GraphDomain::flat(3), vec3(0.0, 0.0, 0.3), 0.5, tight());
  CHECK(c[0] == doctest::Approx(2 * kPi * 0.4).epsilon(1e-11));
}

TEST_CASE("refined quadrature settings and invalid arguments") {
  QuadratureSpec s;
  const QuadratureSpec r = s.refined();
  CHECK(r.radial == 2 * s.radial);
  CHECK(r.tol == doctest::Approx(s.tol / 100));
  CHECK_THROWS_AS(ball_integral([](const Vec&) { return 1.0; }, GraphDomain::flat(2), vec2(0.0, 0.1), -1.0, s), Error);
}
