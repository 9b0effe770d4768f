#include "freqlab/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace freqlab;

namespace {

// Midpoint-rule oracle for theta~ from its double-integral definition.
double smooth_theta_oracle(const DiniParameter& dini, double r) {
  const int n = 400;
  double outer = 0.0;
  const double ht = r / n;
  for (int i = 0; i < n; ++i) {
    const double t = r + (i + 0.5) * ht;
    double inner = 0.0;
    const double hs = t / n;
    for (int j = 0; j < n; ++j) {
      const double s = t + (j + 0.5) * hs;
      inner += dini.theta(s) / s * hs;
    }
    outer += inner / t * ht;
  }
  return outer / (std::log(2.0) * std::log(2.0));
}

}  // namespace

TEST_CASE("holder modulus and its Dini integral") {
  const DiniParameter d = DiniParameter::holder(0.5, 2.0);
  CHECK(d.theta(0.25) == doctest::Approx(1.0));
  // ∫_0^b 2 s^{-1/2} ds = 4 sqrt(b).
  CHECK(dini_integral(d, 0.0, 0.09) == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(dini_integral(d, 0.04, 0.09) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(DiniParameter::zero().is_zero());
  CHECK(dini_integral(DiniParameter::zero(), 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(dini_integral(d, 0.5, 0.1), Error);
}

TEST_CASE("smoothed modulus matches a brute-force double integral") {
  for (double alpha : {1.0, 0.5, 0.25}) {
    const DiniParameter d = DiniParameter::holder(alpha, 0.7);
    for (double r : {0.01, 0.1, 0.5}) CHECK(smooth_theta(d, r) == doctest::Approx(smooth_theta_oracle(d, r)).epsilon(1e-5));
  }
}

TEST_CASE("tabulated modulus reproduces a sampled holder modulus") {
  const DiniParameter h = DiniParameter::holder(1.0, 0.3);
  std::vector<double> s, th;
  for (int i = 0; i <= 20; ++i) {
    s.push_back(0.1 * i);
    th.push_back(h.theta(0.1 * i));
  }
  const DiniParameter t = DiniParameter::tabulated(s, th);
  // Linear data is interpolated exactly.
  CHECK(t.theta(0.37) == doctest::Approx(h.theta(0.37)).epsilon(1e-14));
  CHECK(dini_integral(t, 0.05, 1.5) == doctest::Approx(dini_integral(h, 0.05, 1.5)).epsilon(1e-10));
  CHECK(smooth_theta(t, 0.2) == doctest::Approx(smooth_theta(h, 0.2)).epsilon(1e-8));
  // Constant beyond the last sample.
  CHECK(t.theta(5.0) == doctest::Approx(h.theta(2.0)));
}

TEST_CASE("smoothed modulus is nondecreasing and dominated") {
  const DiniParameter d = DiniParameter::holder(0.5, 1.0);
  double prev = 0.0;
  for (double r = 0.001; r < 1.0; r *= 1.5) {
    const double v = smooth_theta(d, r);
    CHECK(v >= prev);
    CHECK(v <= d.theta(4 * r));
    CHECK(v >= d.theta(r));
    prev = v;
  }
}

TEST_CASE("builtin domains: phi, gradient and modulus") {
  const GraphDomain bump = GraphDomain::quadratic_bump(3, 0.1);
  const Vec x = vec2(0.3, -0.4);
  CHECK(bump.phi(x) == doctest::Approx(0.025));
  CHECK(bump.grad_phi(x)(0) == doctest::Approx(0.06));
  CHECK(bump.dini().c_alpha() == doctest::Approx(0.2));

  const GraphDomain pw = GraphDomain::power_alpha(2, 0.2, 0.5);
  Vec t(1);
  t << 0.25;
  CHECK(pw.phi(t) == doctest::Approx(0.2 * std::pow(0.25, 1.5)));
  CHECK(pw.dini().alpha() == doctest::Approx(0.5));
  CHECK(pw.dini().c_alpha() == doctest::Approx(0.2 * 1.5 * std::pow(2.0, 0.5)));

  const GraphDomain cw = GraphDomain::cosine_window(2, 0.05, 1.5);
  t << 0.7;
  CHECK(cw.phi(t) == doctest::Approx(0.05 * (1 - std::cos(1.05))));
  CHECK(cw.grad_phi(t)(0) == doctest::Approx(0.05 * 1.5 * std::sin(1.05)));
}

TEST_CASE("gradient modulus bounds hold on random pairs") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const GraphDomain& dom : {GraphDomain::quadratic_bump(2, 0.05), GraphDomain::power_alpha(2, 0.1, 0.5),
                                 GraphDomain::cosine_window(2, 0.05, 1.5), GraphDomain::power_alpha(3, 0.1, 0.3)}) {
    for (int i = 0; i < 200; ++i) {
      Vec a(dom.dim() - 1), b(dom.dim() - 1);
      for (int k = 0; k < dom.dim() - 1; ++k) {
        a(k) = u(rng);
        b(k) = u(rng);
      }
      const double s = (a - b).norm();
      CHECK((dom.grad_phi(a) - dom.grad_phi(b)).norm() <= dom.dini().theta(s) * (1 + 1e-12) + 1e-15);
    }
  }
}

TEST_CASE("normal vector is unit, inward and orthogonal to the graph") {
  const GraphDomain dom = GraphDomain::quadratic_bump(3, 0.2);
  const Vec x = vec2(0.3, 0.1);
  const Vec n = normal_vector(dom, x);
  CHECK(n.norm() == doctest::Approx(1.0));
  CHECK(n(2) > 0);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const Vec tangent = (dom.boundary_point(xp) - dom.boundary_point(xm)) / (2 * h);
    CHECK(std::abs(tangent.dot(n)) < 1e-9);
  }
}

TEST_CASE("nearest boundary point agrees with a grid scan") {
  const GraphDomain dom = GraphDomain::cosine_window(2, 0.2, 3.0);
  const Vec p = vec2(0.4, 0.3);
  const NearestBoundary nb = nearest_boundary(dom, p);
  double best = 1e9;
  for (int i = -20000; i <= 20000; ++i) {
    Vec x(1);
    x << i * 1e-4;
    best = std::min(best, (dom.boundary_point(x) - p).norm());
  }
  CHECK(nb.dist == doctest::Approx(best).epsilon(1e-7));
  CHECK(dom.gap(nb.q) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  // First-order condition: p - q is parallel to the normal at q.
  const Vec n = normal_vector(dom, dom.tangential(nb.q));
  CHECK(std::abs((p - nb.q).normalized().dot(n)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(nearest_boundary(dom, vec2(0.0, -0.1)), Error);
  CHECK(nearest_boundary_closure(dom, nb.q).dist == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("flat distance is the height") {
  const GraphDomain dom = GraphDomain::flat(3);
  const NearestBoundary nb = nearest_boundary(dom, vec3(0.2, -0.1, 0.37));
  CHECK(nb.dist == doctest::Approx(0.37));
  CHECK(critical_scale(dom, vec3(0.0, 0.0, 0.5)).infinite());
}

TEST_CASE("critical scale solves r theta~(r) = dist") {
  const GraphDomain dom = GraphDomain::power_alpha(2, 0.05, 0.5);
  const Vec p = vec2(0.1, 0.01);
  const CriticalScale cs = critical_scale(dom, p);
  REQUIRE_FALSE(cs.infinite());
  CHECK(cs.r_cs >= cs.dist);
  CHECK(cs.r_cs * smooth_theta(dom.dini(), cs.r_cs) == doctest::Approx(cs.dist).epsilon(1e-10));
}

TEST_CASE("rescaling maps the boundary onto the rescaled boundary") {
  const GraphDomain dom = GraphDomain::quadratic_bump(2, 0.3);
  const Vec X = vec2(0.2, 0.05);
  const double r = 0.25;
  const GraphDomain s = dom.rescaled(X, r);
  for (double x : {-0.5, 0.0, 0.4, 1.1}) {
    Vec t(1);
    t << x;
    const Vec B = dom.boundary_point(t);
    const Vec Y = (B - X) / r;
    CHECK(s.gap(Y) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  }
  CHECK(s.dini().theta(1.0) == doctest::Approx(dom.dini().theta(r)));
}

TEST_CASE("admissibility thresholds") {
  const GraphDomain tiny = GraphDomain::quadratic_bump(2, 1e-3);
  const AdmissibilityReport ok = admissibility(tiny, 0.5);
  CHECK(ok.theta_8R == doctest::Approx(8e-3));
  CHECK(ok.admissible());
  const AdmissibilityReport bad = admissibility(GraphDomain::quadratic_bump(2, 0.05), 1.0);
  CHECK_FALSE(bad.theta_ok);
  CHECK(admissibility(GraphDomain::flat(2), 10.0).admissible());
}
