#include "freqlab/field.hpp"
#include "freqlab/mfs.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace freqlab;

namespace {

Vec random_point(std::mt19937_64& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec X(d);
  for (int i = 0; i < d; ++i) X(i) = u(rng);
  return X;
}

// Hessian by central differences of the value (independent of the field's own jet).
Mat hessian_fd(const Field& u, const Vec& X, double h) {
  const int d = u.dim();
  Mat H(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Vec ei = Vec::Zero(d), ej = Vec::Zero(d);
      ei(i) = h;
      ej(j) = h;
      H(i, j) = (u.value(X + ei + ej) - u.value(X + ei - ej) - u.value(X - ei + ej) + u.value(X - ei - ej)) / (4 * h * h);
    }
  return H;
}

}  // namespace

TEST_CASE("exact polynomials are harmonic, homogeneous and vanish on the flat boundary") {
  std::mt19937_64 rng(1);
  for (int d : {2, 3})
    for (int k = 1; k <= 6; ++k) {
      const auto P = exact_polynomial(d, k);
      for (int i = 0; i < 10; ++i) {
        Vec X = random_point(rng, d, -1.0, 1.0);
        const Jet j = P->jet(X);
        CHECK(std::abs(j.hess.trace()) < 1e-11);
        CHECK(P->value(2.0 * X) == doctest::Approx(std::pow(2.0, k) * j.value).scale(1.0).epsilon(1e-12));
        // Euler's identity X . grad P = k P.
        CHECK(X.dot(j.grad) == doctest::Approx(k * j.value).scale(1.0).epsilon(1e-12));
        X(d - 1) = 0.0;
        CHECK(std::abs(P->value(X)) < 1e-14);
      }
    }
}

TEST_CASE("two-dimensional exact polynomial is Im z^k") {
  std::mt19937_64 rng(2);
  for (int k = 1; k <= 7; ++k) {
    const auto P = exact_polynomial(2, k);
    const Vec X = random_point(rng, 2, -1.0, 1.0);
    CHECK(P->value(X) == doctest::Approx(std::pow(std::complex<double>(X(0), X(1)), k).imag()).scale(1.0).epsilon(1e-13));
  }
}

TEST_CASE("complex polynomial about a shifted center") {
  const std::vector<std::complex<double>> a{{0.1, 0.2}, 0.5, {0.0, 0.3}, 1.0};
  const std::complex<double> z0(0.2, -0.1);
  const auto P = im_complex_polynomial(a, z0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Vec X = random_point(rng, 2, -1.0, 1.0);
    const std::complex<double> z(X(0), X(1));
    std::complex<double> s = 0, ds = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      s += a[k] * std::pow(z - z0, static_cast<int>(k));
      if (k > 0) ds += a[k] * static_cast<double>(k) * std::pow(z - z0, static_cast<int>(k) - 1);
    }
    const ValueGrad vg = P->value_grad(X);
    CHECK(vg.value == doctest::Approx(s.imag()).scale(1.0).epsilon(1e-13));
    // Im f has gradient (Im f', Re f').
    CHECK(vg.grad(0) == doctest::Approx(ds.imag()).scale(1.0).epsilon(1e-13));
    CHECK(vg.grad(1) == doctest::Approx(ds.real()).scale(1.0).epsilon(1e-13));
  }
}

TEST_CASE("polynomial jet agrees with finite differences") {
  const auto P = exact_polynomial(3, 4);
  const Vec X = vec3(0.3, -0.2, 0.5);
  const Mat H = hessian_fd(*P, X, 1e-4);
  CHECK((P->jet(X).hess - H).norm() < 1e-6);
}

TEST_CASE("sum field is linear") {
  const auto a = exact_polynomial(2, 2), b = exact_polynomial(2, 3);
  const SumField s({a, b}, {2.0, -0.5});
  const Vec X = vec2(0.4, 0.7);
  CHECK(s.value(X) == doctest::Approx(2 * a->value(X) - 0.5 * b->value(X)));
  CHECK((s.jet(X).hess - (2 * a->jet(X).hess - 0.5 * b->jet(X).hess)).norm() < 1e-13);
}

TEST_CASE("rescaling normalizes the ball mean and removes u(X)") {
  const auto P = im_complex_polynomial({0.3, 1.0, 0.5});
  const GraphDomain dom = GraphDomain::flat(2);
  const Vec X = vec2(0.1, 0.4);
  const double r = 0.3;
  const auto T = rescale(P, dom, X, r);
  CHECK(T->value(Vec::Zero(2)) == doctest::Approx(0.0).scale(1.0));
  CHECK(T->value(vec2(0.5, 0.2)) == doctest::Approx((P->value(X + r * vec2(0.5, 0.2)) - P->value(X)) / T->norm()));
  // Mean square of T u over the unit ball is 1.
  QuadratureSpec s;
  s.tol = 1e-11;
  const double m = ball_integral([&](const Vec& Y) { const double v = T->value(Y); return v * v; },
                                 dom.rescaled(X, r), Vec::Zero(2), 1.0, s)[0];
  CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
  const auto c = std::make_shared<PolynomialField>(2, std::vector<PolynomialField::Term>{{1.0, {0, 0, 0}}}, "const");
  CHECK_THROWS_AS(rescale(c, dom, X, r), Error);
}

TEST_CASE("MFS recovers the exact polynomial on the flat domain") {
  const GraphDomain dom = GraphDomain::flat(2);
  const auto P = exact_polynomial(2, 3);
  const auto u = solve_mfs(dom, graph_adapted_data(dom, P));
  CHECK(u->diagnostics().graph_residual <= 1e-6);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    Vec X = random_point(rng, 2, -0.8, 0.8);
    X(1) = std::abs(X(1));
    CHECK(std::abs(u->value(X) - P->value(X)) < 1e-7);
  }
}

TEST_CASE("MFS field on a curved domain is harmonic and vanishes on the graph") {
  const GraphDomain dom = GraphDomain::quadratic_bump(2, 0.05);
  const auto u = solve_mfs(dom, graph_adapted_data(dom, exact_polynomial(2, 2)));
  const MfsDiagnostics& dg = u->diagnostics();
  CHECK(dg.graph_residual <= 1e-6);
  CHECK(dg.rank > 0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    Vec x(1);
    x << std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
    CHECK(std::abs(u->value(dom.boundary_point(x))) <= 1e-6 * dg.interior_rms);
    const Vec X = dom.boundary_point(x) + vec2(0.0, 0.3);
    CHECK(std::abs(u->laplacian(X)) < 1e-9);
    const Mat H = hessian_fd(*u, X, 1e-4);
    CHECK((u->jet(X).hess - H).norm() < 1e-5 * (1 + H.norm()));
  }
}

TEST_CASE("three-dimensional MFS reproduces x1 x3 on the flat domain") {
  const GraphDomain dom = GraphDomain::flat(3);
  const auto P = exact_polynomial(3, 2);
  const auto u = solve_mfs(dom, graph_adapted_data(dom, P));
  CHECK(u->diagnostics().graph_residual <= 1e-6);
  const Vec X = vec3(0.3, -0.2, 0.4);
  CHECK(std::abs(u->value(X) - P->value(X)) < 1e-6);
  CHECK(std::abs(u->laplacian(X)) < 1e-8);
}

TEST_CASE("Simon field satisfies its divergence-form equation") {
  for (double eps : {0.2, 0.3}) {
    const SimonFixture fx = simon_fixture(eps);
    std::mt19937_64 rng(6);
    for (int i = 0; i < 10; ++i) {
      const Vec X = random_point(rng, 3, -2.0, 2.0);
      CHECK(std::abs(simon_divergence_residual(*fx.field, X)) < 1e-8);
      // The coefficient is symmetric and positive definite for small eps.
      const Mat A = fx.coefficient(X(2));
      CHECK((A - A.transpose()).norm() == 0.0);
      CHECK(A(0, 0) - std::abs(A(0, 1)) > 0.0);
    }
  }
}

TEST_CASE("Simon critical set matches the closed form") {
  const double eps = 0.3;
  const SimonFixture fx = simon_fixture(eps, 12.0);
  const double pi = std::numbers::pi;
  // sin(2 eps z) = 0 on |z| <= 12: z = k pi / 0.6, k = -2..2.
  REQUIRE(fx.critical_z.size() == 5);
  REQUIRE(fx.singular_z.size() == 3);
  CHECK(fx.singular_z[2] == doctest::Approx(pi / eps));
  for (double z : fx.critical_z) {
    const ValueGrad vg = fx.field->value_grad(vec3(0.0, 0.0, z));
    CHECK(vg.grad.norm() < 1e-12);
  }
  for (double z : fx.singular_z) CHECK(std::abs(fx.field->value(vec3(0.0, 0.0, z))) < 1e-24);
  CHECK(fx.field->value(vec3(0.0, 0.0, pi / (2 * eps))) == doctest::Approx(1.0));
}
