#include "freqlab/frequency.hpp"
#include "freqlab/mfs.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace freqlab;

namespace {

QuadratureSpec tight() {
  QuadratureSpec s;
  s.tol = 1e-11;
  return s;
}

}  // namespace

TEST_CASE("homogeneous polynomials have constant frequency k at the origin") {
  for (int d : {2, 3})
    for (int k = 1; k <= (d == 2 ? 4 : 3); ++k) {
      const auto P = exact_polynomial(d, k);
      const GraphDomain dom = GraphDomain::flat(d);
      for (double r : {0.1, 0.5, 1.0}) {
        const FrequencyReport f = frequency_report(*P, dom, Vec::Zero(d), r, tight());
        CHECK(f.N_C == doctest::Approx(k).epsilon(1e-9));
        CHECK(f.N_S == doctest::Approx(f.N_C).epsilon(1e-12));
        CHECK(f.converged);
      }
    }
}

TEST_CASE("interior frequency of 2xy matches its closed form") {
  // About p = (0, h) with r < h: N_C = (4h^2 + 2r^2) / (r^2 + 4h^2).
  const auto P = exact_polynomial(2, 2);
  const double h = 0.5;
  for (double r : {0.1, 0.3, 0.45}) {
    const FrequencyReport f = frequency_report(*P, GraphDomain::flat(2), vec2(0.0, h), r, tight());
    CHECK(f.N_C == doctest::Approx((4 * h * h + 2 * r * r) / (r * r + 4 * h * h)).epsilon(1e-10));
    CHECK(f.D == doctest::Approx(4 * std::numbers::pi * r * r * h * h + 2 * std::numbers::pi * std::pow(r, 4)).epsilon(1e-10));
  }
}

TEST_CASE("interior frequency is nondecreasing in r") {
  const auto P = im_complex_polynomial({0.0, 0.5, 0.3, 1.0, 0.2});
  const GraphDomain dom = GraphDomain::flat(2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec p = vec2(u(rng) - 0.5, 0.3 + 0.5 * u(rng));
    const double r1 = 0.02 + 0.1 * u(rng), r2 = r1 + 0.15 * u(rng) + 1e-3;
    if (r2 >= p(1)) continue;
    CHECK(frequency_report(*P, dom, p, r1, tight()).N_C <= frequency_report(*P, dom, p, r2, tight()).N_C + 1e-9);
  }
}

TEST_CASE("derivative terms reproduce finite differences") {
  const auto P = im_complex_polynomial({0.1, 0.5, 0.3, 1.0});
  const GraphDomain dom = GraphDomain::flat(2);
  // One interior sample and one crossing sample.
  for (const auto& [p, r] : {std::pair{vec2(0.1, 0.5), 0.3}, std::pair{vec2(0.05, 0.1), 0.3}}) {
    const DerivativeTerms t = derivative_terms(*P, dom, p, r, tight());
    const double fd = frequency_derivative_fd(*P, dom, p, r, 1e-3, tight());
    CHECK(t.exact() == doctest::Approx(fd).epsilon(1e-5));
    if (t.interior) {
      CHECK(t.literal() == doctest::Approx(fd).epsilon(1e-5));
      CHECK(t.R_b == 0.0);
    }
  }
}

TEST_CASE("R_h and R_b are nonnegative on a flat boundary") {
  const auto P = exact_polynomial(2, 2);
  const DerivativeTerms t = derivative_terms(*P, GraphDomain::flat(2), vec2(0.2, 0.05), 0.3, tight());
  CHECK_FALSE(t.interior);
  CHECK(t.R_h >= 0.0);
  CHECK(t.R_b >= -1e-12);
}

TEST_CASE("doubling exponent of a homogeneous polynomial is d + 2k") {
  for (int d : {2, 3})
    for (int k = 1; k <= 2; ++k) {
      const DoublingReport rep = doubling_ratios(*exact_polynomial(d, k), GraphDomain::flat(d), Vec::Zero(d), 0.25, 2.0, tight());
      CHECK(rep.exponent == doctest::Approx(d + 2 * k).epsilon(1e-9));
      CHECK(rep.ratio == doctest::Approx(std::pow(2.0, d + 2 * k)).epsilon(1e-9));
    }
}

TEST_CASE("sphere ratio vanishes where u(p) = 0 and has the dist^(3/4) predictor") {
  const auto P = exact_polynomial(2, 2);
  const SphereRatio a = sphere_ratio(*P, GraphDomain::flat(2), vec2(0.0, 0.1), 0.4, tight());
  CHECK(a.ratio < 1e-12);
  CHECK(a.dist == doctest::Approx(0.1));
  CHECK(a.predictor == doctest::Approx(std::pow(0.25, 0.75)));
  const SphereRatio b = sphere_ratio(*P, GraphDomain::flat(2), vec2(0.3, 0.05), 0.4, tight());
  CHECK(b.ratio > 0.0);
}

TEST_CASE("boundary frequency on a flat boundary is the plain frequency") {
  const auto P = exact_polynomial(2, 3);
  const BoundaryFrequency b = boundary_frequency(*P, GraphDomain::flat(2), Vec::Zero(2), 0.5, 1.0, tight());
  CHECK(b.offset == 0.0);
  CHECK(b.dini == 0.0);
  CHECK(b.N_X == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("boundary frequency on a curved boundary uses the offset center") {
  const GraphDomain dom = GraphDomain::quadratic_bump(2, 0.05);
  const auto u = solve_mfs(dom, graph_adapted_data(dom, exact_polynomial(2, 2)));
  // theta(4r) < 1/26 needs r < 0.096 here.
  const double r = 0.05;
  const BoundaryFrequency b = boundary_frequency(*u, dom, Vec::Zero(2), r, 1.0);
  CHECK(b.offset == doctest::Approx(3 * r * smooth_theta(dom.dini(), r)));
  CHECK(b.N_X == doctest::Approx(b.N_hat * std::exp(b.dini)));
  CHECK(b.N_X == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("pinch is nonnegative and vanishes for affine data") {
  const GraphDomain dom = GraphDomain::flat(2);
  const auto affine = im_complex_polynomial({0.3, {1.0, 0.2}});
  CHECK(std::abs(pinch(*affine, dom, vec2(0.0, 0.6), 0.2, tight())) < 1e-20);
  const auto P = im_complex_polynomial({0.0, 0.5, 0.3, 1.0, 0.2});
  CHECK(pinch(*P, dom, vec2(0.1, 0.6), 0.2, tight()) > 0.0);
}

TEST_CASE("spatial variation on a centered homogeneous polynomial") {
  const auto P = exact_polynomial(2, 2);
  const SpatialVariation sv = spatial_variation_check(*P, GraphDomain::flat(2), vec2(0.05, 0.6), vec2(-0.05, 0.6), 0.2, tight());
  // Symmetric points: equal frequencies.
  CHECK(sv.lhs < 1e-10);
  CHECK(sv.W1 == doctest::Approx(sv.W2).epsilon(1e-8));
}

TEST_CASE("frequency errors for bad radii") {
  CHECK_THROWS_AS(frequency_report(*exact_polynomial(2, 1), GraphDomain::flat(2), vec2(0.0, 0.1), 0.0), Error);
}
