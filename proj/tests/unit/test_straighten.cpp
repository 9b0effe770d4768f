#include "freqlab/mfs.hpp"
#include "freqlab/straighten.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace freqlab;

namespace {

std::shared_ptr<const MfsField> bump_field() {
  static const auto u = [] {
    const GraphDomain dom = GraphDomain::quadratic_bump(2, 0.05);
    return solve_mfs(dom, graph_adapted_data(dom, exact_polynomial(2, 3)));
  }();
  return u;
}

}  // namespace

TEST_CASE("mollifier moment identities") {
  for (int d : {2, 3}) {
    const Mollifier m(d);
    CHECK(m.mass() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m.gradient_mass().norm() < 1e-13);
    CHECK(m.radial_moment() == doctest::Approx(-(d - 1)).epsilon(1e-13));
    // Support is the open unit ball.
    CHECK(m.profile(Vec::Constant(d - 1, 1.0)) == 0.0);
    CHECK(m.profile(Vec::Zero(d - 1)) > 0.0);
  }
}

TEST_CASE("mollifier gradient agrees with differences of the profile") {
  const Mollifier m(3);
  Vec z(2);
  z << 0.3, -0.4;
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vec zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    CHECK(m.gradient(z)(i) == doctest::Approx((m.profile(zp) - m.profile(zm)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("flat boundary: G is the identity and A = I") {
  for (int d : {2, 3}) {
    const StraighteningMap map(GraphDomain::flat(d));
    std::mt19937_64 rng(d);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int i = 0; i < 10; ++i) {
      Vec z(d);
      for (int k = 0; k < d; ++k) z(k) = u(rng);
      z(d - 1) = std::abs(z(d - 1));
      CHECK((map.G(z) - z).norm() <= 1e-14);
      CHECK((map.A(z) - Mat::Identity(d, d)).norm() <= 1e-14);
    }
  }
}

TEST_CASE("DG agrees with differences of G and A is uniformly elliptic") {
  const StraighteningMap map(GraphDomain::cosine_window(2, 0.05, 1.5));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int i = 0; i < 10; ++i) {
    const Vec z = vec2(u(rng), 0.05 + std::abs(u(rng)));
    const Mat DG = map.DG(z);
    const Mat fd = map.DG_fd(z, 1e-5);
    CHECK((DG - fd).norm() <= 1e-8 * DG.norm());
    const Mat A = map.A(z);
    CHECK((A - A.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    CHECK(es.eigenvalues().minCoeff() > 0.5);
    // A = |det DG| DG^{-1} DG^{-T}.
    const Mat Jinv = DG.inverse();
    CHECK((A - std::abs(DG.determinant()) * Jinv * Jinv.transpose()).norm() < 1e-13);
  }
}

TEST_CASE("A tends to its boundary limit and the B-block parity") {
  const GraphDomain dom = GraphDomain::quadratic_bump(3, 0.1);
  const StraighteningMap map(dom);
  const Vec x = vec2(0.2, -0.1);
  // Independent form of the limit: c diag((I + g g^T)^{-1}, 1).
  const Vec g = dom.grad_phi(x);
  const double c = std::sqrt(1 + g.squaredNorm());
  Mat expect = Mat::Zero(3, 3);
  expect.topLeftCorner(2, 2) = c * (Mat::Identity(2, 2) + g * g.transpose()).inverse();
  expect(2, 2) = c;
  CHECK((map.A_boundary(x) - expect).norm() < 1e-13);
  const Vec z = vec3(x(0), x(1), 1e-6);
  CHECK((map.A(z) - expect).norm() < 1e-5);
  const Vec zm = vec3(x(0), x(1), -0.05), zp = vec3(x(0), x(1), 0.05);
  const Mat Am = map.A_tilde(zm), Ap = map.A_tilde(zp);
  CHECK((Am.topLeftCorner(2, 2) - Ap.topLeftCorner(2, 2)).norm() < 1e-15);
  CHECK(Am(2, 2) == Ap(2, 2));
  CHECK((Am.topRightCorner(2, 1) + Ap.topRightCorner(2, 1)).norm() < 1e-15);
}

TEST_CASE("working ball keeps det DG within [1/2, 3/2]") {
  const StraighteningMap map(GraphDomain::quadratic_bump(2, 0.05));
  const WorkingBall wb = map.find_working_ball(0.5);
  CHECK(wb.radius > 0.0);
  CHECK(wb.radius <= 0.5);
  CHECK(wb.det_min >= 0.5);
  CHECK(wb.det_max <= 1.5);
  CHECK(map.self_check(vec2(0.1, 0.1)) < 1e-4);
}

TEST_CASE("extended field is odd in s and matches u o G above") {
  const auto u = bump_field();
  auto map = std::make_shared<StraighteningMap>(GraphDomain::quadratic_bump(2, 0.05));
  const auto ut = extend_field(u, map, map->find_working_ball(0.5).radius);
  const Vec z = vec2(0.1, 0.12);
  CHECK(ut->value(z) == doctest::Approx(u->value(map->G(z))).epsilon(1e-14));
  CHECK(ut->value(vec2(0.1, -0.12)) == doctest::Approx(-ut->value(z)).epsilon(1e-14));
  CHECK(std::abs(ut->value(vec2(0.1, 0.0))) < 1e-6);
  // Chain rule: grad u~ = DG^T grad u(G).
  const Vec g = map->DG(z).transpose() * u->value_grad(map->G(z)).grad;
  CHECK((ut->value_grad(z).grad - g).norm() < 1e-12 * (1 + g.norm()));
  CHECK_THROWS_AS(ut->value(vec2(5.0, 0.1)), Error);
}

TEST_CASE("split ball integral measures the ball") {
  PointIntegrand one = [](const Vec&, double* o) { o[0] = 1.0; };
  QuadratureSpec s;
  s.tol = 1e-12;
  CHECK(split_ball_integral(one, 1, 2, vec2(0.0, 0.03), 0.1, s)[0] == doctest::Approx(std::numbers::pi * 0.01).epsilon(1e-10));
  CHECK(split_ball_integral(one, 1, 3, vec3(0.0, 0.0, -0.02), 0.1, s)[0] ==
        doctest::Approx(4.0 / 3.0 * std::numbers::pi * 1e-3).epsilon(1e-10));
  PointIntegrand s2 = [](const Vec& z, double* o) { o[0] = z(1) * z(1); };
  // ∫ s^2 over the disk of radius r centered at height c: π r^4/4 + π r^2 c^2.
  CHECK(split_ball_integral(s2, 1, 2, vec2(0.2, 0.04), 0.1, s)[0] ==
        doctest::Approx(std::numbers::pi * (1e-4 / 4 + 0.01 * 0.0016)).epsilon(1e-10));
}

TEST_CASE("extended field is a weak solution across s = 0") {
  const auto u = bump_field();
  auto map = std::make_shared<StraighteningMap>(GraphDomain::quadratic_bump(2, 0.05));
  const auto ut = extend_field(u, map, map->find_working_ball(0.5).radius);
  for (const Vec& c : {vec2(0.1, 0.01), vec2(-0.05, 0.2)}) {
    const WeakResidual w = weak_residual(*map, *ut, c, 0.08);
    CHECK(w.straddles == (std::abs(c(1)) < 0.08));
    CHECK(std::abs(w.normalized) <= 1e-5);
  }
  const ConormalJump cj = conormal_jump(*map, *ut, Vec::Constant(1, 0.1), 0.01, 4);
  CHECK(cj.h.size() == 4);
  CHECK(std::abs(cj.extrapolated) <= 1e-6 * (1 + cj.flux_scale));
  // The off-diagonal block decays with h.
  CHECK(cj.b_block.back() < cj.b_block.front());
}

TEST_CASE("modulus certificate is finite for the domain's own exponent") {
  const StraighteningMap map(GraphDomain::quadratic_bump(2, 0.05));
  const auto levels = holder_pair_levels(2, 0.4, 0.1, 4, 10, 1);
  REQUIRE(levels.size() == 4);
  std::vector<HolderPair> all;
  for (const auto& l : levels) all.insert(all.end(), l.begin(), l.end());
  const HolderCertificate hc = modulus_certificate(map, 1.0, all);
  CHECK(std::isfinite(hc.constant));
  CHECK(hc.constant > 0.0);
  CHECK(hc.pairs == all.size());
  // Deterministic in the seed.
  const auto again = holder_pair_levels(2, 0.4, 0.1, 4, 10, 1);
  CHECK((again[3].back().z1 - levels[3].back().z1).norm() == 0.0);
}

TEST_CASE("doubling certificate of a linear field is 2^(d+2)") {
  auto map = std::make_shared<StraighteningMap>(GraphDomain::flat(2));
  const auto ut = extend_field(exact_polynomial(2, 1), map, 0.5);
  QuadratureSpec q;
  q.radial = 8;
  q.angular = 8;
  q.tol = 1e-8;
  const auto samples = doubling_samples(2, 0.5, 10, 3);
  const DoublingCertificate dc = doubling_certificate(*ut, samples, q, 1);
  CHECK(dc.sup_ratio == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(dc.samples == samples.size());
}
