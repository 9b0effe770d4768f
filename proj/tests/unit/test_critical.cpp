#include "freqlab/critical.hpp"
#include "freqlab/field.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace freqlab;

TEST_CASE("region membership") {
  const Region b = Region::box(vec2(-1, -1), vec2(1, 1));
  CHECK(b.contains(vec2(0.9, -0.9)));
  CHECK_FALSE(b.contains(vec2(1.1, 0.0)));
  const Region ball = Region::ball(vec2(0, 0), 0.5);
  CHECK_FALSE(ball.contains(vec2(0.45, 0.45)));
  const Region db = Region::domain_ball(GraphDomain::quadratic_bump(2, 0.5), vec2(0, 0), 0.5);
  CHECK(db.contains(vec2(0.0, 0.0)));
  CHECK_FALSE(db.contains(vec2(0.2, 0.0)));
}

TEST_CASE("critical points of Im(z^3 - 3z) + c are z = ±1") {
  // f' = 3z^2 - 3; adding a constant makes the points regular-valued.
  for (double c : {0.0, 0.5}) {
    const auto u = im_complex_polynomial({{0.0, c}, -3.0, 0.0, 1.0});
    const CriticalSetEstimate est = find_critical_points(*u, Region::box(vec2(-2, -2), vec2(2, 2)));
    REQUIRE(est.points.size() == 2);
    CHECK(est.points[0].x(0) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(est.points[1].x(0) == doctest::Approx(1.0).epsilon(1e-10));
    for (const CriticalPoint& p : est.points) {
      CHECK(std::abs(p.x(1)) < 1e-10);
      CHECK(p.singular == (c == 0.0));
      CHECK(p.grad_norm <= 1e-10 * est.grad_scale);
      CHECK_FALSE(p.fallback);
    }
  }
}

TEST_CASE("degenerate zero of Im z^3 is found") {
  const auto u = exact_polynomial(2, 3);
  const CriticalSetEstimate est = find_critical_points(*u, Region::box(vec2(-1, -1), vec2(1, 1)));
  REQUIRE(est.points.size() == 1);
  CHECK(est.points[0].x.norm() < 1e-5);
  CHECK(est.singular_count() == 1);
}

TEST_CASE("points agree with a brute-force grid minimum of |grad u|") {
  const auto u = im_complex_polynomial({0.0, 0.4, -0.3, 0.2, 0.5});
  const CriticalSetEstimate est = find_critical_points(*u, Region::box(vec2(-1.5, -1.5), vec2(1.5, 1.5)));
  REQUIRE_FALSE(est.points.empty());
  for (const CriticalPoint& p : est.points) {
    double best = 1e300;
    Vec arg;
    for (int i = -300; i <= 300; ++i)
      for (int j = -300; j <= 300; ++j) {
        const Vec X = p.x + vec2(i * 1e-4, j * 1e-4);
        const double g = u->value_grad(X).grad.norm();
        if (g < best) {
          best = g;
          arg = X;
        }
      }
    CHECK((arg - p.x).norm() < 2e-4);
  }
}

TEST_CASE("critical line of x1 x3 uses minimum-norm steps") {
  const auto u = exact_polynomial(3, 2);
  CriticalOptions opt;
  opt.seed_spacing = 0.25;
  const CriticalSetEstimate est = find_critical_points(*u, Region::box(vec3(-1, -1, -1), vec3(1, 1, 1)), opt);
  REQUIRE_FALSE(est.points.empty());
  for (const CriticalPoint& p : est.points) {
    CHECK(std::abs(p.x(0)) < 1e-8);
    CHECK(std::abs(p.x(2)) < 1e-8);
    CHECK(p.singular);
  }
}

TEST_CASE("greedy net is separated and covering") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> pts;
  for (int i = 0; i < 500; ++i) pts.push_back(vec2(u(rng), u(rng)));
  const double sep = 0.1;
  const std::vector<Vec> net = greedy_net(pts, sep);
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j) CHECK((net[i] - net[j]).norm() >= sep);
  for (const Vec& p : pts) {
    double best = 1e9;
    for (const Vec& q : net) best = std::min(best, (p - q).norm());
    CHECK(best < sep);
  }
}

TEST_CASE("content count of nondegenerate critical points stays bounded") {
  // Im(z^3 - 3z): two nondegenerate points at z = ±1.
  const auto u = im_complex_polynomial({0.0, -3.0, 0.0, 1.0});
  const auto rows = minkowski_content(*u, Region::box(vec2(-2, -2), vec2(2, 2)), {0.2, 0.1, 0.05});
  REQUIRE(rows.size() == 3);
  for (const ContentRow& r : rows) {
    CHECK_FALSE(r.degenerate);
    CHECK(r.count >= 2);
    CHECK(r.count <= 8);
    // d = 2: count * r^0.
    CHECK(r.count_r_pow == doctest::Approx(static_cast<double>(r.count)));
  }
}

TEST_CASE("content count of a critical segment scales like 1/r") {
  const auto u = exact_polynomial(3, 2);
  const auto rows = minkowski_content(*u, Region::box(vec3(-1, -1, -1), vec3(1, 1, 1)), {0.1, 0.05});
  REQUIRE(rows.size() == 2);
  // count * r approaches a fixed multiple of the segment length.
  CHECK(rows[1].count_r_pow == doctest::Approx(rows[0].count_r_pow).epsilon(0.05));
  CHECK(rows[1].count > rows[0].count);
}

TEST_CASE("theorem pipeline on a flat homogeneous field") {
  const GraphDomain dom = GraphDomain::flat(2);
  const PipelineReport rep = theorem_pipeline(dom, exact_polynomial(2, 2), 0.5);
  CHECK(rep.passed);
  CHECK(rep.Lambda == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(rep.total_points >= 1);
}
