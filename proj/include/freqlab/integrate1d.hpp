#pragma once

#include <array>
#include <functional>
#include <vector>

namespace freqlab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per order; safe to call concurrently.
const GaussRule& gauss_legendre(int n);

inline constexpr int kMaxComponents = 8;
using Values = std::array<double, kMaxComponents>;

// Vector-valued integral with per-component error estimates.
struct QuadResult {
  int components = 1;
  Values value{};
  Values error{};
  bool converged = true;

  double operator[](int i) const { return value[static_cast<std::size_t>(i)]; }
  QuadResult& operator+=(const QuadResult& other);
  QuadResult scaled(double factor) const;
};

using LineIntegrand = std::function<void(double t, double* out)>;

// Adaptive bisection with an n-point Gauss-Legendre panel; a panel is accepted when
// one split changes it by less than tol_rel * max(integral of |f|, abs_floor) * (panel fraction).
QuadResult adaptive_gauss(const LineIntegrand& f, int components, double a, double b, int n,
                          double tol_rel, int max_depth, const Values& abs_floor = Values{});

// Periodic trapezoid on [0, period) with node doubling from n0 until two successive
// estimates agree to tol_rel; f is evaluated only at new nodes.
QuadResult periodic_trapezoid(const LineIntegrand& f, int components, double period, int n0,
                              double tol_rel, int max_doublings);

}  // namespace freqlab
