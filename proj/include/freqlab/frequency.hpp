#pragma once

#include "freqlab/field.hpp"
#include "freqlab/geometry.hpp"
#include "freqlab/quadrature.hpp"

#include <vector>

namespace freqlab {

struct FrequencyReport {
  Vec p;
  double r = 0.0;
  double u_p = 0.0;
  double D = 0.0;    // ∬_{B_r(p) ∩ D} |∇u|^2
  double H_S = 0.0;  // ∫_{∂B_r(p) ∩ D} u^2
  double H_C = 0.0;  // ∫_{∂B_r(p) ∩ D} (u - u(p))^2
  double N_S = 0.0;  // r D / H_S
  double N_C = 0.0;  // r D / H_C
  double err_D = 0.0, err_H_S = 0.0, err_H_C = 0.0;
  bool converged = true;
};

FrequencyReport frequency_report(const Field& u, const GraphDomain& domain, const Vec& p, double r,
                                 const QuadratureSpec& spec = {});

// Terms of the radial derivative of N_C. Normal derivatives use the outward normal of D.
struct DerivativeTerms {
  FrequencyReport base;
  double dist = 0.0;  // dist(p, ∂D)
  bool interior = true;  // r < dist
  double R_h = 0.0;
  double R_b = 0.0;
  double Err_r = 0.0;  // 2 u(p) ∫_{B_r ∩ ∂D} ∂_n u / H_C
  // -(1/H_C) d/dr of H_C through the motion of the rim ∂B_r ∩ ∂D, where u - u(p) = -u(p).
  double Rim_r = 0.0;

  double with_N_err() const { return R_h + R_b + base.N_C * Err_r; }
  double literal() const { return R_h + R_b + Err_r; }
  double exact() const { return R_h + R_b + base.N_C * (Err_r + Rim_r); }
};

DerivativeTerms derivative_terms(const Field& u, const GraphDomain& domain, const Vec& p, double r,
                                 const QuadratureSpec& spec = {});

// Central difference of N_C in r with step rel_step * r.
double frequency_derivative_fd(const Field& u, const GraphDomain& domain, const Vec& p, double r,
                               double rel_step = 1e-3, const QuadratureSpec& spec = {});

struct BoundaryFrequency {
  Vec X;
  double r = 0.0;
  double C = 1.0;
  Vec center;  // X + 3 r theta~(r) e_d
  double offset = 0.0;
  double N_hat = 0.0;  // N_S at the offset center
  double dini = 0.0;   // ∫_0^r theta(s)/s ds
  double N_X = 0.0;    // N_hat exp(C dini)
};

BoundaryFrequency boundary_frequency(const Field& u, const GraphDomain& domain, const Vec& X, double r,
                                     double C = 1.0, const QuadratureSpec& spec = {});

// W(X, r) = N_C(X, 3r/2) - N_C(X, r/2); computed as ∫_{r/2}^{3r/2} R_h when B_{3r/2}(X) ⊂ D.
double pinch(const Field& u, const GraphDomain& domain, const Vec& X, double r, const QuadratureSpec& spec = {});

struct DoublingReport {
  double a = 2.0;
  double rho = 0.0;
  double inner = 0.0;  // ∬_{B_rho} |u - u(X)|^2
  double outer = 0.0;  // ∬_{B_{a rho}} |u - u(X)|^2
  double ratio = 0.0;
  double exponent = 0.0;  // log(ratio) / log(a)
  double dist = 0.0;
  double sphere_ratio = 0.0;  // |H_C / H_S - 1| at radius rho
  double sphere_predictor = 0.0;  // (dist / rho)^{3/4}
};

DoublingReport doubling_ratios(const Field& u, const GraphDomain& domain, const Vec& X, double rho, double a,
                               const QuadratureSpec& spec = {});

// |H_C / H_S - 1| at (p, r) with the predictor (dist / r)^{3/4}.
struct SphereRatio {
  double dist = 0.0;
  double ratio = 0.0;
  double predictor = 0.0;
};

SphereRatio sphere_ratio(const Field& u, const GraphDomain& domain, const Vec& p, double r,
                         const QuadratureSpec& spec = {});

// Err(p, r) with counting measure on the supplied points.
double err_beta(const Field& u, const GraphDomain& domain, const Vec& p, double r, const std::vector<Vec>& points,
                const QuadratureSpec& spec = {});

struct SpatialVariation {
  double lhs = 0.0;        // |N_C(X1, r) - N_C(X2, r)|
  double rhs_core = 0.0;   // W^{1/2}(X1, r) + W^{1/2}(X2, r)
  double value_lhs = 0.0;  // |u(X1) - u(X2)|
  double value_rhs_core = 0.0;  // rhs_core * (mean of |u - u(X1)|^2 on B_r(X1))^{1/2}
  double W1 = 0.0, W2 = 0.0;
};

SpatialVariation spatial_variation_check(const Field& u, const GraphDomain& domain, const Vec& X1, const Vec& X2,
                                         double r, const QuadratureSpec& spec = {});

// Mean of |u - u(p)|^2 over B_r(p) ∩ D divided by the mean of u^2 over B_r(p~) ∩ D, p~ the nearest
// boundary point; with sphere = true both means are taken over the spheres instead.
double boundary_comparison_ratio(const Field& u, const GraphDomain& domain, const Vec& p, double r, bool sphere,
                                 const QuadratureSpec& spec = {});

}  // namespace freqlab
