#pragma once

#include "freqlab/geometry.hpp"
#include "freqlab/integrate1d.hpp"

#include <functional>

namespace freqlab {

struct QuadratureSpec {
  int radial = 16;   // Gauss-Legendre panel order in the radius
  int angular = 32;  // panel order along arcs / initial trapezoid count in azimuth
  double tol = 1e-8;
  int max_depth = 12;

  QuadratureSpec refined() const;  // doubled orders, tolerance / 100
};

// Integrands write `components` values for the point X.
using PointIntegrand = std::function<void(const Vec& X, double* out)>;
// Boundary integrands also receive the inward unit normal at X.
using PatchIntegrand = std::function<void(const Vec& X, const Vec& n_inward, double* out)>;

// Integral over B_r(p) ∩ D (or the annulus r_inner < |X - p| < r), polar about p.
QuadResult ball_integral(const PointIntegrand& f, int components, const GraphDomain& domain, const Vec& p,
                         double r, const QuadratureSpec& spec, double r_inner = 0.0);

// Integral over ∂B_r(p) ∩ D with respect to surface measure.
QuadResult sphere_cap_integral(const PointIntegrand& f, int components, const GraphDomain& domain,
                               const Vec& p, double r, const QuadratureSpec& spec);

// Integral over the graph patch {(x, phi(x)) : |(x, phi(x)) - p| < r}.
QuadResult boundary_patch_integral(const PatchIntegrand& f, int components, const GraphDomain& domain,
                                   const Vec& p, double r, const QuadratureSpec& spec);

// Integral over the rim ∂B_r(p) ∩ ∂D with respect to (d-2)-dimensional measure
// (a sum over the two rim points in d = 2, arc length in d = 3).
QuadResult sphere_rim_integral(const PointIntegrand& f, int components, const GraphDomain& domain, const Vec& p,
                               double r, const QuadratureSpec& spec);

// Scalar conveniences.
QuadResult ball_integral(const std::function<double(const Vec&)>& f, const GraphDomain& domain, const Vec& p,
                         double r, const QuadratureSpec& spec);
QuadResult sphere_cap_integral(const std::function<double(const Vec&)>& f, const GraphDomain& domain,
                               const Vec& p, double r, const QuadratureSpec& spec);
QuadResult boundary_patch_integral(const std::function<double(const Vec&)>& f, const GraphDomain& domain,
                                   const Vec& p, double r, const QuadratureSpec& spec);

}  // namespace freqlab
