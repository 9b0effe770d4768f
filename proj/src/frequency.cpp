#include "freqlab/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace freqlab {

namespace {

constexpr const char* kModule = "frequency";

void check_args(const GraphDomain& domain, const Vec& p, double r, const char* op) {
  if (p.size() != domain.dim()) fail(ErrorKind::Domain, kModule, op, "point dimension mismatch");
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::Domain, kModule, op, "r must be positive and finite");
  if (domain.gap(p) < -1e-12 * std::max(1.0, p.norm()))
    fail(ErrorKind::Domain, kModule, op, "center outside the closed domain: " + format_point(p));
}

// ∬_{B_r(p) ∩ D} |u - c|^2 and the measure of B_r(p) ∩ D.
std::pair<double, double> mass_and_volume(const Field& u, const GraphDomain& domain, const Vec& p, double r, double c,
                                          const QuadratureSpec& spec) {
  const QuadResult q = ball_integral(
      [&](const Vec& X, double* out) {
        const double v = u.value(X) - c;
        out[0] = v * v;
        out[1] = 1.0;
      },
      2, domain, p, r, spec);
  return {q[0], q[1]};
}

double ball_volume(int d, double r) { return d == 2 ? M_PI * r * r : 4.0 / 3.0 * M_PI * r * r * r; }

}  // namespace

FrequencyReport frequency_report(const Field& u, const GraphDomain& domain, const Vec& p, double r,
                                 const QuadratureSpec& spec) {
  check_args(domain, p, r, "frequency_report");
  FrequencyReport rep;
  rep.p = p;
  rep.r = r;
  rep.u_p = u.value(p);
  const QuadResult qd = ball_integral(
      [&](const Vec& X, double* out) { out[0] = u.value_grad(X).grad.squaredNorm(); }, 1, domain, p, r, spec);
  const double up = rep.u_p;
  const QuadResult qh = sphere_cap_integral(
      [&](const Vec& X, double* out) {
        const double v = u.value(X);
        out[0] = v * v;
        out[1] = (v - up) * (v - up);
      },
      2, domain, p, r, spec);
  rep.D = qd[0];
  rep.H_S = qh[0];
  rep.H_C = qh[1];
  rep.err_D = qd.error[0];
  rep.err_H_S = qh.error[0];
  rep.err_H_C = qh.error[1];
  rep.converged = qd.converged && qh.converged;
  if (!(rep.H_C > 0.0) || (rep.D == 0.0 && rep.H_C <= 1e-28 * std::max(rep.H_S, 1e-300))) {
    std::ostringstream os;
    os << "H_C vanishes at p=" << format_point(p) << ", r=" << r << ": u is constant on the sphere";
    fail(ErrorKind::Degenerate, kModule, "frequency_report", os.str());
  }
  rep.N_C = r * rep.D / rep.H_C;
  rep.N_S = rep.H_S > 0.0 ? r * rep.D / rep.H_S : std::numeric_limits<double>::infinity();
  return rep;
}

DerivativeTerms derivative_terms(const Field& u, const GraphDomain& domain, const Vec& p, double r,
                                 const QuadratureSpec& spec) {
  DerivativeTerms t;
  t.base = frequency_report(u, domain, p, r, spec);
  t.dist = nearest_boundary_closure(domain, p).dist;
  t.interior = r < t.dist;
  const double up = t.base.u_p;
  const double k = t.base.N_C / r;
  const QuadResult qs = sphere_cap_integral(
      [&](const Vec& X, double* out) {
        const ValueGrad vg = u.value_grad(X);
        const double drho = vg.grad.dot(X - p) / r;
        const double e = drho - k * (vg.value - up);
        out[0] = e * e;
      },
      1, domain, p, r, spec);
  t.R_h = 2.0 * r / t.base.H_C * qs[0];
  if (t.interior) return t;

  const QuadResult qb = boundary_patch_integral(
      [&](const Vec& X, const Vec& n_in, double* out) {
        const double dn = -u.value_grad(X).grad.dot(n_in);
        out[0] = dn * dn * (X - p).dot(-n_in);
        out[1] = dn;
      },
      2, domain, p, r, spec);
  t.R_b = qb[0] / t.base.H_C;
  t.Err_r = 2.0 * up * qb[1] / t.base.H_C;

  if (up != 0.0) {
    const int d = domain.dim();
    const QuadResult qr = sphere_rim_integral(
        [&](const Vec& X, double* out) {
          Vec g(d);
          g.head(d - 1) = -domain.grad_phi(domain.tangential(X));
          g[d - 1] = 1.0;
          const Vec w = (X - p) / r;
          const double gw = g.dot(w);
          out[0] = gw / (g - gw * w).norm();
        },
        1, domain, p, r, spec);
    t.Rim_r = -up * up * qr[0] / t.base.H_C;
  }
  return t;
}

double frequency_derivative_fd(const Field& u, const GraphDomain& domain, const Vec& p, double r, double rel_step,
                               const QuadratureSpec& spec) {
  if (!(rel_step > 0.0 && rel_step < 0.5)) fail(ErrorKind::Domain, kModule, "frequency_derivative_fd", "bad step");
  const double h = rel_step * r;
  const double np = frequency_report(u, domain, p, r + h, spec).N_C;
  const double nm = frequency_report(u, domain, p, r - h, spec).N_C;
  return (np - nm) / (2.0 * h);
}

BoundaryFrequency boundary_frequency(const Field& u, const GraphDomain& domain, const Vec& X, double r, double C,
                                     const QuadratureSpec& spec) {
  const char* op = "boundary_frequency";
  if (X.size() != domain.dim()) fail(ErrorKind::Domain, kModule, op, "point dimension mismatch");
  if (std::abs(domain.gap(X)) > 1e-10 * std::max(1.0, X.norm()))
    fail(ErrorKind::Domain, kModule, op, "X is not on the boundary: " + format_point(X));
  if (!(r > 0.0)) fail(ErrorKind::Domain, kModule, op, "r must be positive");
  const double th4 = domain.dini().theta(4.0 * r);
  if (!(th4 < 1.0 / 26.0)) {
    std::ostringstream os;
    os << "theta(4r) = " << th4 << " >= 1/26 at r = " << r;
    fail(ErrorKind::Precondition, kModule, op, os.str());
  }
  BoundaryFrequency bf;
  bf.X = X;
  bf.r = r;
  bf.C = C;
  bf.offset = 3.0 * r * smooth_theta(domain.dini(), r);
  bf.center = X;
  bf.center[domain.dim() - 1] += bf.offset;
  if (bf.offset > 0.0 && !domain.contains(bf.center))
    fail(ErrorKind::Domain, "geometry", op, "offset center outside D: " + format_point(bf.center));
  bf.N_hat = frequency_report(u, domain, bf.center, r, spec).N_S;
  bf.dini = domain.dini().is_zero() ? 0.0 : dini_integral(domain.dini(), 0.0, r);
  bf.N_X = bf.N_hat * std::exp(C * bf.dini);
  return bf;
}

double pinch(const Field& u, const GraphDomain& domain, const Vec& X, double r, const QuadratureSpec& spec) {
  check_args(domain, X, r, "pinch");
  if (nearest_boundary_closure(domain, X).dist <= 1.5 * r)
    return frequency_report(u, domain, X, 1.5 * r, spec).N_C - frequency_report(u, domain, X, 0.5 * r, spec).N_C;
  // Interior: N_C' = R_h >= 0, and integrating R_h avoids the cancellation in the difference.
  // R_h is analytic in s here, so a fixed 16-point rule suffices.
  const GaussRule& rule = gauss_legendre(16);
  double W = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    W += 0.5 * r * rule.weights[k] * derivative_terms(u, domain, X, r * (1.0 + 0.5 * rule.nodes[k]), spec).R_h;
  return W;
}

SphereRatio sphere_ratio(const Field& u, const GraphDomain& domain, const Vec& p, double r,
                         const QuadratureSpec& spec) {
  check_args(domain, p, r, "sphere_ratio");
  SphereRatio s;
  s.dist = nearest_boundary_closure(domain, p).dist;
  const double up = u.value(p);
  const QuadResult q = sphere_cap_integral(
      [&](const Vec& X, double* out) {
        const double v = u.value(X);
        out[0] = v * v;
        out[1] = (v - up) * (v - up);
      },
      2, domain, p, r, spec);
  if (!(q[0] > 0.0)) fail(ErrorKind::Degenerate, kModule, "sphere_ratio", "H_S vanishes");
  s.ratio = std::abs(q[1] / q[0] - 1.0);
  s.predictor = std::pow(s.dist / r, 0.75);
  return s;
}

DoublingReport doubling_ratios(const Field& u, const GraphDomain& domain, const Vec& X, double rho, double a,
                               const QuadratureSpec& spec) {
  const char* op = "doubling_ratios";
  check_args(domain, X, rho, op);
  if (!(a > 1.0 && a < 72.0)) fail(ErrorKind::Domain, kModule, op, "a must lie in (1, 72)");
  DoublingReport rep;
  rep.a = a;
  rep.rho = rho;
  const double uX = u.value(X);
  rep.inner = mass_and_volume(u, domain, X, rho, uX, spec).first;
  rep.outer = mass_and_volume(u, domain, X, a * rho, uX, spec).first;
  if (!(rep.inner > 0.0)) fail(ErrorKind::Degenerate, kModule, op, "u is constant on B_rho(X)");
  rep.ratio = rep.outer / rep.inner;
  rep.exponent = std::log(rep.ratio) / std::log(a);
  const SphereRatio s = sphere_ratio(u, domain, X, rho, spec);
  rep.dist = s.dist;
  rep.sphere_ratio = s.ratio;
  rep.sphere_predictor = s.predictor;
  return rep;
}

double err_beta(const Field& u, const GraphDomain& domain, const Vec& p, double r, const std::vector<Vec>& points,
                const QuadratureSpec& spec) {
  check_args(domain, p, r, "err_beta");
  const int d = domain.dim();
  const double up = u.value(p);
  double num = 0.0;
  for (const Vec& X : points) {
    if ((X - p).norm() >= r) continue;
    const double v = u.value(X) - up;
    num += v * v;
  }
  if (num == 0.0) return 0.0;
  const double den = mass_and_volume(u, domain, p, r, up, spec).first / std::pow(r, d);
  if (!(den > 0.0)) fail(ErrorKind::Degenerate, kModule, "err_beta", "u is constant on B_r(p)");
  return num / std::pow(r, d - 2) / den;
}

SpatialVariation spatial_variation_check(const Field& u, const GraphDomain& domain, const Vec& X1, const Vec& X2,
                                         double r, const QuadratureSpec& spec) {
  const char* op = "spatial_variation_check";
  check_args(domain, X1, r, op);
  check_args(domain, X2, r, op);
  if ((X1 - X2).norm() > 0.5 * r) fail(ErrorKind::Domain, kModule, op, "need |X1 - X2| <= r/2");
  for (const Vec& X : {X1, X2})
    if (nearest_boundary_closure(domain, X).dist < 1.5 * r)
      fail(ErrorKind::Domain, kModule, op, "B_{3r/2}(X) must lie inside D at " + format_point(X));
  SpatialVariation sv;
  const double n1 = frequency_report(u, domain, X1, r, spec).N_C;
  const double n2 = frequency_report(u, domain, X2, r, spec).N_C;
  sv.W1 = pinch(u, domain, X1, r, spec);
  sv.W2 = pinch(u, domain, X2, r, spec);
  sv.lhs = std::abs(n1 - n2);
  sv.rhs_core = std::sqrt(std::max(sv.W1, 0.0)) + std::sqrt(std::max(sv.W2, 0.0));
  const double u1 = u.value(X1);
  sv.value_lhs = std::abs(u1 - u.value(X2));
  const double mean = mass_and_volume(u, domain, X1, r, u1, spec).first / ball_volume(domain.dim(), r);
  sv.value_rhs_core = sv.rhs_core * std::sqrt(mean);
  return sv;
}

double boundary_comparison_ratio(const Field& u, const GraphDomain& domain, const Vec& p, double r, bool sphere,
                                 const QuadratureSpec& spec) {
  const char* op = "boundary_comparison_ratio";
  check_args(domain, p, r, op);
  const Vec pt = nearest_boundary_closure(domain, p).q;
  const double up = u.value(p);
  double num, den;
  if (sphere) {
    auto cap = [&](const Vec& c, double shift) {
      const QuadResult q = sphere_cap_integral(
          [&](const Vec& X, double* out) {
            const double v = u.value(X) - shift;
            out[0] = v * v;
            out[1] = 1.0;
          },
          2, domain, c, r, spec);
      return q[0] / q[1];
    };
    num = cap(p, up);
    den = cap(pt, 0.0);
  } else {
    const auto [m1, v1] = mass_and_volume(u, domain, p, r, up, spec);
    const auto [m2, v2] = mass_and_volume(u, domain, pt, r, 0.0, spec);
    num = m1 / v1;
    den = m2 / v2;
  }
  if (!(den > 0.0)) fail(ErrorKind::Degenerate, kModule, op, "u vanishes on the comparison ball");
  return num / den;
}

}  // namespace freqlab
