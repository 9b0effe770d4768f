#include "freqlab/critical.hpp"
#include "freqlab/frequency.hpp"
#include "freqlab/straighten.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace freqlab {

namespace {

constexpr const char* kModule = "critical";

[[noreturn]] void stage_failure(const std::string& stage, const std::string& why) {
  fail(ErrorKind::Quality, kModule, "theorem_pipeline", "stage " + stage + ": " + why);
}

}  // namespace

PipelineReport theorem_pipeline(const GraphDomain& domain, FieldPtr u, double R, const PipelineOptions& opt) {
  const int d = domain.dim();
  if (!u || u->dim() != d) fail(ErrorKind::Domain, kModule, "theorem_pipeline", "field dimension mismatch");
  PipelineReport rep;
  auto clock = std::chrono::steady_clock::now();
  auto mark = [&](const std::string& stage) {
    const auto t = std::chrono::steady_clock::now();
    std::ostringstream os;
    os << stage << ": " << std::chrono::duration<double>(t - clock).count() << " s";
    rep.notes.push_back(os.str());
    rep.stage = stage;
    clock = t;
  };

  const AdmissibilityReport adm = admissibility(domain, R);
  if (!adm.admissible()) {
    std::ostringstream os;
    os << "stage admissibility: theta(8R) = " << adm.theta_8R << ", Dini integral to 16R = " << adm.dini_16R;
    fail(ErrorKind::Precondition, kModule, "theorem_pipeline", os.str());
  }
  mark("admissibility");

  // (1) Normalized doubling of u at boundary and interior centers.
  QuadratureSpec qs;
  qs.tol = 1e-6;
  std::vector<Vec> centers;
  for (double t : {-0.25 * R, 0.0, 0.25 * R}) {
    Vec x = Vec::Zero(d - 1);
    x[0] = t;
    Vec X = domain.boundary_point(x);
    centers.push_back(X);
    X[d - 1] += 0.25 * R;
    centers.push_back(X);
  }
  for (const Vec& X : centers) {
    for (double rho : {R / 8.0, R / 16.0}) {
      const DoublingReport dr = doubling_ratios(*u, domain, X, rho, opt.doubling_a, qs);
      if (!std::isfinite(dr.ratio)) stage_failure("doubling(u)", "non-finite ratio at " + format_point(X));
      rep.u_doubling_sup = std::max(rep.u_doubling_sup, dr.ratio);
    }
    rep.Lambda = std::max(rep.Lambda, frequency_report(*u, domain, X, R / 4.0, qs).N_C);
  }
  mark("doubling(u)");

  // (2) Straightening and the doubling certificate for u~.
  auto map = std::make_shared<StraighteningMap>(domain);
  const WorkingBall wb = map->find_working_ball(0.5 * R);
  rep.working_radius = wb.radius;
  auto ut = extend_field(u, map, wb.radius);
  QuadratureSpec ds;
  ds.tol = 1e-6;
  ds.radial = 8;
  ds.angular = 8;
  const DoublingCertificate dc =
      doubling_certificate(*ut, doubling_samples(d, wb.radius, opt.doubling_random, opt.seed), ds, 1);
  if (!std::isfinite(dc.sup_ratio)) stage_failure("doubling(u~)", "sup ratio is not finite");
  rep.ut_doubling_sup = dc.sup_ratio;
  mark("doubling(u~)");

  // (3) Hölder modulus of A~.
  const DiniParameter& th = domain.dini();
  rep.holder_alpha = opt.holder_alpha > 0.0 ? opt.holder_alpha : (th.family() == DiniFamily::Holder ? th.alpha() : 1.0);
  std::vector<HolderPair> pairs;
  for (const auto& level : holder_pair_levels(d, wb.radius, 0.1 * wb.radius, opt.holder_levels, 8, opt.seed))
    pairs.insert(pairs.end(), level.begin(), level.end());
  const HolderCertificate hc = modulus_certificate(*map, rep.holder_alpha, pairs);
  if (!std::isfinite(hc.constant)) stage_failure("holder", "modulus is not finite");
  rep.holder_constant = hc.constant;
  mark("holder");

  // (4) Critical points of u~ on charts along {s = 0}, pulled back through G.
  const double chart_r = 0.25 * wb.radius;
  CriticalOptions co = opt.critical;
  co.seed_spacing = std::min(co.seed_spacing, chart_r / 5.0);
  std::vector<Vec> images;
  for (int j = 0; j < opt.charts; ++j) {
    const double t = opt.charts == 1 ? 0.0 : chart_r * (2.0 * j / (opt.charts - 1) - 1.0);
    Vec c = Vec::Zero(d);
    c[0] = t;
    ChartReport cr;
    cr.base = domain.boundary_point(c.head(d - 1));
    cr.radius = chart_r;
    const CriticalSetEstimate est = find_critical_points(*ut, Region::ball(c, chart_r), co);
    const double tol_s = 1e-8 * wb.radius;
    std::vector<Vec> lower;
    for (const CriticalPoint& p : est.points) {
      const double s = p.x[d - 1];
      if (std::abs(s) <= tol_s) {
        ++cr.boundary_points;
        Vec z = p.x;
        z[d - 1] = 0.0;
        images.push_back(map->G(z));
      } else if (s > 0.0) {
        ++cr.upper_points;
        const MapJet mj = map->jet(p.x);
        const Vec gu = u->value_grad(mj.G).grad;
        // |∇u| = |DG^{-T} ∇u~| and DG is close to orthogonal on the working ball.
        if (gu.norm() <= 10.0 * co.grad_tol * est.grad_scale)
          ++cr.pulled_back;
        images.push_back(mj.G);
      } else {
        lower.push_back(p.x);
      }
    }
    for (const CriticalPoint& p : est.points) {
      if (p.x[d - 1] <= tol_s) continue;
      Vec m = p.x;
      m[d - 1] = -m[d - 1];
      const bool paired = std::any_of(lower.begin(), lower.end(), [&](const Vec& q) {
        return (q - m).norm() <= 1e-6 * wb.radius;
      });
      if (!paired && (m - c).norm() < chart_r * (1.0 - 1e-6)) cr.symmetric = false;
    }
    if (cr.pulled_back != cr.upper_points)
      stage_failure("critical(u~)", "a critical point of u~ does not pull back to a critical point of u");
    if (!cr.symmetric) stage_failure("critical(u~)", "critical points of u~ are not paired under s -> -s");
    rep.charts.push_back(cr);
  }
  std::vector<double> radii;
  for (double f : opt.content_radii) radii.push_back(f * wb.radius);
  rep.content = minkowski_content(*ut, Region::ball(Vec::Zero(d), 0.5 * wb.radius), radii);
  mark("critical(u~)");

  // (5) Interior chart on D ∩ B_{R/2} away from the straightened strip, then the union.
  const CriticalSetEstimate inner = find_critical_points(*u, Region::domain_ball(domain, Vec::Zero(d), 0.5 * R), co);
  rep.interior_points = inner.points.size();
  for (const CriticalPoint& p : inner.points) images.push_back(p.x);
  std::vector<Vec> unique;
  for (const Vec& X : images) {
    if (std::none_of(unique.begin(), unique.end(), [&](const Vec& Y) { return (X - Y).norm() <= 1e-6 * R; }))
      unique.push_back(X);
  }
  rep.total_points = unique.size();
  mark("covering");
  rep.passed = true;
  return rep;
}

}  // namespace freqlab
