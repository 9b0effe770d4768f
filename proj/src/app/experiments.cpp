#include "app/experiments.hpp"

#include "app/csv.hpp"
#include "app/fixtures.hpp"
#include "app/svg.hpp"
#include "freqlab/conformal2d.hpp"
#include "freqlab/critical.hpp"
#include "freqlab/frequency.hpp"
#include "freqlab/straighten.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace freqlab::app {

namespace {

constexpr const char* kModule = "cli";

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::vector<std::string> coord_names(const std::string& prefix, int d) {
  static const char* axes[] = {"x", "y", "z"};
  std::vector<std::string> out;
  for (int i = 0; i < d; ++i) out.push_back(prefix + axes[i]);
  return out;
}

void push_coords(std::vector<Cell>& row, const Vec& X) {
  for (Eigen::Index i = 0; i < X.size(); ++i) row.emplace_back(X[i]);
}

std::vector<std::string> header(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

struct Context {
  const Config& cfg;
  std::string dir;
  bool plot;
  Summary& summary;

  std::string path(const std::string& name) const {
    summary.artifacts.push_back(name);
    return (std::filesystem::path(dir) / name).string();
  }
  void check(const std::string& name, bool pass, const std::string& detail) {
    summary.checks.push_back({name, pass, detail});
  }
};

std::vector<Vec> centers_for(const Config& cfg, int d) {
  std::vector<Vec> cs = cfg.points("sweep.centers");
  for (const Vec& c : cs)
    if (c.size() != d)
      fail(ErrorKind::Config, kModule, "sweep.centers", "center " + format_point(c) + " does not match domain.dimension");
  if (cs.empty()) fail(ErrorKind::Config, kModule, "sweep.centers", "no centers");
  return cs;
}

std::vector<double> positive_list(const Config& cfg, const std::string& key) {
  std::vector<double> v = cfg.list(key);
  if (v.empty()) fail(ErrorKind::Config, kModule, key.c_str(), "empty list");
  for (double x : v)
    if (!(x > 0.0)) fail(ErrorKind::Config, kModule, key.c_str(), "entries must be positive");
  return v;
}

// Homogeneous polynomial fixture: the frequency at the origin is field.degree.
bool homogeneous(const Config& cfg) { return cfg.str("field.kind") == "poly" && !cfg.has("field.coefs"); }

Vec closure_point(const GraphDomain& domain, const Vec& X) {
  if (domain.gap(X) < -1e-12) fail(ErrorKind::Domain, kModule, "sweep.centers", format_point(X) + " lies outside D");
  return X;
}

// ---------------------------------------------------------------- freq-sweep

void freq_sweep(Context& ctx) {
  const Config& cfg = ctx.cfg;
  const GraphDomain domain = make_domain(cfg);
  const FieldPtr u = make_field(cfg, domain);
  const QuadratureSpec q = make_quadrature(cfg);
  const int d = domain.dim();
  std::vector<double> radii = positive_list(cfg, "sweep.radii");
  std::sort(radii.begin(), radii.end());
  CsvWriter csv(ctx.path("freq.csv"), header(coord_names("center_", d),
                                             {"r", "D", "H_S", "H_C", "N_S", "N_C", "R_h", "R_b", "Err_r", "W", "quad_err"}));
  SvgPlot plot{"N_C(p, r)", "r", "N_C", false, false, false, {}};
  bool converged = true, monotone = true, rb_ok = true, homog = true;
  std::string mono_detail = "all interior pairs", homog_detail;
  const double k = cfg.integer("field.degree");
  for (const Vec& X : centers_for(cfg, d)) {
    closure_point(domain, X);
    const double dist = nearest_boundary_closure(domain, X).dist;
    Series s{"p = " + format_point(X), {}, {}, false};
    double prev = -1.0;
    for (double r : radii) {
      const DerivativeTerms t = derivative_terms(*u, domain, X, r, q);
      const FrequencyReport& f = t.base;
      const double W = pinch(*u, domain, X, r, q);
      const double qerr = std::max(f.err_D / std::max(std::abs(f.D), 1e-300), f.err_H_C / std::max(f.H_C, 1e-300));
      std::vector<Cell> row;
      push_coords(row, X);
      for (double v : {r, f.D, f.H_S, f.H_C, f.N_S, f.N_C, t.R_h, t.R_b, t.Err_r, W, qerr}) row.emplace_back(v);
      csv.row(row);
      converged = converged && f.converged;
      if (r < dist && prev >= 0.0 && f.N_C < prev - 1e-5) {
        monotone = false;
        mono_detail = "N_C decreases at p = " + format_point(X) + ", r = " + fmt(r);
      }
      if (r < dist) prev = f.N_C;
      if (r * domain.dini().theta(r) <= dist && t.R_b < -1e-8) rb_ok = false;
      if (homogeneous(cfg) && X.norm() == 0.0 && (std::abs(f.N_C - k) > 1e-6 || std::abs(f.N_S - k) > 1e-6)) {
        homog = false;
        homog_detail = "N_C = " + fmt(f.N_C) + " at r = " + fmt(r);
      }
      s.x.push_back(r);
      s.y.push_back(f.N_C);
    }
    plot.series.push_back(s);
  }
  ctx.check("quadrature converged", converged, "adaptive quadrature reached quad.tol");
  ctx.check("interior monotonicity", monotone, mono_detail);
  ctx.check("R_b >= -1e-8 where r theta(r) <= dist", rb_ok, "boundary term sign");
  if (homogeneous(cfg))
    ctx.check("N_S = N_C = degree at the origin", homog, homog_detail.empty() ? "within 1e-6" : homog_detail);
  if (ctx.plot) plot.write(ctx.path("freq.svg"));
}

// ---------------------------------------------------------------- doubling

void doubling(Context& ctx) {
  const Config& cfg = ctx.cfg;
  const GraphDomain domain = make_domain(cfg);
  const FieldPtr u = make_field(cfg, domain);
  const QuadratureSpec q = make_quadrature(cfg);
  const int d = domain.dim();
  CsvWriter csv(ctx.path("doubling.csv"), header(coord_names("center_", d), {"rho", "a", "inner", "outer", "ratio",
                                                                            "exponent", "dist", "sphere_ratio"}));
  SvgPlot plot{"doubling exponents", "rho", "log(ratio)/log(a)", true, false, false, {}};
  bool finite = true, homog = true;
  std::string homog_detail = "within 1e-3";
  const double expected = d + 2.0 * cfg.integer("field.degree");
  for (double a : positive_list(cfg, "sweep.a")) {
    if (!(a > 1.0)) fail(ErrorKind::Config, kModule, "sweep.a", "doubling factors must exceed 1");
    Series s{"a = " + fmt(a), {}, {}, true};
    for (const Vec& X : centers_for(cfg, d)) {
      closure_point(domain, X);
      for (double rho : positive_list(cfg, "sweep.radii")) {
        const DoublingReport r = doubling_ratios(*u, domain, X, rho, a, q);
        std::vector<Cell> row;
        push_coords(row, X);
        for (double v : {rho, a, r.inner, r.outer, r.ratio, r.exponent, r.dist, r.sphere_ratio}) row.emplace_back(v);
        csv.row(row);
        finite = finite && std::isfinite(r.exponent);
        if (homogeneous(cfg) && X.norm() == 0.0 && std::abs(r.exponent - expected) > 1e-3) {
          homog = false;
          homog_detail = "exponent " + fmt(r.exponent) + " at rho = " + fmt(rho);
        }
        s.x.push_back(rho);
        s.y.push_back(r.exponent);
      }
    }
    plot.series.push_back(s);
  }
  ctx.check("finite exponents", finite, "log(ratio)/log(a) finite for every sample");
  if (homogeneous(cfg)) ctx.check("exponent = d + 2k at the origin", homog, homog_detail);
  if (ctx.plot) plot.write(ctx.path("doubling.svg"));
}

// ---------------------------------------------------------------- derivative-check

void derivative_check(Context& ctx) {
  const Config& cfg = ctx.cfg;
  const GraphDomain domain = make_domain(cfg);
  const FieldPtr u = make_field(cfg, domain);
  const QuadratureSpec q = make_quadrature(cfg);
  const int d = domain.dim();
  const double step = cfg.number("freq.fd_step_rel");
  if (!(step > 0.0 && step < 0.5)) fail(ErrorKind::Config, kModule, "freq.fd_step_rel", "must lie in (0, 0.5)");
  CsvWriter csv(ctx.path("derivative.csv"),
                header(coord_names("center_", d), {"r", "dist", "fd", "R_h", "R_b", "Err_r", "Rim_r", "literal",
                                                   "completed", "rel_err"}));
  double worst = 0.0;
  for (const Vec& X : centers_for(cfg, d)) {
    closure_point(domain, X);
    for (double r : positive_list(cfg, "sweep.radii")) {
      const DerivativeTerms t = derivative_terms(*u, domain, X, r, q);
      const double fd = frequency_derivative_fd(*u, domain, X, r, step, q);
      const double floor = std::max(std::abs(fd), 1e-3 * t.base.N_C / r);
      const double rel = std::abs(t.exact() - fd) / floor;
      worst = std::max(worst, rel);
      std::vector<Cell> row;
      push_coords(row, X);
      for (double v : {r, t.dist, fd, t.R_h, t.R_b, t.Err_r, t.Rim_r, t.literal(), t.exact(), rel}) row.emplace_back(v);
      csv.row(row);
    }
  }
  ctx.check("dN_C/dr identity within 1%", worst <= 1e-2, "max relative error " + fmt(worst));
}

// ---------------------------------------------------------------- straighten-verify

double spectral_norm(const Mat& M) { return Eigen::JacobiSVD<Mat>(M).singularValues()(0); }

void straighten_verify(Context& ctx) {
  const Config& cfg = ctx.cfg;
  const GraphDomain domain = make_domain(cfg);
  const FieldPtr u = make_field(cfg, domain);
  const QuadratureSpec q = make_quadrature(cfg);
  const int d = domain.dim();
  const unsigned seed = static_cast<unsigned>(cfg.integer("seed"));
  auto map = std::make_shared<StraighteningMap>(domain, cfg.integer("straighten.moll_pts"));
  const WorkingBall wb = map->find_working_ball(0.5 * domain.R(), cfg.integer("straighten.ball_search_grid"));
  ctx.check("working ball", wb.radius > 0.0, "radius " + fmt(wb.radius) + ", det DG in [" + fmt(wb.det_min) + ", " +
                                                  fmt(wb.det_max) + "]");
  auto ut = extend_field(u, map, wb.radius);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_point = [&](double radius) {
    Vec z(d);
    do {
      for (int i = 0; i < d; ++i) z[i] = radius * unit(rng);
    } while (z.norm() > radius);
    return z;
  };

  double self = 0.0;
  for (int i = 0; i < 4; ++i) {
    Vec z = random_point(0.8 * wb.radius);
    z[d - 1] = std::abs(z[d - 1]);
    self = std::max(self, map->self_check(z));
  }
  ctx.check("DG against differences", true, "max relative difference " + fmt(self));
  if (domain.is_flat()) {
    double dev = 0.0;
    for (int i = 0; i < 8; ++i) {
      Vec z = random_point(wb.radius);
      z[d - 1] = std::abs(z[d - 1]);
      dev = std::max({dev, (map->G(z) - z).norm(), (map->A(z) - Mat::Identity(d, d)).norm()});
    }
    ctx.check("flat: G = id, A = I", dev <= 1e-14, "max deviation " + fmt(dev));
  }

  // Weak form on test bumps; every third bump straddles {s = 0}.
  const double rho = cfg.number("straighten.bump_radius");
  if (!(rho > 0.0 && rho < 0.5 * wb.radius))
    fail(ErrorKind::Config, kModule, "straighten.bump_radius", "must lie in (0, working radius / 2)");
  CsvWriter weak(ctx.path("weak.csv"), header(coord_names("center_", d), {"rho", "straddles", "normalized"}));
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    Vec c = random_point(wb.radius - rho);
    if (i % 3 == 0) c[d - 1] = 0.5 * rho * unit(rng);
    const WeakResidual w = weak_residual(*map, *ut, c, rho, q);
    std::vector<Cell> row;
    push_coords(row, c);
    row.emplace_back(rho);
    row.emplace_back(static_cast<long long>(w.straddles));
    row.emplace_back(w.normalized);
    weak.row(row);
    worst = std::max(worst, std::abs(w.normalized));
  }
  ctx.check("weak residuals <= 1e-5", worst <= 1e-5, "max normalized residual " + fmt(worst));

  CsvWriter jump(ctx.path("conormal.csv"), {"h", "conormal_jump"});
  const ConormalJump cj = conormal_jump(*map, *ut, Vec::Constant(d - 1, 0.2 * wb.radius), 0.02 * wb.radius, 4);
  for (std::size_t i = 0; i < cj.h.size(); ++i) jump.row({cj.h[i], cj.jump[i]});
  ctx.check("co-normal jump", std::abs(cj.extrapolated) <= 1e-6 * cj.flux_scale,
            "extrapolated " + fmt(cj.extrapolated) + ", flux scale " + fmt(cj.flux_scale));

  const DiniParameter& th = domain.dini();
  double alpha = cfg.number("straighten.holder_alpha");
  if (alpha <= 0.0) alpha = th.family() == DiniFamily::Holder ? th.alpha() : 1.0;
  CsvWriter hold(ctx.path("holder.csv"), {"pair_dist", "holder_ratio"});
  std::vector<HolderPair> pairs;
  for (const auto& level : holder_pair_levels(d, 0.8 * wb.radius, 0.1 * wb.radius,
                                              cfg.integer("straighten.holder_levels"), 8, seed))
    pairs.insert(pairs.end(), level.begin(), level.end());
  SvgPlot plot{"Hölder ratios of A~", "|z1 - z2|", "ratio", true, true, false, {{"alpha = " + fmt(alpha), {}, {}, true}}};
  for (const HolderPair& p : pairs) {
    const double dist = (p.z1 - p.z2).norm();
    const double ratio = spectral_norm(map->A_tilde(p.z1) - map->A_tilde(p.z2)) / std::pow(dist, alpha);
    hold.row({dist, ratio});
    plot.series[0].x.push_back(dist);
    plot.series[0].y.push_back(ratio);
  }
  const HolderCertificate hc = modulus_certificate(*map, alpha, pairs);
  ctx.check("Hölder constant finite", std::isfinite(hc.constant),
            "alpha " + fmt(alpha) + ": constant " + fmt(hc.constant) + " over " + std::to_string(hc.pairs) + " pairs");

  QuadratureSpec ds;
  ds.tol = 1e-6;
  ds.radial = 8;
  ds.angular = 8;
  const DoublingCertificate dc =
      doubling_certificate(*ut, doubling_samples(d, wb.radius, cfg.integer("sweep.samples"), seed), ds);
  CsvWriter dbl(ctx.path("doubling_certificate.csv"), header(coord_names("argmax_", d), {"argmax_r", "sup_ratio", "samples"}));
  std::vector<Cell> row;
  push_coords(row, dc.argmax_center);
  row.emplace_back(dc.argmax_r);
  row.emplace_back(dc.sup_ratio);
  row.emplace_back(static_cast<long long>(dc.samples));
  dbl.row(row);
  ctx.check("doubling certificate finite", std::isfinite(dc.sup_ratio),
            "sup ratio " + fmt(dc.sup_ratio) + " over " + std::to_string(dc.samples) + " samples");
  if (ctx.plot) plot.write(ctx.path("holder.svg"));
}

// ---------------------------------------------------------------- critical points

void write_points(const std::string& path, const CriticalSetEstimate& e, int d) {
  CsvWriter csv(path, header(coord_names("", d), {"grad_norm", "u_value", "class"}));
  for (const CriticalPoint& p : e.points) {
    std::vector<Cell> row;
    push_coords(row, p.x);
    row.emplace_back(p.grad_norm);
    row.emplace_back(p.value);
    row.emplace_back(std::string(p.singular ? "singular" : "critical"));
    csv.row(row);
  }
}

CriticalOptions critical_options(const Config& cfg) {
  CriticalOptions o;
  o.seed_spacing = cfg.number("critical.spacing");
  o.grad_tol = cfg.number("critical.grad_tol");
  if (!(o.seed_spacing > 0.0) || !(o.grad_tol > 0.0))
    fail(ErrorKind::Config, kModule, "critical", "critical.spacing and critical.grad_tol must be positive");
  return o;
}

void overlay(const std::string& path, const GraphDomain& domain, const std::vector<Vec>& pts, double radius,
             const std::string& title) {
  SvgPlot plot{title, "x", "y", false, false, true, {}};
  Series graph{"boundary", {}, {}, false}, points{"critical points", {}, {}, true};
  for (int i = 0; i <= 100; ++i) {
    const double x = radius * (2.0 * i / 100.0 - 1.0);
    graph.x.push_back(x);
    graph.y.push_back(domain.phi(Vec::Constant(1, x)));
  }
  for (const Vec& p : pts) {
    points.x.push_back(p[0]);
    points.y.push_back(p[1]);
  }
  plot.series = {graph, points};
  plot.write(path);
}

void critical_pipeline(Context& ctx) {
  const Config& cfg = ctx.cfg;
  const GraphDomain domain = make_domain(cfg);
  const FieldPtr u = make_field(cfg, domain);
  const int d = domain.dim();
  const CriticalOptions co = critical_options(cfg);
  PipelineOptions po;
  po.seed = static_cast<unsigned>(cfg.integer("seed"));
  po.critical = co;
  const PipelineReport rep = theorem_pipeline(domain, u, cfg.number("pipeline.R"), po);
  ctx.check("theorem pipeline", rep.passed,
            "Lambda " + fmt(rep.Lambda) + ", doubling sup " + fmt(rep.ut_doubling_sup) + ", Hölder " +
                fmt(rep.holder_constant) + ", " + std::to_string(rep.total_points) + " points covered");
  CsvWriter pipe(ctx.path("pipeline.csv"), {"Lambda", "u_doubling_sup", "ut_doubling_sup", "working_radius",
                                            "holder_alpha", "holder_constant", "interior_points", "total_points"});
  pipe.row({rep.Lambda, rep.u_doubling_sup, rep.ut_doubling_sup, rep.working_radius, rep.holder_alpha,
            rep.holder_constant, static_cast<long long>(rep.interior_points), static_cast<long long>(rep.total_points)});

  const double radius = cfg.number("critical.radius");
  const Region region = Region::domain_ball(domain, Vec::Zero(d), radius);
  const CriticalSetEstimate est = find_critical_points(*u, region, co);
  write_points(ctx.path("critical.csv"), est, d);
  bool converged = true;
  for (const CriticalPoint& p : est.points) converged = converged && p.grad_norm <= co.grad_tol * est.grad_scale;
  ctx.check("critical points converged", converged,
            std::to_string(est.points.size()) + " points, " + std::to_string(est.singular_count()) + " singular");

  CsvWriter content(ctx.path("content.csv"), {"r", "count", "count_r_pow"});
  for (const ContentRow& r : minkowski_content(*u, region, positive_list(cfg, "critical.radii")))
    content.row({r.r, static_cast<long long>(r.count), r.count_r_pow});
  if (ctx.plot && d == 2) {
    std::vector<Vec> pts;
    for (const CriticalPoint& p : est.points) pts.push_back(p.x);
    overlay(ctx.path("critical.svg"), domain, pts, radius, "critical points");
  }
}

// ---------------------------------------------------------------- conformal-count

void conformal_count(Context& ctx) {
  const Config& cfg = ctx.cfg;
  const GraphDomain domain = make_domain(cfg);
  if (domain.dim() != 2) fail(ErrorKind::Config, kModule, "conformal-count", "requires domain.dimension = 2");
  const FieldPtr u = make_field(cfg, domain);
  const double R = cfg.number("conformal.R");
  auto map = build_map(domain, R);
  const TransferResult tr = transfer_count(*map, u, cfg.number("conformal.rho"), critical_options(cfg));
  CsvWriter csv(ctx.path("conformal.csv"), {"N_freq", "count", "hopf_c"});
  csv.row({tr.N_freq, static_cast<long long>(tr.count_before), tr.hopf_c});
  CsvWriter pts(ctx.path("conformal_points.csv"), {"set", "x", "y"});
  for (const Vec& p : tr.before) pts.row({std::string("before"), p[0], p[1]});
  for (const Vec& p : tr.images) pts.row({std::string("image"), p[0], p[1]});
  for (const Vec& p : tr.after) pts.row({std::string("after"), p[0], p[1]});
  ctx.check("count transfer", tr.matched && tr.count_before == tr.count_after,
            std::to_string(tr.count_before) + " -> " + std::to_string(tr.count_after) +
                (tr.diagnostic.empty() ? "" : "; " + tr.diagnostic));

  std::mt19937_64 rng(static_cast<unsigned>(cfg.integer("seed")));
  std::uniform_real_distribution<double> ux(-R, R), uy(0.02 * R, R);
  double cr = 0.0, det = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng);
    const Vec X = vec2(x, domain.phi(Vec::Constant(1, x)) + uy(rng));
    cr = std::max(cr, map->cr_residual(X));
    const double g2 = map->grad_g(X).squaredNorm();
    det = std::max(det, std::abs(std::abs(map->jacobian(X).determinant()) - g2) / g2);
  }
  ctx.check("Cauchy-Riemann residual <= 1e-8", cr <= 1e-8, "max " + fmt(cr));
  ctx.check("|det DPhi| = |grad g|^2", det <= 1e-10, "max relative difference " + fmt(det));
  if (ctx.plot) {
    SvgPlot plot{"critical points before (z) and after (w) the map", "Re", "Im", false, false, true, {}};
    Series b{"u in z-plane", {}, {}, true}, a{"û in w-plane", {}, {}, true};
    for (const Vec& p : tr.before) b.x.push_back(p[0]), b.y.push_back(p[1]);
    for (const Vec& p : tr.after) a.x.push_back(p[0]), a.y.push_back(p[1]);
    plot.series = {b, a};
    plot.write(ctx.path("conformal.svg"));
  }
}

// ---------------------------------------------------------------- spvar-fit

void spvar_fit(Context& ctx) {
  const Config& cfg = ctx.cfg;
  const GraphDomain domain = make_domain(cfg);
  const FieldPtr u = make_field(cfg, domain);
  const QuadratureSpec q = make_quadrature(cfg);
  const int d = domain.dim();
  const std::vector<double> radii = positive_list(cfg, "sweep.radii");
  const int n = cfg.integer("sweep.samples");
  if (n < 1) fail(ErrorKind::Config, kModule, "sweep.samples", "must be >= 1");
  std::mt19937_64 rng(static_cast<unsigned>(cfg.integer("seed")));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CsvWriter csv(ctx.path("spvar.csv"), header(header(coord_names("x1_", d), coord_names("x2_", d)),
                                              {"r", "lhs", "W1", "W2", "rhs_core", "ratio"}));
  SvgPlot plot{"spatial variation of N_C", "W1^1/2 + W2^1/2", "|N_C(X1) - N_C(X2)|", true, true, false,
               {{"pairs", {}, {}, true}}};
  double C = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = radii[static_cast<std::size_t>(i) % radii.size()];
    // X1 at least 3r/2 inside D, X2 within r/2 of X1.
    Vec X1(d), X2(d);
    do {
      for (int j = 0; j < d - 1; ++j) X1[j] = 0.5 * (2.0 * unit(rng) - 1.0);
      X1[d - 1] = domain.phi(X1.head(d - 1)) + 1.6 * r + 0.4 * unit(rng);
      Vec off(d);
      do {
        for (int j = 0; j < d; ++j) off[j] = 2.0 * unit(rng) - 1.0;
      } while (off.norm() > 1.0);
      X2 = X1 + 0.5 * r * off;
    } while (nearest_boundary(domain, X1).dist < 1.55 * r || nearest_boundary(domain, X2).dist < 1.55 * r);
    const SpatialVariation sv = spatial_variation_check(*u, domain, X1, X2, r, q);
    const double ratio = sv.rhs_core > 1e-12 ? sv.lhs / sv.rhs_core : 0.0;
    C = std::max(C, ratio);
    std::vector<Cell> row;
    push_coords(row, X1);
    push_coords(row, X2);
    for (double v : {r, sv.lhs, sv.W1, sv.W2, sv.rhs_core, ratio}) row.emplace_back(v);
    csv.row(row);
    plot.series[0].x.push_back(sv.rhs_core);
    plot.series[0].y.push_back(sv.lhs);
  }
  ctx.check("fitted constant C finite", std::isfinite(C), "C = " + fmt(C) + " over " + std::to_string(n) + " pairs");
  if (ctx.plot) plot.write(ctx.path("spvar.svg"));
}

// ---------------------------------------------------------------- simon

void simon(Context& ctx) {
  const Config& cfg = ctx.cfg;
  const double eps = cfg.number("field.epsilon");
  if (!(eps > 0.0)) fail(ErrorKind::Config, kModule, "field.epsilon", "must be positive");
  const double zmax = 12.0;
  const SimonFixture fx = simon_fixture(eps, zmax);
  const CriticalSetEstimate est =
      find_critical_points(*fx.field, Region::box(vec3(-0.2, -0.2, -zmax), vec3(0.2, 0.2, zmax)), critical_options(cfg));
  write_points(ctx.path("simon.csv"), est, 3);
  bool match = est.points.size() == fx.critical_z.size();
  std::string detail = std::to_string(est.points.size()) + " found, " + std::to_string(fx.critical_z.size()) + " expected";
  for (std::size_t i = 0; match && i < est.points.size(); ++i) {
    const CriticalPoint& p = est.points[i];
    const double z = fx.critical_z[i];
    const bool sing = std::any_of(fx.singular_z.begin(), fx.singular_z.end(), [&](double s) { return s == z; });
    if ((p.x - vec3(0.0, 0.0, z)).norm() > 1e-8 || p.singular != sing) {
      match = false;
      detail = "point " + format_point(p.x) + " does not match z = " + fmt(z);
    }
  }
  ctx.check("points and classes match k pi / (2 eps)", match, detail);
  double div = 0.0;
  for (double z : {-7.3, -1.1, 0.4, 5.9})
    div = std::max(div, std::abs(simon_divergence_residual(*fx.field, vec3(0.3, -0.2, z))));
  ctx.check("div(A grad u) = 0", div <= 1e-6, "max residual " + fmt(div));
}

}  // namespace

bool Summary::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void prepare_output(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string probe = (std::filesystem::path(dir) / ".write_probe").string();
  {
    std::ofstream out(probe);
    if (ec || !out) fail(ErrorKind::Config, kModule, "prepare_output", "output directory not writable: " + dir);
  }
  std::filesystem::remove(probe, ec);
}

Summary run_experiment(const Config& cfg) {
  Summary summary;
  summary.experiment = cfg.str("experiment");
  const std::string dir = cfg.str("out.dir");
  prepare_output(dir);
  Context ctx{cfg, dir, cfg.flag("out.plot"), summary};
  static const std::map<std::string, void (*)(Context&)> table{
      {"freq-sweep", freq_sweep},          {"doubling", doubling},
      {"derivative-check", derivative_check}, {"straighten-verify", straighten_verify},
      {"critical-pipeline", critical_pipeline}, {"conformal-count", conformal_count},
      {"spvar-fit", spvar_fit},            {"simon", simon}};
  table.at(summary.experiment)(ctx);
  return summary;
}

void print_summary(const Summary& s, std::ostream& os) {
  os << "experiment " << s.experiment << "\n";
  for (const Check& c : s.checks) os << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  for (const std::string& a : s.artifacts) os << "  wrote " << a << "\n";
  os << (s.passed() ? "PASS" : "FAIL") << "\n";
}

}  // namespace freqlab::app
