#include "app/verify.hpp"

#include "app/csv.hpp"
#include "app/experiments.hpp"
#include "app/fixtures.hpp"
#include "app/svg.hpp"
#include "freqlab/conformal2d.hpp"
#include "freqlab/critical.hpp"
#include "freqlab/frequency.hpp"
#include "freqlab/straighten.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace freqlab::app {

namespace {

constexpr double kBaseTol = 1e-10;
constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

struct Outcome {
  std::string status = "PASS";
  std::string detail;
  std::vector<std::string> info;

  void require(bool ok, const std::string& what) {
    if (!ok) status = "FAIL";
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

class Suite {
 public:
  Suite(const VerifyOptions& opt, std::string dir) : opt_(opt), dir_(std::move(dir)) {
    factor_ = opt.quad_tol ? *opt.quad_tol / kBaseTol : 1.0;
  }

  bool want(const std::string& fixture) const {
    if (!opt_.fixtures) return true;
    return std::find(opt_.fixtures->begin(), opt_.fixtures->end(), fixture) != opt_.fixtures->end();
  }
  bool loosened() const { return factor_ >= 10.0; }
  QuadratureSpec quad(double tol = kBaseTol) const {
    QuadratureSpec q;
    q.tol = tol * factor_;
    return q;
  }
  std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }
  std::mt19937_64 rng(unsigned salt) const { return std::mt19937_64(opt_.seed * 1000003ull + salt); }
  unsigned seed() const { return opt_.seed; }
  bool plot() const { return opt_.plot; }

  const Fixture& bump() {
    if (!bump_) bump_ = bump_fixture();
    return *bump_;
  }
  const Fixture& cosine() {
    if (!cosine_) cosine_ = cosine_fixture();
    return *cosine_;
  }
  std::vector<const Fixture*> curved() {
    std::vector<const Fixture*> out;
    if (want("bump")) out.push_back(&bump());
    if (want("cosine")) out.push_back(&cosine());
    return out;
  }
  Fixture perturbed(int which) const {
    const GraphDomain flat = GraphDomain::flat(2);
    if (which == 0) return {"perturbed", flat, im_complex_polynomial({0.0, 0.5, 0.3, 1.0, 0.2})};
    return {"perturbed", flat, im_complex_polynomial({0.2, 0.4, -0.6, 0.3, 0.0, 0.5})};
  }

 private:
  const VerifyOptions& opt_;
  std::string dir_;
  double factor_ = 1.0;
  std::optional<Fixture> bump_, cosine_;
};

double dist_to_boundary(const GraphDomain& domain, const Vec& X) { return nearest_boundary(domain, X).dist; }

// Interior point at height [lo, hi] above the graph with |x| <= 0.5.
Vec sample_point(const GraphDomain& domain, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uh(lo, hi);
  const double x = ux(rng);
  return vec2(x, domain.phi(Vec::Constant(1, x)) + uh(rng));
}

// ---------------------------------------------------------------- 1

Outcome homogeneous_frequency(Suite& s) {
  Outcome o;
  if (!s.want("homogeneous")) return {"NOOP", "fixture homogeneous not selected", {}};
  const GraphDomain flat = GraphDomain::flat(2);
  CsvWriter csv(s.path("c01_homogeneous.csv"), {"k", "r", "N_S", "N_C"});
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const auto u = exact_polynomial(2, k);
    for (double r : {0.1, 0.5, 1.0}) {
      const FrequencyReport f = frequency_report(*u, flat, Vec::Zero(2), r, s.quad());
      csv.row({static_cast<long long>(k), r, f.N_S, f.N_C});
      worst = std::max({worst, std::abs(f.N_S - k), std::abs(f.N_C - k)});
    }
  }
  o.require(worst <= 1e-6, "max |N - k| = " + fmt(worst));
  return o;
}

// ---------------------------------------------------------------- 2

Outcome interior_monotonicity(Suite& s) {
  Outcome o;
  std::vector<Fixture> fx;
  if (s.want("perturbed")) fx.push_back(s.perturbed(0));
  for (const Fixture* f : s.curved()) fx.push_back(*f);
  if (fx.empty()) return {"NOOP", "no fixture selected", {}};
  const int per = (200 + static_cast<int>(fx.size()) - 1) / static_cast<int>(fx.size());
  auto rng = s.rng(2);
  std::uniform_real_distribution<double> unit(0.1, 0.95);
  CsvWriter csv(s.path("c02_monotonicity.csv"), {"fixture", "p_x", "p_y", "r1", "r2", "N1", "N2"});
  int violations = 0, n = 0;
  double worst = -1e300;
  for (const Fixture& f : fx) {
    for (int i = 0; i < per; ++i) {
      const Vec p = sample_point(f.domain, rng, 0.05, 0.6);
      const double r2 = dist_to_boundary(f.domain, p) * unit(rng);
      const double r1 = r2 * unit(rng);
      const double N1 = frequency_report(*f.u, f.domain, p, r1, s.quad()).N_C;
      const double N2 = frequency_report(*f.u, f.domain, p, r2, s.quad()).N_C;
      csv.row({f.name, p[0], p[1], r1, r2, N1, N2});
      worst = std::max(worst, N1 - N2);
      if (N1 > N2 + 1e-5) ++violations;
      ++n;
    }
  }
  o.require(violations == 0, std::to_string(n) + " triples, " + std::to_string(violations) +
                                 " violations, max N_C(r1) - N_C(r2) = " + fmt(worst));
  o.require(n >= 200, "at least 200 triples");
  if (s.loosened() && o.status == "PASS") o.status = "WARN";
  return o;
}

// ---------------------------------------------------------------- 3

Outcome derivative_identity(Suite& s) {
  Outcome o;
  std::vector<Fixture> fx;
  if (s.want("perturbed")) fx.push_back(s.perturbed(0));
  for (const Fixture* f : s.curved()) fx.push_back(*f);
  if (fx.empty()) return {"NOOP", "no fixture selected", {}};
  auto rng = s.rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0), ux(-0.4, 0.4);
  CsvWriter csv(s.path("c03_derivative.csv"), {"fixture", "case", "p_x", "p_y", "r", "dist", "u_p", "fd", "literal",
                                              "completed", "checked", "rel_err"});
  double worst = 0.0, literal_worst = 0.0;
  int literal_miss = 0, n = 0;
  for (int i = 0; i < 50; ++i) {
    const Fixture& f = fx[static_cast<std::size_t>(i) % fx.size()];
    Vec p;
    double r = 0.0;
    std::string kind;
    if (i < 20) {  // interior ball
      p = sample_point(f.domain, rng, 0.1, 0.5);
      r = dist_to_boundary(f.domain, p) * (0.2 + 0.7 * unit(rng));
      kind = "interior";
    } else if (i < 35) {  // ball crossing the boundary, u(p) != 0
      p = sample_point(f.domain, rng, 0.02, 0.1);
      r = std::min(dist_to_boundary(f.domain, p) * (1.5 + 3.0 * unit(rng)), 0.5);
      kind = "crossing";
    } else {  // boundary center, u(p) = 0
      p = f.domain.boundary_point(Vec::Constant(1, ux(rng)));
      r = 0.1 + 0.4 * unit(rng);
      kind = "boundary";
    }
    const QuadratureSpec q = s.quad(1e-11);
    const DerivativeTerms t = derivative_terms(*f.u, f.domain, p, r, q);
    const double fd = frequency_derivative_fd(*f.u, f.domain, p, r, 1e-3, q);
    // The literal identity holds exactly when r < dist or u(p) = 0; otherwise the rim term completes it.
    const bool literal_exact = kind != "crossing";
    const double checked = literal_exact ? t.literal() : t.exact();
    const double floor = std::max(std::abs(fd), 1e-3 * t.base.N_C / r);
    const double rel = std::abs(checked - fd) / floor;
    const double lit = std::abs(t.literal() - fd) / floor;
    worst = std::max(worst, rel);
    if (!literal_exact) {
      literal_worst = std::max(literal_worst, lit);
      if (lit > 1e-2) ++literal_miss;
    }
    csv.row({f.name, kind, p[0], p[1], r, t.dist, t.base.u_p, fd, t.literal(), t.exact(), checked, rel});
    ++n;
  }
  o.require(worst <= 1e-2, std::to_string(n) + " samples, max relative error " + fmt(worst));
  o.info.push_back("literal form on crossing balls with u(p) != 0: " + std::to_string(literal_miss) +
                   " of 15 beyond 1%, max " + fmt(literal_worst) + " (rim term omitted)");
  return o;
}

// ---------------------------------------------------------------- 4

double r_max_for(const GraphDomain& domain, double dist, double cap) {
  if (domain.dini().theta(cap) * cap <= dist) return cap;
  double lo = dist, hi = cap;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * domain.dini().theta(mid) <= dist ? lo : hi) = mid;
  }
  return lo;
}

Outcome rb_sign(Suite& s) {
  Outcome o;
  std::vector<Fixture> fx;
  if (s.want("perturbed")) fx.push_back(s.perturbed(0));
  for (const Fixture* f : s.curved()) fx.push_back(*f);
  if (fx.empty()) return {"NOOP", "no fixture selected", {}};
  auto rng = s.rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CsvWriter csv(s.path("c04_rb_sign.csv"), {"fixture", "p_x", "p_y", "r", "dist", "r_theta", "R_b"});
  const int per = (200 + static_cast<int>(fx.size()) - 1) / static_cast<int>(fx.size());
  double worst = 1e300;
  int violations = 0, n = 0;
  for (const Fixture& f : fx) {
    for (int i = 0; i < per; ++i) {
      const Vec p = sample_point(f.domain, rng, 0.002, 0.1);
      const double dist = dist_to_boundary(f.domain, p);
      const double rmax = r_max_for(f.domain, dist, 0.6);
      const double r = dist + (rmax - dist) * unit(rng);
      const DerivativeTerms t = derivative_terms(*f.u, f.domain, p, r, s.quad());
      csv.row({f.name, p[0], p[1], r, dist, r * f.domain.dini().theta(r), t.R_b});
      worst = std::min(worst, t.R_b);
      if (t.R_b < -1e-8) ++violations;
      ++n;
    }
  }
  o.require(violations == 0, std::to_string(n) + " samples with r >= dist, min R_b = " + fmt(worst));
  if (s.loosened() && o.status == "PASS") o.status = "WARN";
  return o;
}

// ---------------------------------------------------------------- 5

Outcome sphere_ratio_fit(Suite& s) {
  Outcome o;
  if (!s.want("homogeneous")) return {"NOOP", "fixture homogeneous not selected", {}};
  const GraphDomain flat = GraphDomain::flat(2);
  const double r = 0.4, x0 = 0.3;
  CsvWriter csv(s.path("c05_sphere_ratio.csv"), {"field", "dist_over_r", "ratio", "predictor"});
  for (int k : {1, 2}) {
    const auto u = exact_polynomial(2, k);
    std::vector<double> lx, ly;
    double K = 0.0;
    for (double q : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const SphereRatio sr = sphere_ratio(*u, flat, vec2(x0, q * r), r, s.quad());
      csv.row({u->provenance(), q, sr.ratio, sr.predictor});
      lx.push_back(std::log(q));
      ly.push_back(std::log(sr.ratio));
      K = std::max(K, sr.ratio / sr.predictor);
    }
    const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 4; ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    o.require(slope >= 0.70, u->provenance() + ": exponent " + fmt(slope) + ", K = " + fmt(K));
  }
  return o;
}

// ---------------------------------------------------------------- 6

Outcome doubling_exponents(Suite& s) {
  Outcome o;
  bool any = false;
  CsvWriter csv(s.path("c06_doubling.csv"), {"fixture", "center_x", "center_y", "center_z", "rho", "exponent",
                                            "exponent_refined"});
  if (s.want("homogeneous")) {
    any = true;
    double worst = 0.0;
    for (int d : {2, 3}) {
      const GraphDomain flat = GraphDomain::flat(d);
      for (int k = 1; k <= (d == 2 ? 4 : 2); ++k) {
        const auto u = exact_polynomial(d, k);
        for (double rho : {0.1, 0.25}) {
          if (d == 3 && rho > 0.1) continue;
          const DoublingReport r = doubling_ratios(*u, flat, Vec::Zero(d), rho, 2.0, s.quad());
          csv.row({u->provenance(), 0.0, 0.0, 0.0, rho, r.exponent, r.exponent});
          worst = std::max(worst, std::abs(r.exponent - (d + 2.0 * k)));
        }
      }
    }
    o.require(worst <= 1e-3, "homogeneous: max |exponent - (d + 2k)| = " + fmt(worst));
  }
  for (const Fixture* f : s.curved()) {
    any = true;
    double worst = 0.0;
    bool finite = true;
    for (double x : {0.0, 0.2}) {
      const double h = x == 0.0 ? 0.0 : 0.1;
      const Vec X = vec2(x, f->domain.phi(Vec::Constant(1, x)) + h);
      for (double rho : {0.1, 0.2}) {
        const QuadratureSpec q = s.quad(1e-6);
        const DoublingReport a = doubling_ratios(*f->u, f->domain, X, rho, 2.0, q);
        const DoublingReport b = doubling_ratios(*f->u, f->domain, X, rho, 2.0, q.refined());
        csv.row({f->name, X[0], X[1], 0.0, rho, a.exponent, b.exponent});
        finite = finite && std::isfinite(a.exponent) && std::isfinite(b.exponent);
        worst = std::max(worst, std::abs(a.exponent - b.exponent) / std::abs(b.exponent));
      }
    }
    o.require(finite && worst <= 0.05, f->name + ": max relative change under refinement " + fmt(worst));
  }
  if (!any) return {"NOOP", "no fixture selected", {}};
  return o;
}

// ---------------------------------------------------------------- 7

Outcome straightening(Suite& s) {
  Outcome o;
  bool any = false;
  if (s.want("flat-map")) {
    any = true;
    double dev = 0.0;
    for (int d : {2, 3}) {
      const StraighteningMap map(GraphDomain::flat(d));
      for (double a : {-0.4, 0.0, 0.25})
        for (double sv : {0.0, 0.05, 0.3}) {
          Vec z = Vec::Constant(d, a);
          z[d - 1] = sv;
          dev = std::max({dev, (map.G(z) - z).norm(), (map.A(z) - Mat::Identity(d, d)).norm()});
        }
    }
    o.require(dev <= 1e-14, "flat: max |G - id|, |A - I| = " + fmt(dev));
  }
  CsvWriter csv(s.path("c07_straighten.csv"), {"fixture", "kind", "c_x", "c_s", "rho", "value", "scale"});
  for (const Fixture* f : s.curved()) {
    any = true;
    auto map = std::make_shared<StraighteningMap>(f->domain);
    const WorkingBall wb = map->find_working_ball(0.5);
    auto ut = extend_field(f->u, map, wb.radius);
    auto rng = s.rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double rho = 0.08;
    double worst = 0.0;
    int straddling = 0;
    for (int i = 0; i < 20; ++i) {
      Vec c(2);
      const bool straddle = i % 4 == 0;
      do {
        c << (wb.radius - rho) * unit(rng), (wb.radius - rho) * unit(rng);
        if (straddle) c[1] = 0.5 * rho * unit(rng);
      } while (c.norm() > wb.radius - rho || (!straddle && std::abs(c[1]) < rho));
      const WeakResidual w = weak_residual(*map, *ut, c, rho, s.quad());
      straddling += w.straddles;
      worst = std::max(worst, std::abs(w.normalized));
      csv.row({f->name, std::string(w.straddles ? "weak_straddling" : "weak"), c[0], c[1], rho, w.normalized, 1.0});
    }
    double jump = 0.0;
    for (double x : {-0.2, 0.05, 0.3}) {
      const ConormalJump cj = conormal_jump(*map, *ut, Vec::Constant(1, x), 0.01, 4);
      const double rel = std::abs(cj.extrapolated) / cj.flux_scale;
      jump = std::max(jump, rel);
      csv.row({f->name, std::string("conormal"), x, 0.0, 0.01, cj.extrapolated, cj.flux_scale});
    }
    o.require(worst <= 1e-5 && straddling == 5,
              f->name + ": 20 bumps (" + std::to_string(straddling) + " straddling), max weak residual " + fmt(worst));
    o.require(jump <= 1e-6, f->name + ": co-normal jump / flux " + fmt(jump));
  }
  if (!any) return {"NOOP", "no fixture selected", {}};
  return o;
}

// ---------------------------------------------------------------- 8

Outcome holder_certificate(Suite& s) {
  Outcome o;
  if (!s.want("power")) return {"NOOP", "fixture power not selected", {}};
  const StraighteningMap map(GraphDomain::power_alpha(2, 0.1, 0.5));
  const int levels = 10;
  const auto pairs = holder_pair_levels(2, 0.4, 0.1, levels, 20, s.seed());
  CsvWriter csv(s.path("c08_holder.csv"), {"alpha", "level", "h", "pairs", "constant"});
  for (double alpha : {0.5, 0.75}) {
    std::vector<HolderPair> acc;
    std::vector<double> c;
    for (int j = 0; j < levels; ++j) {
      acc.insert(acc.end(), pairs[static_cast<std::size_t>(j)].begin(), pairs[static_cast<std::size_t>(j)].end());
      const HolderCertificate hc = modulus_certificate(map, alpha, acc);
      c.push_back(hc.constant);
      csv.row({alpha, static_cast<long long>(j), 0.1 * std::pow(4.0, -j), static_cast<long long>(acc.size()), hc.constant});
    }
    if (alpha == 0.5) {
      const double change = std::abs(c[levels - 1] - c[levels - 2]) / c[levels - 2];
      o.require(change <= 0.10, "alpha 0.5: constant " + fmt(c[levels - 1]) + ", change under 4x refinement " + fmt(change));
    } else {
      const double growth = c[levels - 1] / c[0];
      o.require(growth > 10.0, "alpha 0.75: growth " + fmt(growth) + "x over " + std::to_string(levels) + " levels");
    }
  }
  return o;
}

// ---------------------------------------------------------------- 9

Outcome doubling_certificate_check(Suite& s) {
  Outcome o;
  const auto fx = s.curved();
  if (fx.empty()) return {"NOOP", "no fixture selected", {}};
  CsvWriter csv(s.path("c09_doubling_certificate.csv"), {"fixture", "seed", "samples", "sup_ratio", "argmax_x",
                                                       "argmax_s", "argmax_r"});
  QuadratureSpec ds = s.quad(1e-6);
  ds.radial = 8;
  ds.angular = 8;
  for (const Fixture* f : fx) {
    auto map = std::make_shared<StraighteningMap>(f->domain);
    const WorkingBall wb = map->find_working_ball(0.5);
    auto ut = extend_field(f->u, map, wb.radius);
    std::vector<double> sups;
    std::size_t samples = 0;
    for (unsigned seed : {s.seed(), s.seed() + 1}) {
      const DoublingCertificate dc = doubling_certificate(*ut, doubling_samples(2, wb.radius, 464, seed), ds);
      csv.row({f->name, static_cast<long long>(seed), static_cast<long long>(dc.samples), dc.sup_ratio,
               dc.argmax_center[0], dc.argmax_center[1], dc.argmax_r});
      sups.push_back(dc.sup_ratio);
      samples = dc.samples;
    }
    // Three significant figures: the two sups differ by at most half a unit in the third digit.
    const double unit = std::pow(10.0, std::floor(std::log10(sups[0])) - 2);
    const bool same = std::isfinite(sups[0]) && std::abs(sups[0] - sups[1]) <= 0.5 * unit;
    o.require(same && samples >= 500, f->name + ": sup " + fmt(sups[0]) + " / " + fmt(sups[1]) + " over " +
                                          std::to_string(samples) + " samples");
  }
  return o;
}

// ---------------------------------------------------------------- 10

Outcome critical_detection(Suite& s) {
  Outcome o;
  bool any = false;
  if (s.want("homogeneous")) {
    any = true;
    const GraphDomain flat = GraphDomain::flat(2);
    const CriticalSetEstimate e =
        find_critical_points(*exact_polynomial(2, 3), Region::domain_ball(flat, Vec::Zero(2), 1.0));
    const bool ok = e.points.size() == 1 && e.points[0].x.norm() <= 1e-8;
    o.require(ok, "Im z^3: " + std::to_string(e.points.size()) + " point(s)" +
                      (e.points.empty() ? "" : " at distance " + fmt(e.points[0].x.norm())));
    CsvWriter csv(s.path("c10_im_z3.csv"), {"x", "y", "grad_norm", "u_value", "class"});
    for (const CriticalPoint& p : e.points)
      csv.row({p.x[0], p.x[1], p.grad_norm, p.value, std::string(p.singular ? "singular" : "critical")});
  }
  if (s.want("x1x3")) {
    any = true;
    const GraphDomain flat = GraphDomain::flat(3);
    const auto rows =
        minkowski_content(*exact_polynomial(3, 2), Region::domain_ball(flat, Vec::Zero(3), 1.0), {0.1, 0.05, 0.025});
    CsvWriter csv(s.path("c10_content.csv"), {"r", "count", "count_r_pow"});
    double worst = 0.0;
    for (const ContentRow& r : rows) {
      csv.row({r.r, static_cast<long long>(r.count), r.count_r_pow});
      worst = std::max(worst, std::abs(r.count * r.r - 4.0) / 4.0);
    }
    o.require(worst <= 0.15, "x1 x3: max |count r - 4| / 4 = " + fmt(worst));
  }
  if (s.want("simon")) {
    any = true;
    const SimonFixture fx = simon_fixture(0.3, 12.0);
    CriticalOptions co;
    co.seed_spacing = 0.1;
    const CriticalSetEstimate e =
        find_critical_points(*fx.field, Region::box(vec3(-0.2, -0.2, -12.0), vec3(0.2, 0.2, 12.0)), co);
    CsvWriter csv(s.path("c10_simon.csv"), {"x", "y", "z", "grad_norm", "u_value", "class"});
    bool ok = e.points.size() == fx.critical_z.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < e.points.size(); ++i) {
      const CriticalPoint& p = e.points[i];
      csv.row({p.x[0], p.x[1], p.x[2], p.grad_norm, p.value, std::string(p.singular ? "singular" : "critical")});
      if (!ok) continue;
      // Critical points at k pi / 0.6: singular for even k.
      const long k = std::lround(fx.critical_z[i] * 0.6 / kPi);
      worst = std::max(worst, (p.x - vec3(0.0, 0.0, k * kPi / 0.6)).norm());
      ok = ok && p.singular == (k % 2 == 0);
    }
    ok = ok && worst <= 1e-8;
    o.require(ok, "Simon: " + std::to_string(e.points.size()) + " points, max position error " + fmt(worst));
  }
  if (!any) return {"NOOP", "no fixture selected", {}};
  return o;
}

// ---------------------------------------------------------------- 11

Outcome count_transfer(Suite& s) {
  Outcome o;
  struct Case {
    std::string name;
    GraphDomain domain;
    std::function<FieldPtr(const GraphDomain&)> field;
  };
  const GraphDomain flat = GraphDomain::flat(2);
  const GraphDomain bump = GraphDomain::quadratic_bump(2, 1e-3);
  const GraphDomain cosine = GraphDomain::cosine_window(2, 1e-3, 1.5);
  const std::vector<Case> cases{
      {"conformal-z3", flat, [](const GraphDomain&) -> FieldPtr { return exact_polynomial(2, 3); }},
      {"conformal-z3z5", flat, [](const GraphDomain&) -> FieldPtr { return im_complex_polynomial({0, 0, 0, 1, 0, 0.1}); }},
      {"conformal-shifted", flat, [](const GraphDomain&) -> FieldPtr { return im_complex_polynomial({0, 0.27, 0, 1}); }},
      {"conformal-bump", bump,
       [](const GraphDomain& d) -> FieldPtr { return solve_mfs(d, graph_adapted_data(d, exact_polynomial(2, 3))); }},
      {"conformal-cosine", cosine,
       [](const GraphDomain& d) -> FieldPtr {
         return solve_mfs(d, graph_adapted_data(d, im_complex_polynomial({0, 0.27, 0, 1})));
       }},
  };
  CsvWriter csv(s.path("c11_conformal.csv"), {"fixture", "N_freq", "count", "hopf_c", "count_after", "max_cr",
                                             "max_det_err"});
  const double R = 0.5;
  auto rng = s.rng(11);
  std::uniform_real_distribution<double> ux(-R, R), uy(0.02 * R, R);
  bool any = false;
  for (const Case& c : cases) {
    if (!s.want(c.name)) continue;
    any = true;
    const auto map = build_map(c.domain, R);
    const TransferResult tr = transfer_count(*map, c.field(c.domain), R);
    double cr = 0.0, det = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double x = ux(rng);
      const Vec X = vec2(x, c.domain.phi(Vec::Constant(1, x)) + uy(rng));
      cr = std::max(cr, map->cr_residual(X));
      const double g2 = map->grad_g(X).squaredNorm();
      det = std::max(det, std::abs(std::abs(map->jacobian_fd(X, 1e-3).determinant()) - g2) / g2);
    }
    csv.row({c.name, tr.N_freq, static_cast<long long>(tr.count_before), tr.hopf_c,
             static_cast<long long>(tr.count_after), cr, det});
    o.require(tr.matched && tr.count_before == tr.count_after && cr <= 1e-8 && det <= 1e-10,
              c.name + ": " + std::to_string(tr.count_before) + " -> " + std::to_string(tr.count_after) + ", CR " +
                  fmt(cr) + ", det " + fmt(det) + (tr.diagnostic.empty() ? "" : " (" + tr.diagnostic + ")"));
  }
  if (!any) return {"NOOP", "no fixture selected", {}};
  return o;
}

// ---------------------------------------------------------------- 12

Outcome spatial_variation(Suite& s) {
  Outcome o;
  bool any = false;
  const GraphDomain flat = GraphDomain::flat(2);
  CsvWriter csv(s.path("c12_spatial_variation.csv"), {"fixture", "x1", "y1", "x2", "y2", "r", "lhs", "W1", "W2",
                                                     "rhs_core"});
  if (s.want("perturbed")) {
    any = true;
    auto rng = s.rng(12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double C = 0.0;
    int n = 0;
    for (int which : {0, 1}) {
      const Fixture f = s.perturbed(which);
      for (int i = 0; i < 150; ++i) {
        const double r = i % 2 ? 0.1 : 0.2;
        const Vec X1 = vec2(unit(rng) - 0.5, 1.6 * r + 0.4 * unit(rng));
        Vec off(2);
        do {
          off << 2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0;
        } while (off.norm() > 1.0);
        Vec X2 = X1 + 0.5 * r * off;
        X2[1] = std::max(X2[1], 1.55 * r);
        const SpatialVariation sv = spatial_variation_check(*f.u, f.domain, X1, X2, r, s.quad());
        csv.row({f.name + std::to_string(which), X1[0], X1[1], X2[0], X2[1], r, sv.lhs, sv.W1, sv.W2, sv.rhs_core});
        if (sv.rhs_core > 0.0) C = std::max(C, sv.lhs / sv.rhs_core);
        ++n;
      }
    }
    o.require(std::isfinite(C) && n >= 300, std::to_string(n) + " pairs, fitted C = " + fmt(C));
  }
  if (s.want("affine")) {
    any = true;
    const auto aff = std::make_shared<PolynomialField>(
        2, std::vector<PolynomialField::Term>{{1.5, {0, 0, 0}}, {1.0, {0, 1, 0}}, {0.3, {1, 0, 0}}}, "1.5 + y + 0.3x");
    const SpatialVariation sv = spatial_variation_check(*aff, flat, vec2(0.1, 0.6), vec2(0.15, 0.62), 0.2, s.quad());
    csv.row({std::string("affine"), 0.1, 0.6, 0.15, 0.62, 0.2, sv.lhs, sv.W1, sv.W2, sv.rhs_core});
    o.require(sv.lhs <= 1e-8 && sv.rhs_core <= 1e-8, "affine: lhs " + fmt(sv.lhs) + ", rhs " + fmt(sv.rhs_core));
  }
  if (s.want("centered")) {
    any = true;
    const auto h = im_complex_polynomial({0, 0, 0, 1}, {0.1, 0.6});
    const SpatialVariation sv = spatial_variation_check(*h, flat, vec2(0.1, 0.6), vec2(0.1, 0.6), 0.2, s.quad());
    csv.row({std::string("centered"), 0.1, 0.6, 0.1, 0.6, 0.2, sv.lhs, sv.W1, sv.W2, sv.rhs_core});
    o.require(sv.lhs <= 1e-8 && sv.rhs_core <= 1e-8,
              "centered Im (z - z0)^3: lhs " + fmt(sv.lhs) + ", rhs " + fmt(sv.rhs_core));
  }
  if (!any) return {"NOOP", "no fixture selected", {}};
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget;
  Outcome (*run)(Suite&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c{
      {1, "homogeneous frequency", 5, homogeneous_frequency},
      {2, "interior monotonicity", 60, interior_monotonicity},
      {3, "derivative identity", 60, derivative_identity},
      {4, "R_b sign", 30, rb_sign},
      {5, "sphere ratio exponent", 30, sphere_ratio_fit},
      {6, "doubling exponents", 120, doubling_exponents},
      {7, "straightening exactness", 120, straightening},
      {8, "Hölder certificate", 60, holder_certificate},
      {9, "normalized doubling certificate", 120, doubling_certificate_check},
      {10, "critical detection", 60, critical_detection},
      {11, "2D count transfer", 120, count_transfer},
      {12, "spatial variation of N_C", 120, spatial_variation},
  };
  return c;
}

bool selected(const VerifyOptions& opt, int id) {
  return opt.criteria.empty() || std::find(opt.criteria.begin(), opt.criteria.end(), id) != opt.criteria.end();
}

std::vector<CriterionResult> run_suite(const VerifyOptions& opt, const std::string& dir, std::ostream* progress) {
  prepare_output(dir);
  Suite suite(opt, dir);
  std::vector<CriterionResult> out;
  for (const Criterion& c : criteria()) {
    if (!selected(opt, c.id)) continue;
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    r.budget = c.budget;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(suite);
    } catch (const std::exception& e) {
      o.status = "FAIL";
      o.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.status != "NOOP" && r.seconds > c.budget) {
      o.status = "FAIL";
      o.detail += "; runtime " + fmt(r.seconds) + " s exceeds " + fmt(c.budget) + " s";
    }
    r.status = o.status;
    r.detail = o.detail;
    r.info = o.info;
    if (progress) *progress << format_result(r) << std::flush;
    out.push_back(r);
  }
  return out;
}

std::vector<std::string> csv_files(const std::string& dir) {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

const std::vector<std::string>& verify_fixture_names() {
  static const std::vector<std::string> names{
      "homogeneous",    "perturbed",         "bump",           "cosine",           "power",
      "flat-map",       "x1x3",              "simon",          "conformal-z3",     "conformal-z3z5",
      "conformal-shifted", "conformal-bump", "conformal-cosine", "affine",          "centered"};
  return names;
}

std::vector<CriterionResult> verify_all(const VerifyOptions& opt, std::ostream* progress) {
  if (opt.fixtures)
    for (const std::string& f : *opt.fixtures)
      if (std::find(verify_fixture_names().begin(), verify_fixture_names().end(), f) == verify_fixture_names().end())
        fail(ErrorKind::Config, "cli", "verify_all", "unknown fixture '" + f + "'");
  std::vector<CriterionResult> out = run_suite(opt, opt.out_dir, progress);
  if (!selected(opt, 13)) return out;

  CriterionResult r;
  r.id = 13;
  r.title = "determinism";
  const auto t0 = std::chrono::steady_clock::now();
  const std::string second = (std::filesystem::path(opt.out_dir) / "run2").string();
  run_suite(opt, second, nullptr);
  const std::vector<std::string> a = csv_files(opt.out_dir), b = csv_files(second);
  std::size_t same = 0;
  std::string differing;
  for (const std::string& name : a) {
    const bool eq = std::find(b.begin(), b.end(), name) != b.end() &&
                    slurp((std::filesystem::path(opt.out_dir) / name).string()) ==
                        slurp((std::filesystem::path(second) / name).string());
    if (eq) ++same;
    else differing += (differing.empty() ? "" : ", ") + name;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (a.empty()) {
    r.status = "NOOP";
    r.detail = "no CSV written";
  } else {
    r.status = same == a.size() && a.size() == b.size() ? "PASS" : "FAIL";
    r.detail = std::to_string(same) + " of " + std::to_string(a.size()) + " CSVs byte-identical on rerun" +
               (differing.empty() ? "" : "; differing: " + differing);
  }
  if (progress) *progress << format_result(r) << std::flush;
  out.push_back(r);
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << r.status << " criterion " << r.id << " (" << r.title << "): " << r.detail;
  os.precision(3);
  os << " [" << std::fixed << r.seconds << " s";
  if (r.budget > 0.0) os << " / " << r.budget << " s";
  os << "]\n";
  for (const std::string& i : r.info) os << "  INFO " << i << "\n";
  return os.str();
}

}  // namespace freqlab::app
