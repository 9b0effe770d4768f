#include "freqlab/geometry.hpp"

#include "freqlab/integrate1d.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace freqlab {

namespace {

constexpr const char* kModule = "geometry";

// theta = A + B s on the segment containing [a, b] (a, b inside one segment).
double segment_integral(double A, double B, double a, double b, const char* op) {
  if (a <= 0.0) {
    if (A > 0.0) fail(ErrorKind::Numeric, kModule, op, "integral of theta(s)/s diverges at s = 0 (theta(0+) > 0)");
    return B * b;
  }
  return A * std::log(b / a) + B * (b - a);
}

}  // namespace

// ---------------------------------------------------------------- DiniParameter

DiniParameter DiniParameter::zero() { return DiniParameter{}; }

DiniParameter DiniParameter::holder(double alpha, double c_alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Domain, kModule, "holder", "alpha must lie in (0, 1]");
  if (!(c_alpha >= 0.0)) fail(ErrorKind::Domain, kModule, "holder", "C_alpha must be nonnegative");
  DiniParameter d;
  d.family_ = c_alpha == 0.0 ? DiniFamily::Zero : DiniFamily::Holder;
  d.alpha_ = alpha;
  d.c_alpha_ = c_alpha;
  return d;
}

DiniParameter DiniParameter::tabulated(std::vector<double> s, std::vector<double> theta) {
  if (s.size() != theta.size() || s.size() < 2)
    fail(ErrorKind::Domain, kModule, "tabulated", "need at least two (s, theta) samples of equal length");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0.0 || theta[i] < 0.0) fail(ErrorKind::Domain, kModule, "tabulated", "samples must be nonnegative");
    if (i > 0 && !(s[i] > s[i - 1])) fail(ErrorKind::Domain, kModule, "tabulated", "s samples must increase strictly");
    if (i > 0 && theta[i] < theta[i - 1]) fail(ErrorKind::Domain, kModule, "tabulated", "theta must be nondecreasing");
  }
  DiniParameter d;
  d.family_ = DiniFamily::Tabulated;
  d.s_ = std::move(s);
  d.theta_ = std::move(theta);
  return d;
}

bool DiniParameter::is_zero() const {
  if (family_ == DiniFamily::Zero) return true;
  if (family_ == DiniFamily::Tabulated) return theta_.back() == 0.0;
  return c_alpha_ == 0.0;
}

double DiniParameter::theta(double s) const {
  switch (family_) {
    case DiniFamily::Zero: return 0.0;
    case DiniFamily::Holder: return s <= 0.0 ? 0.0 : c_alpha_ * std::pow(s, alpha_);
    case DiniFamily::Tabulated: {
      if (s <= s_.front()) return theta_.front();
      if (s >= s_.back()) return theta_.back();
      const auto it = std::upper_bound(s_.begin(), s_.end(), s);
      const auto i = static_cast<std::size_t>(it - s_.begin()) - 1;
      const double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
      return theta_[i] + t * (theta_[i + 1] - theta_[i]);
    }
  }
  return 0.0;
}

DiniParameter DiniParameter::scaled(double scale) const {
  DiniParameter d = *this;
  if (family_ == DiniFamily::Holder) d.c_alpha_ = c_alpha_ * std::pow(scale, alpha_);
  if (family_ == DiniFamily::Tabulated)
    for (double& v : d.s_) v /= scale;
  return d;
}

double dini_integral(const DiniParameter& dini, double a, double b) {
  if (!(a >= 0.0 && b > a)) fail(ErrorKind::Domain, kModule, "dini_integral", "require 0 <= a < b");
  switch (dini.family()) {
    case DiniFamily::Zero: return 0.0;
    case DiniFamily::Holder:
      return dini.c_alpha() * (std::pow(b, dini.alpha()) - std::pow(a, dini.alpha())) / dini.alpha();
    case DiniFamily::Tabulated: {
      const auto& s = dini.samples_s();
      const auto& th = dini.samples_theta();
      // Breakpoints: a, the samples inside (a, b), b.
      std::vector<double> cuts{a};
      for (double v : s)
        if (v > a && v < b) cuts.push_back(v);
      cuts.push_back(b);
      double total = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k];
        const double hi = cuts[k + 1];
        const double mid = 0.5 * (lo + hi);
        double A;
        double B;
        if (mid <= s.front()) {
          A = th.front();
          B = 0.0;
        } else if (mid >= s.back()) {
          A = th.back();
          B = 0.0;
        } else {
          const auto it = std::upper_bound(s.begin(), s.end(), mid);
          const auto i = static_cast<std::size_t>(it - s.begin()) - 1;
          B = (th[i + 1] - th[i]) / (s[i + 1] - s[i]);
          A = th[i] - B * s[i];
        }
        total += segment_integral(A, B, lo, hi, "dini_integral");
      }
      return total;
    }
  }
  return 0.0;
}

double smooth_theta(const DiniParameter& dini, double r) {
  if (!(r > 0.0)) fail(ErrorKind::Domain, kModule, "smooth_theta", "r must be positive");
  const double ln2sq = std::numbers::ln2 * std::numbers::ln2;
  switch (dini.family()) {
    case DiniFamily::Zero: return 0.0;
    case DiniFamily::Holder: {
      const double al = dini.alpha();
      const double f = std::pow(2.0, al) - 1.0;
      return dini.c_alpha() * f * f * std::pow(r, al) / (al * al * ln2sq);
    }
    case DiniFamily::Tabulated: {
      // Outer integral split where t or 2t crosses a sample, so each piece is smooth.
      std::vector<double> cuts{r};
      for (double v : dini.samples_s()) {
        if (v > r && v < 2 * r) cuts.push_back(v);
        if (0.5 * v > r && 0.5 * v < 2 * r) cuts.push_back(0.5 * v);
      }
      cuts.push_back(2 * r);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      double total = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const QuadResult q = adaptive_gauss(
            [&](double t, double* out) { out[0] = dini_integral(dini, t, 2 * t) / t; }, 1, cuts[k], cuts[k + 1], 16,
            1e-13, 20);
        total += q[0];
      }
      return total / ln2sq;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- GraphDomain

const char* to_string(DomainFamily family) {
  switch (family) {
    case DomainFamily::Flat: return "flat";
    case DomainFamily::QuadraticBump: return "quadratic-bump";
    case DomainFamily::PowerAlpha: return "power-alpha";
    case DomainFamily::CosineWindow: return "cosine-window";
    case DomainFamily::Custom: return "custom";
  }
  return "unknown";
}

namespace {

void check_dim(int d, const char* op) {
  if (d != 2 && d != 3) fail(ErrorKind::Domain, kModule, op, "dimension must be 2 or 3");
}

}  // namespace

GraphDomain GraphDomain::flat(int d, double R) {
  check_dim(d, "flat");
  GraphDomain g;
  g.d_ = d;
  g.R_ = R;
  g.family_ = DomainFamily::Flat;
  g.shift_ = Vec::Zero(d - 1);
  return g;
}

GraphDomain GraphDomain::quadratic_bump(int d, double a, double R) {
  GraphDomain g = flat(d, R);
  g.family_ = DomainFamily::QuadraticBump;
  g.a_ = a;
  g.dini_ = DiniParameter::holder(1.0, 2.0 * std::abs(a));
  return g;
}

GraphDomain GraphDomain::power_alpha(int d, double a, double alpha, double R) {
  GraphDomain g = flat(d, R);
  g.family_ = DomainFamily::PowerAlpha;
  g.a_ = a;
  g.alpha_ = alpha;
  g.dini_ = DiniParameter::holder(alpha, std::abs(a) * (1.0 + alpha) * std::pow(2.0, 1.0 - alpha));
  return g;
}

GraphDomain GraphDomain::cosine_window(int d, double a, double omega, double R) {
  GraphDomain g = flat(d, R);
  g.family_ = DomainFamily::CosineWindow;
  g.a_ = a;
  g.omega_ = omega;
  g.dini_ = DiniParameter::holder(1.0, std::abs(a) * omega * omega);
  return g;
}

GraphDomain GraphDomain::custom(int d, PhiFn phi, GradFn grad_phi, DiniParameter dini, double R) {
  GraphDomain g = flat(d, R);
  g.family_ = DomainFamily::Custom;
  g.custom_phi_ = std::make_shared<const PhiFn>(std::move(phi));
  g.custom_grad_ = std::make_shared<const GradFn>(std::move(grad_phi));
  g.dini_ = std::move(dini);
  return g;
}

std::string GraphDomain::describe() const {
  std::ostringstream os;
  os << to_string(family_) << "(d=" << d_ << ", a=" << a_;
  if (family_ == DomainFamily::PowerAlpha) os << ", alpha=" << alpha_;
  if (family_ == DomainFamily::CosineWindow) os << ", omega=" << omega_;
  os << ", R=" << R_ << ")";
  return os.str();
}

double GraphDomain::base_phi(const Vec& x) const {
  switch (family_) {
    case DomainFamily::Flat: return 0.0;
    case DomainFamily::QuadraticBump: return a_ * x.squaredNorm();
    case DomainFamily::PowerAlpha: return a_ * std::pow(x.norm(), 1.0 + alpha_);
    case DomainFamily::CosineWindow: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) s += 1.0 - std::cos(omega_ * x[i]);
      return a_ * s;
    }
    case DomainFamily::Custom: return (*custom_phi_)(x);
  }
  return 0.0;
}

Vec GraphDomain::base_grad(const Vec& x) const {
  switch (family_) {
    case DomainFamily::Flat: return Vec::Zero(x.size());
    case DomainFamily::QuadraticBump: return 2.0 * a_ * x;
    case DomainFamily::PowerAlpha: {
      const double n = x.norm();
      if (n == 0.0) return Vec::Zero(x.size());
      return (a_ * (1.0 + alpha_) * std::pow(n, alpha_ - 1.0)) * x;
    }
    case DomainFamily::CosineWindow: {
      Vec g(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = a_ * omega_ * std::sin(omega_ * x[i]);
      return g;
    }
    case DomainFamily::Custom: return (*custom_grad_)(x);
  }
  return Vec::Zero(x.size());
}

double GraphDomain::phi(const Vec& x) const {
  if (scale_ == 1.0 && lift_ == 0.0 && shift_.isZero(0.0)) return base_phi(x);
  return (base_phi(shift_ + scale_ * x) - lift_) / scale_;
}

Vec GraphDomain::grad_phi(const Vec& x) const {
  if (scale_ == 1.0 && shift_.isZero(0.0)) return base_grad(x);
  return base_grad(shift_ + scale_ * x);
}

double GraphDomain::gap(const Vec& X) const { return X[d_ - 1] - phi(X.head(d_ - 1)); }

Vec GraphDomain::boundary_point(const Vec& x) const {
  Vec X(d_);
  X.head(d_ - 1) = x;
  X[d_ - 1] = phi(x);
  return X;
}

GraphDomain GraphDomain::rescaled(const Vec& X, double r) const {
  if (!(r > 0.0)) fail(ErrorKind::Domain, kModule, "rescaled", "scale must be positive");
  GraphDomain g = *this;
  g.shift_ = shift_ + scale_ * X.head(d_ - 1);
  g.lift_ = lift_ + scale_ * X[d_ - 1];
  g.scale_ = scale_ * r;
  g.dini_ = dini_.scaled(r);
  g.R_ = R_ / r;
  return g;
}

Vec normal_vector(const GraphDomain& domain, const Vec& x) {
  const Vec g = domain.grad_phi(x);
  Vec n(domain.dim());
  n.head(domain.dim() - 1) = -g;
  n[domain.dim() - 1] = 1.0;
  return n / std::sqrt(1.0 + g.squaredNorm());
}

// ---------------------------------------------------------------- nearest boundary

namespace {

NearestBoundary nearest_impl(const GraphDomain& domain, const Vec& p, const char* op) {
  const int d = domain.dim();
  if (p.size() != d) fail(ErrorKind::Domain, kModule, op, "point dimension mismatch");
  const Vec pt = p.head(d - 1);
  const double gap = domain.gap(p);
  const double w = 4.0 * gap;
  auto dist2 = [&](const Vec& x) {
    const double dz = domain.phi(x) - p[d - 1];
    return (x - pt).squaredNorm() + dz * dz;
  };

  // Coarse scan of the window, then Gauss-Newton on r(x) = (x - p', phi(x) - p_d).
  Vec best = pt;
  double best_f = dist2(pt);
  if (d == 2) {
    const int m = 64;
    for (int i = 0; i <= m; ++i) {
      Vec x(1);
      x[0] = pt[0] - w + 2.0 * w * i / m;
      const double f = dist2(x);
      if (f < best_f) {
        best_f = f;
        best = x;
      }
    }
  } else {
    const int nr = 16;
    const int na = 32;
    for (int i = 1; i <= nr; ++i) {
      for (int j = 0; j < na; ++j) {
        const double t = w * i / nr;
        const double a = 2.0 * std::numbers::pi * j / na;
        Vec x(2);
        x << pt[0] + t * std::cos(a), pt[1] + t * std::sin(a);
        const double f = dist2(x);
        if (f < best_f) {
          best_f = f;
          best = x;
        }
      }
    }
  }

  Vec x = best;
  double f = best_f;
  for (int it = 0; it < 200; ++it) {
    const Vec g = domain.grad_phi(x);
    const double rz = domain.phi(x) - p[d - 1];
    // J = [I; g^T], J^T J = I + g g^T, J^T r = (x - p') + rz g.
    Mat JtJ = Mat::Identity(d - 1, d - 1) + g * g.transpose();
    const Vec Jtr = (x - pt) + rz * g;
    const Vec step = -JtJ.ldlt().solve(Jtr);
    double lam = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Vec xn = x + lam * step;
      const double fn = dist2(xn);
      if (fn <= f) {
        moved = fn < f || lam * step.norm() > 0;
        x = xn;
        f = fn;
        break;
      }
      lam *= 0.5;
    }
    if (!moved || lam * step.norm() <= 1e-16 * (1.0 + x.norm())) break;
  }
  if (w > 0.0 && (x - pt).norm() > 0.999 * w)
    fail(ErrorKind::Numeric, kModule, op, "minimizer escapes the search window at " + format_point(p));
  NearestBoundary nb;
  nb.q = domain.boundary_point(x);
  nb.dist = std::sqrt(std::max(f, 0.0));
  // The vertical gap is always an upper bound.
  if (nb.dist > gap) {
    nb.dist = gap;
    nb.q = domain.boundary_point(pt);
  }
  return nb;
}

}  // namespace

NearestBoundary nearest_boundary(const GraphDomain& domain, const Vec& p) {
  if (!(domain.gap(p) > 0.0))
    fail(ErrorKind::Domain, kModule, "nearest_boundary", "point " + format_point(p) + " is not inside D");
  return nearest_impl(domain, p, "nearest_boundary");
}

NearestBoundary nearest_boundary_closure(const GraphDomain& domain, const Vec& p) {
  const double gap = domain.gap(p);
  if (gap < 0.0) fail(ErrorKind::Domain, kModule, "nearest_boundary", "point " + format_point(p) + " lies below the graph");
  if (gap == 0.0) return NearestBoundary{0.0, p};
  return nearest_impl(domain, p, "nearest_boundary");
}

CriticalScale critical_scale(const GraphDomain& domain, const Vec& p) {
  CriticalScale cs;
  cs.p = p;
  cs.dist = nearest_boundary(domain, p).dist;
  if (domain.dini().is_zero()) return cs;
  const DiniParameter& dini = domain.dini();
  auto f = [&](double r) { return r * smooth_theta(dini, r) - cs.dist; };
  double lo = cs.dist;
  double hi = 5.0 * domain.R();
  if (f(lo) > 0.0) fail(ErrorKind::Numeric, kModule, "critical_scale", "r theta~(r) exceeds dist already at r = dist");
  if (f(hi) < 0.0) fail(ErrorKind::Numeric, kModule, "critical_scale", "no root in bracket [dist, 5R]");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  cs.r_cs = 0.5 * (lo + hi);
  return cs;
}

AdmissibilityReport admissibility(const GraphDomain& domain, double R) {
  AdmissibilityReport rep;
  rep.R = R;
  rep.theta_8R = domain.dini().theta(8.0 * R);
  rep.theta_ok = rep.theta_8R < 1.0 / 72.0;
  try {
    rep.dini_16R = dini_integral(domain.dini(), 0.0, 16.0 * R);
    rep.dini_ok = rep.dini_16R <= 1.0;
  } catch (const Error&) {
    rep.dini_16R = std::numeric_limits<double>::infinity();
    rep.dini_ok = false;
  }
  return rep;
}

}  // namespace freqlab
