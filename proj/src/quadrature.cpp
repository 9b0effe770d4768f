#include "freqlab/quadrature.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace freqlab {

namespace {

constexpr const char* kModule = "quadrature";
constexpr double kPi = std::numbers::pi;

QuadratureSpec validated(const QuadratureSpec& s, const char* op) {
  if (s.radial < 2 || s.angular < 4 || !(s.tol > 0.0) || s.max_depth < 1)
    fail(ErrorKind::Domain, kModule, op, "invalid QuadratureSpec");
  return s;
}

// Polar frame about p: axis points away from the nearest boundary point.
struct Frame {
  Vec p;
  Vec axis;
  Vec b1;
  Vec b2;
  double dist = 0.0;
  Vec foot;  // tangential coordinates of the nearest boundary point
};

Frame make_frame(const GraphDomain& domain, const Vec& p, const char* op) {
  if (p.size() != domain.dim()) fail(ErrorKind::Domain, kModule, op, "point dimension mismatch");
  const NearestBoundary nb = nearest_boundary_closure(domain, p);
  Frame fr;
  fr.p = p;
  fr.dist = nb.dist;
  fr.foot = domain.tangential(nb.q);
  const int d = domain.dim();
  if (nb.dist > 0.0) {
    fr.axis = (p - nb.q) / nb.dist;
  } else {
    fr.axis = normal_vector(domain, domain.tangential(p));
  }
  if (d == 2) {
    fr.b1 = vec2(fr.axis[1], -fr.axis[0]);
  } else {
    // Any orthonormal completion; the choice is fixed for reproducibility.
    Vec helper = std::abs(fr.axis[0]) < 0.9 ? vec3(1, 0, 0) : vec3(0, 1, 0);
    fr.b1 = (helper - helper.dot(fr.axis) * fr.axis).normalized();
    Eigen::Vector3d a3 = fr.axis;
    Eigen::Vector3d b3 = fr.b1;
    fr.b2 = a3.cross(b3);
  }
  return fr;
}

struct Checked {
  const PointIntegrand& f;
  int k;
  const char* op;
  void operator()(const Vec& X, double* out) const {
    f(X, out);
    for (int c = 0; c < k; ++c)
      if (!std::isfinite(out[c]))
        fail(ErrorKind::Numeric, kModule, op, "integrand returned a non-finite value at " + format_point(X));
  }
};

double find_root(const std::function<double(double)>& h, double a, double b, double ha, double hb) {
  boost::uintmax_t iters = 100;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto res = boost::math::tools::toms748_solve(h, a, b, ha, hb, tol, iters);
  return 0.5 * (res.first + res.second);
}

// Sub-intervals of [lo, hi] where h > 0, located by sampling m+1 points and refining sign changes.
std::vector<std::pair<double, double>> positive_intervals(const std::function<double(double)>& h, double lo,
                                                          double hi, int m) {
  std::vector<double> t(static_cast<std::size_t>(m + 1));
  std::vector<double> v(static_cast<std::size_t>(m + 1));
  for (int i = 0; i <= m; ++i) {
    t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / m;
    v[static_cast<std::size_t>(i)] = h(t[static_cast<std::size_t>(i)]);
  }
  std::vector<std::pair<double, double>> out;
  bool inside = v[0] > 0.0;
  double start = lo;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const bool next = v[i + 1] > 0.0;
    if (next == inside) continue;
    const double root = find_root(h, t[i], t[i + 1], v[i], v[i + 1]);
    if (inside) {
      out.emplace_back(start, root);
    } else {
      start = root;
    }
    inside = next;
  }
  if (inside) out.emplace_back(start, hi);
  return out;
}

// Integral over the sphere of radius rho about the frame center, restricted to D.
QuadResult sphere_layer(const Checked& f, int k, const GraphDomain& domain, const Frame& fr, double rho,
                        const QuadratureSpec& spec, double tol) {
  const int d = domain.dim();
  const bool full = rho < fr.dist;
  Vec X(d);
  if (d == 2) {
    auto point = [&](double th) {
      X = fr.p + rho * (std::cos(th) * fr.axis + std::sin(th) * fr.b1);
      return X;
    };
    if (full) {
      return periodic_trapezoid([&](double th, double* out) { f(point(th), out); }, k, 2 * kPi, spec.angular, tol, 8)
          .scaled(rho);
    }
    auto h = [&](double th) { return domain.gap(point(th)); };
    QuadResult total;
    total.components = k;
    for (const auto& [a, b] : positive_intervals(h, -kPi, kPi, 64)) {
      total += adaptive_gauss([&](double th, double* out) { f(point(th), out); }, k, a, b, spec.angular, tol,
                              spec.max_depth);
    }
    return total.scaled(rho);
  }

  const int meridian_order = std::max(spec.angular / 2, 8);
  auto meridian = [&](double psi, double* out) {
    const Vec dir = std::cos(psi) * fr.b1 + std::sin(psi) * fr.b2;
    auto point = [&](double th) {
      X = fr.p + rho * (std::cos(th) * fr.axis + std::sin(th) * dir);
      return X;
    };
    double buf[kMaxComponents];
    auto g = [&](double th, double* o) {
      f(point(th), buf);
      const double s = std::sin(th);
      for (int c = 0; c < k; ++c) o[c] = buf[c] * s;
    };
    QuadResult acc;
    acc.components = k;
    if (full) {
      acc = adaptive_gauss(g, k, 0.0, kPi, meridian_order, tol, spec.max_depth);
    } else {
      auto h = [&](double th) { return domain.gap(point(th)); };
      for (const auto& [a, b] : positive_intervals(h, 0.0, kPi, 32))
        acc += adaptive_gauss(g, k, a, b, meridian_order, tol, spec.max_depth);
    }
    for (int c = 0; c < k; ++c) out[c] = acc[c];
  };
  return periodic_trapezoid(meridian, k, 2 * kPi, std::max(spec.angular / 2, 8), tol, 6).scaled(rho * rho);
}

QuadResult ball_impl(const Checked& f, int k, const GraphDomain& domain, const Frame& fr, double r_in, double r,
                     const QuadratureSpec& spec) {
  const double inner_tol = 0.1 * spec.tol;
  auto layer = [&](double rho, double* out) {
    const QuadResult s = sphere_layer(f, k, domain, fr, rho, spec, inner_tol);
    for (int c = 0; c < k; ++c) out[c] = s[c];
  };
  QuadResult total;
  total.components = k;
  const double dist = fr.dist;
  if (r_in < dist) total += adaptive_gauss(layer, k, r_in, std::min(dist, r), spec.radial, spec.tol, spec.max_depth);
  if (r > dist) {
    if (r_in <= dist) {
      // rho = dist + (r - dist) tau^2 removes the square-root onset of the cut-off arcs.
      const double span = r - dist;
      double buf[kMaxComponents];
      auto sub = [&](double tau, double* out) {
        layer(dist + span * tau * tau, buf);
        const double jac = 2.0 * span * tau;
        for (int c = 0; c < k; ++c) out[c] = buf[c] * jac;
      };
      total += adaptive_gauss(sub, k, 0.0, 1.0, spec.radial, spec.tol, spec.max_depth);
    } else {
      total += adaptive_gauss(layer, k, r_in, r, spec.radial, spec.tol, spec.max_depth);
    }
  }
  return total;
}

}  // namespace

QuadratureSpec QuadratureSpec::refined() const {
  QuadratureSpec s = *this;
  s.radial *= 2;
  s.angular *= 2;
  s.tol /= 100.0;
  return s;
}

QuadResult ball_integral(const PointIntegrand& f, int k, const GraphDomain& domain, const Vec& p, double r,
                         const QuadratureSpec& spec, double r_inner) {
  validated(spec, "ball_integral");
  if (!(r > 0.0) || r_inner < 0.0 || r_inner >= r) fail(ErrorKind::Domain, kModule, "ball_integral", "need 0 <= r_inner < r");
  if (k < 1 || k > kMaxComponents) fail(ErrorKind::Domain, kModule, "ball_integral", "bad component count");
  const Frame fr = make_frame(domain, p, "ball_integral");
  const Checked cf{f, k, "ball_integral"};
  return ball_impl(cf, k, domain, fr, r_inner, r, spec);
}

QuadResult sphere_cap_integral(const PointIntegrand& f, int k, const GraphDomain& domain, const Vec& p, double r,
                               const QuadratureSpec& spec) {
  validated(spec, "sphere_cap_integral");
  if (!(r > 0.0)) fail(ErrorKind::Domain, kModule, "sphere_cap_integral", "r must be positive");
  if (k < 1 || k > kMaxComponents) fail(ErrorKind::Domain, kModule, "sphere_cap_integral", "bad component count");
  const Frame fr = make_frame(domain, p, "sphere_cap_integral");
  const Checked cf{f, k, "sphere_cap_integral"};
  return sphere_layer(cf, k, domain, fr, r, spec, spec.tol);
}

QuadResult boundary_patch_integral(const PatchIntegrand& f, int k, const GraphDomain& domain, const Vec& p,
                                   double r, const QuadratureSpec& spec) {
  validated(spec, "boundary_patch_integral");
  if (!(r > 0.0)) fail(ErrorKind::Domain, kModule, "boundary_patch_integral", "r must be positive");
  if (k < 1 || k > kMaxComponents) fail(ErrorKind::Domain, kModule, "boundary_patch_integral", "bad component count");
  const Frame fr = make_frame(domain, p, "boundary_patch_integral");
  QuadResult total;
  total.components = k;
  if (r <= fr.dist) return total;
  const int d = domain.dim();

  auto g = [&](const Vec& x) { return (domain.boundary_point(x) - p).squaredNorm() - r * r; };
  auto eval = [&](const Vec& x, double* out) {
    const Vec X = domain.boundary_point(x);
    const Vec grad = domain.grad_phi(x);
    const double area = std::sqrt(1.0 + grad.squaredNorm());
    Vec n(d);
    n.head(d - 1) = -grad / area;
    n[d - 1] = 1.0 / area;
    f(X, n, out);
    for (int c = 0; c < k; ++c) {
      if (!std::isfinite(out[c]))
        fail(ErrorKind::Numeric, kModule, "boundary_patch_integral", "non-finite integrand at " + format_point(X));
      out[c] *= area;
    }
  };
  // Distance from the foot along direction e to the patch edge.
  auto edge = [&](const Vec& e) {
    const double step = r / 8.0;
    double t0 = 0.0;
    double g0 = g(fr.foot);
    for (int i = 1; i <= 64; ++i) {
      const double t1 = step * i;
      const double g1 = g(fr.foot + t1 * e);
      if (g1 > 0.0) {
        return find_root([&](double t) { return g(fr.foot + t * e); }, t0, t1, g0, g1);
      }
      t0 = t1;
      g0 = g1;
    }
    fail(ErrorKind::Numeric, kModule, "boundary_patch_integral", "patch edge not found");
  };

  if (d == 2) {
    const double right = edge(Vec::Constant(1, 1.0));
    const double left = edge(Vec::Constant(1, -1.0));
    Vec x(1);
    return adaptive_gauss(
        [&](double t, double* out) {
          x[0] = t;
          eval(x, out);
        },
        k, fr.foot[0] - left, fr.foot[0] + right, spec.angular, spec.tol, spec.max_depth);
  }

  const double inner_tol = 0.1 * spec.tol;
  auto ray = [&](double psi, double* out) {
    Vec e(2);
    e << std::cos(psi), std::sin(psi);
    const double tmax = edge(e);
    Vec x(2);
    const QuadResult q = adaptive_gauss(
        [&](double t, double* o) {
          x = fr.foot + t * e;
          eval(x, o);
          for (int c = 0; c < k; ++c) o[c] *= t;
        },
        k, 0.0, tmax, spec.radial, inner_tol, spec.max_depth);
    for (int c = 0; c < k; ++c) out[c] = q[c];
  };
  return periodic_trapezoid(ray, k, 2 * kPi, std::max(spec.angular / 2, 8), spec.tol, 6);
}

QuadResult sphere_rim_integral(const PointIntegrand& f, int k, const GraphDomain& domain, const Vec& p, double r,
                               const QuadratureSpec& spec) {
  validated(spec, "sphere_rim_integral");
  if (!(r > 0.0)) fail(ErrorKind::Domain, kModule, "sphere_rim_integral", "r must be positive");
  if (k < 1 || k > kMaxComponents) fail(ErrorKind::Domain, kModule, "sphere_rim_integral", "bad component count");
  const Frame fr = make_frame(domain, p, "sphere_rim_integral");
  const Checked cf{f, k, "sphere_rim_integral"};
  QuadResult total;
  total.components = k;
  if (r <= fr.dist) return total;
  const int d = domain.dim();
  double buf[kMaxComponents];
  Vec X(d);

  if (d == 2) {
    auto point = [&](double th) {
      X = fr.p + r * (std::cos(th) * fr.axis + std::sin(th) * fr.b1);
      return X;
    };
    auto h = [&](double th) { return domain.gap(point(th)); };
    for (const auto& [a, b] : positive_intervals(h, -kPi, kPi, 64)) {
      for (double t : {a, b}) {
        if (t == -kPi || t == kPi) continue;
        cf(point(t), buf);
        for (int c = 0; c < k; ++c) total.value[static_cast<std::size_t>(c)] += buf[c];
      }
    }
    return total;
  }

  auto rim = [&](double psi, double* out) {
    const Vec dir = std::cos(psi) * fr.b1 + std::sin(psi) * fr.b2;
    const Vec ddir = -std::sin(psi) * fr.b1 + std::cos(psi) * fr.b2;
    auto omega = [&](double th) -> Vec { return std::cos(th) * fr.axis + std::sin(th) * dir; };
    auto h = [&](double th) { return domain.gap(fr.p + r * omega(th)); };
    for (int c = 0; c < k; ++c) out[c] = 0.0;
    for (const auto& [a, b] : positive_intervals(h, 0.0, kPi, 32)) {
      for (double th : {a, b}) {
        if (th == 0.0 || th == kPi) continue;
        X = fr.p + r * omega(th);
        Vec gg(3);
        gg.head(2) = -domain.grad_phi(domain.tangential(X));
        gg[2] = 1.0;
        const Vec w_th = -std::sin(th) * fr.axis + std::cos(th) * dir;
        const Vec w_psi = std::sin(th) * ddir;
        const double denom = gg.dot(w_th);
        if (denom == 0.0) fail(ErrorKind::Numeric, kModule, "sphere_rim_integral", "rim tangent to a meridian");
        const double dth = -gg.dot(w_psi) / denom;
        const double speed = r * (w_th * dth + w_psi).norm();
        cf(X, buf);
        for (int c = 0; c < k; ++c) out[c] += buf[c] * speed;
      }
    }
  };
  return periodic_trapezoid(rim, k, 2 * kPi, std::max(spec.angular / 2, 8), spec.tol, 6);
}

QuadResult ball_integral(const std::function<double(const Vec&)>& f, const GraphDomain& domain, const Vec& p,
                         double r, const QuadratureSpec& spec) {
  return ball_integral([&](const Vec& X, double* out) { out[0] = f(X); }, 1, domain, p, r, spec);
}

QuadResult sphere_cap_integral(const std::function<double(const Vec&)>& f, const GraphDomain& domain, const Vec& p,
                               double r, const QuadratureSpec& spec) {
  return sphere_cap_integral([&](const Vec& X, double* out) { out[0] = f(X); }, 1, domain, p, r, spec);
}

QuadResult boundary_patch_integral(const std::function<double(const Vec&)>& f, const GraphDomain& domain,
                                   const Vec& p, double r, const QuadratureSpec& spec) {
  return boundary_patch_integral([&](const Vec& X, const Vec&, double* out) { out[0] = f(X); }, 1, domain, p, r,
                                 spec);
}

}  // namespace freqlab
