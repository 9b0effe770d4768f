#include "freqlab/conformal2d.hpp"

#include "freqlab/frequency.hpp"
#include "freqlab/integrate1d.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace freqlab {

namespace {

constexpr const char* kModule = "conformal2d";
constexpr double kPi = std::numbers::pi;
constexpr double kTableRadius = 1.8;  // in units of R
constexpr double kTableDepth = 0.5;   // below the graph, in units of R

Vec to_vec(std::complex<double> w) { return vec2(w.real(), w.imag()); }

}  // namespace

ConformalMap2D::ConformalMap2D(GraphDomain domain, double R, const ConformalOptions& opt)
    : domain_(std::move(domain)), R_(R) {
  const char* op = "build_map";
  if (domain_.dim() != 2) fail(ErrorKind::Domain, kModule, op, "the conformal map needs d = 2");
  if (!(R > 0.0)) fail(ErrorKind::Domain, kModule, op, "R must be positive");
  const AdmissibilityReport adm = admissibility(domain_, R);
  if (!adm.admissible()) {
    std::ostringstream os;
    os << "domain not admissible at R = " << R << " (theta(8R) = " << adm.theta_8R << ", Dini integral to 16R = "
       << adm.dini_16R << ")";
    fail(ErrorKind::Precondition, kModule, op, os.str());
  }

  MfsOptions mo = opt.mfs;
  if (!(mo.window_radius > 0.0)) mo.window_radius = 2.0 * R;
  const GraphDomain& D = domain_;
  g_ = solve_mfs(D, [&D](const Vec& X) { return D.gap(X); }, mo);

  // sup |g| over D ∩ B_{7R/4} is attained on the arc (g = 0 on the graph).
  const double ra = 1.75 * R;
  auto arc = [&](double t) { return vec2(ra * std::cos(t), ra * std::sin(t)); };
  double best_t = 0.5 * kPi, best = -1.0;
  const int n = 4000;
  for (int k = 1; k < n; ++k) {
    const double t = kPi * k / n;
    const Vec X = arc(t);
    if (!D.contains(X)) continue;
    const double v = std::abs(g_->value(X));
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  {
    double a = best_t - kPi / n, b = best_t + kPi / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
      const double c = b - gr * (b - a), e = a + gr * (b - a);
      const double fc = D.contains(arc(c)) ? std::abs(g_->value(arc(c))) : -1.0;
      const double fe = D.contains(arc(e)) ? std::abs(g_->value(arc(e))) : -1.0;
      if (fc > fe) b = e;
      else a = c;
    }
    const double t = 0.5 * (a + b);
    if (D.contains(arc(t))) best = std::max(best, std::abs(g_->value(arc(t))));
  }
  if (!(best > 0.0)) fail(ErrorKind::Degenerate, kModule, op, "g vanishes on the arc");
  normalizer_ = best;

  // Conjugate table, marched from the origin along x = 0 and then along rows.
  h_ = R / opt.table_per_R;
  const int kx = static_cast<int>(std::ceil(kTableRadius * R / h_));
  const int ky_lo = static_cast<int>(std::ceil(kTableDepth * R / h_)) + 1;
  nx_ = 2 * kx + 1;
  ny_ = ky_lo + kx + 1;
  x0_ = -kx * h_;
  y0_ = -ky_lo * h_;
  table_.assign(static_cast<std::size_t>(nx_) * ny_, 0.0);
  valid_.assign(table_.size(), 0);
  auto pos = [&](int i, int j) { return vec2(x0_ + i * h_, y0_ + j * h_); };
  auto admissible_node = [&](const Vec& X) {
    return X.norm() <= kTableRadius * R * (1.0 + 1e-12) && D.gap(X) >= -kTableDepth * R;
  };
  auto at = [&](int i, int j) -> std::size_t { return static_cast<std::size_t>(j) * nx_ + i; };
  const Vec O = D.boundary_point(Vec::Zero(1));
  const int ic = kx;
  const int jc = static_cast<int>(std::lround((O[1] - y0_) / h_));
  if (!admissible_node(pos(ic, jc))) fail(ErrorKind::Numeric, kModule, op, "origin node outside the table");
  table_[at(ic, jc)] = segment_integral(O, pos(ic, jc), 1);
  valid_[at(ic, jc)] = 1;
  for (int dir : {1, -1}) {
    for (int j = jc + dir; j >= 0 && j < ny_; j += dir) {
      if (!admissible_node(pos(ic, j))) break;
      table_[at(ic, j)] = table_[at(ic, j - dir)] + segment_integral(pos(ic, j - dir), pos(ic, j), 1);
      valid_[at(ic, j)] = 1;
    }
  }
  for (int j = 0; j < ny_; ++j) {
    if (!valid_[at(ic, j)]) continue;
    for (int dir : {1, -1}) {
      for (int i = ic + dir; i >= 0 && i < nx_; i += dir) {
        if (!admissible_node(pos(i, j))) break;
        table_[at(i, j)] = table_[at(i - dir, j)] + segment_integral(pos(i - dir, j), pos(i, j), 1);
        valid_[at(i, j)] = 1;
      }
    }
  }
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      if (valid_[at(i, j)]) {
        node_pos_.push_back(pos(i, j));
        node_phi_.emplace_back(table_[at(i, j)], g(pos(i, j)));
      }

  // Hopf bound and boundary image on ∂D ∩ B_{3R/2}.
  hopf_c_ = std::numeric_limits<double>::infinity();
  const int m = std::max(10, opt.boundary_samples);
  for (int k = 0; k <= m; ++k) {
    const double x = -1.5 * R + 3.0 * R * k / m;
    const Vec X = D.boundary_point(Vec::Constant(1, x));
    if (X.norm() > 1.5 * R) continue;
    hopf_c_ = std::min(hopf_c_, grad_g(X).squaredNorm());
    boundary_image_ = std::max(boundary_image_, std::abs(g(X)));
  }
  if (!(hopf_c_ >= opt.hopf_floor)) {
    std::ostringstream os;
    os << "map quality: Hopf bound min |∇g|^2 = " << hopf_c_ << " below the floor " << opt.hopf_floor;
    fail(ErrorKind::Quality, kModule, op, os.str());
  }
  b2_radius_ = std::numeric_limits<double>::infinity();
  for (int k = 1; k < m; ++k) {
    const double t = kPi * k / m;
    const Vec X = vec2(R * std::cos(t), R * std::sin(t));
    if (D.contains(X)) b2_radius_ = std::min(b2_radius_, std::abs(phi(X)));
  }
}

double ConformalMap2D::g(const Vec& X) const { return g_->value(X) / normalizer_; }

Vec ConformalMap2D::grad_g(const Vec& X) const { return g_->value_grad(X).grad / normalizer_; }

double ConformalMap2D::segment_integral(const Vec& A, const Vec& B, int panels) const {
  // d g~ = g_y dx - g_x dy
  const GaussRule& rule = gauss_legendre(16);
  const Vec dX = B - A;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = double(p) / panels, b = double(p + 1) / panels;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[k];
      const Vec gg = g_->value_grad(A + t * dX).grad;
      sum += 0.5 * (b - a) * rule.weights[k] * (gg[1] * dX[0] - gg[0] * dX[1]);
    }
  }
  return sum / normalizer_;
}

Vec ConformalMap2D::nearest_node(const Vec& X, double* value) const {
  const int i0 = static_cast<int>(std::lround((X[0] - x0_) / h_));
  const int j0 = static_cast<int>(std::lround((X[1] - y0_) / h_));
  double best = std::numeric_limits<double>::infinity();
  int bi = -1, bj = -1;
  for (int ring = 0; ring <= 3 && bi < 0; ++ring) {
    for (int j = j0 - ring; j <= j0 + ring; ++j)
      for (int i = i0 - ring; i <= i0 + ring; ++i) {
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
        if (!valid_[static_cast<std::size_t>(j) * nx_ + i]) continue;
        const double dist = (vec2(x0_ + i * h_, y0_ + j * h_) - X).norm();
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
  }
  if (bi < 0) fail(ErrorKind::Domain, kModule, "conjugate", "point outside the conjugate table: " + format_point(X));
  *value = table_[static_cast<std::size_t>(bj) * nx_ + bi];
  return vec2(x0_ + bi * h_, y0_ + bj * h_);
}

double ConformalMap2D::conjugate(const Vec& X) const {
  double v = 0.0;
  const Vec node = nearest_node(X, &v);
  return v + segment_integral(node, X, 1);
}

double ConformalMap2D::conjugate_path(const Vec& X, double lift) const {
  const Vec O = domain_.boundary_point(Vec::Zero(1));
  const Vec P1 = vec2(0.0, X[1] + lift);
  const Vec P2 = vec2(X[0], X[1] + lift);
  auto panels = [&](const Vec& A, const Vec& B) { return std::max(1, static_cast<int>(std::ceil(4.0 * (B - A).norm() / R_))); };
  return segment_integral(O, P1, panels(O, P1)) + segment_integral(P1, P2, panels(P1, P2)) +
         segment_integral(P2, X, panels(P2, X));
}

std::complex<double> ConformalMap2D::phi(const Vec& X) const { return {conjugate(X), g(X)}; }

std::complex<double> ConformalMap2D::dphi(const Vec& X) const {
  const Vec gg = grad_g(X);
  return {gg[1], gg[0]};
}

Mat ConformalMap2D::jacobian(const Vec& X) const {
  const Vec gg = grad_g(X);
  Mat J(2, 2);
  J << gg[1], -gg[0], gg[0], gg[1];
  return J;
}

Mat ConformalMap2D::jacobian_fd(const Vec& X, double h) const {
  Mat J(2, 2);
  for (int i = 0; i < 2; ++i) {
    Vec e = Vec::Zero(2);
    e[i] = h;
    J(0, i) = (-conjugate(X + 2.0 * e) + 8.0 * conjugate(X + e) - 8.0 * conjugate(X - e) + conjugate(X - 2.0 * e)) /
              (12.0 * h);
  }
  const Vec gg = grad_g(X);
  J(1, 0) = gg[0];
  J(1, 1) = gg[1];
  return J;
}

double ConformalMap2D::cr_residual(const Vec& X, double h) const {
  const Mat J = jacobian_fd(X, h);
  return std::abs(J(0, 0) - J(1, 1)) + std::abs(J(0, 1) + J(1, 0));
}

Vec ConformalMap2D::inverse(std::complex<double> w) const {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < node_phi_.size(); ++k) {
    const double dist = std::abs(node_phi_[k] - w);
    if (dist < bd) {
      bd = dist;
      best = k;
    }
  }
  Vec X = node_pos_[best];
  const double tol = 1e-13 * std::max(1.0, std::abs(w));
  for (int it = 0; it < 60; ++it) {
    const std::complex<double> res = phi(X) - w;
    if (std::abs(res) <= tol) return X;
    const std::complex<double> step = res / dphi(X);
    X -= to_vec(step);
    if (!std::isfinite(X[0]) || !std::isfinite(X[1])) break;
    if (std::abs(step) <= 1e-15 * (1.0 + X.norm())) return X;
  }
  const double res = std::abs(phi(X) - w);
  if (res <= 1e-10 * std::max(1.0, std::abs(w))) return X;
  std::ostringstream os;
  os << "Newton inversion of Φ did not converge at w = (" << w.real() << ", " << w.imag() << "), residual " << res;
  fail(ErrorKind::Numeric, kModule, "inverse", os.str());
}

std::shared_ptr<const ConformalMap2D> build_map(const GraphDomain& domain, double R, const ConformalOptions& options) {
  return std::make_shared<ConformalMap2D>(domain, R, options);
}

// ---------------------------------------------------------------- push-forward

PushedField::PushedField(FieldPtr u, std::shared_ptr<const ConformalMap2D> map)
    : Field(2), u_(std::move(u)), map_(std::move(map)) {
  if (u_->dim() != 2) fail(ErrorKind::Domain, kModule, "transfer_count", "u must be two-dimensional");
}

ValueGrad PushedField::value_grad(const Vec& w) const {
  const Vec X = map_->inverse({w[0], w[1]});
  const ValueGrad vg = u_->value_grad(X);
  const Mat J = map_->jacobian(X);
  return {vg.value, J.transpose().partialPivLu().solve(vg.grad)};
}

double PushedField::oddness_residual(const Vec& w) const {
  const double a = value(w);
  const double b = value(vec2(w[0], -w[1]));
  return std::abs(a + b) / std::max(std::abs(a), 1e-300);
}

TransferResult transfer_count(const ConformalMap2D& map, FieldPtr u, double rho, const CriticalOptions& options) {
  const char* op = "transfer_count";
  const GraphDomain& D = map.domain();
  if (!(rho > 0.0 && rho <= 1.5 * map.R())) fail(ErrorKind::Domain, kModule, op, "need 0 < rho <= 3R/2");
  TransferResult tr;
  tr.rho = rho;
  tr.hopf_c = map.hopf_c();

  tr.min_det = std::numeric_limits<double>::infinity();
  const int n = 20;
  for (int i = -n; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Vec X = vec2(rho * i / n, rho * j / n + std::max(0.0, D.phi(Vec::Constant(1, rho * i / n))));
      if (X.norm() > rho || !D.contains(X)) continue;
      tr.min_det = std::min(tr.min_det, std::abs(map.jacobian(X).determinant()));
    }
  if (tr.min_det < 0.5 * tr.hopf_c) {
    std::ostringstream os;
    os << "region leaves the strip |det DΦ| >= c/2 (min " << tr.min_det << ", c = " << tr.hopf_c << ")";
    fail(ErrorKind::Precondition, kModule, op, os.str());
  }

  Region before_region = Region::domain_ball(D, Vec::Zero(2), rho);
  before_region.closure_slack = 1e-6;
  const CriticalSetEstimate before = find_critical_points(*u, before_region, options);
  for (const CriticalPoint& p : before.points) {
    tr.before.push_back(p.x);
    const std::complex<double> w = map.phi(p.x);
    tr.images.push_back(vec2(w.real(), w.imag()));
  }

  double wr = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double t = kPi * k / 400;
    const Vec X = vec2(rho * std::cos(t), rho * std::sin(t));
    if (D.gap(X) >= 0.0) wr = std::max(wr, std::abs(map.phi(X)));
  }
  wr *= 1.05;
  tr.w_radius = wr;
  Region after_region = Region::ball(Vec::Zero(2), wr);
  after_region.lo[1] = -0.02 * wr;
  auto pushed = std::make_shared<PushedField>(u, std::shared_ptr<const ConformalMap2D>(&map, [](const ConformalMap2D*) {}));
  CriticalOptions wo = options;
  wo.seed_spacing = options.seed_spacing * wr / rho;
  const CriticalSetEstimate after = find_critical_points(*pushed, after_region, wo);
  for (const CriticalPoint& p : after.points) {
    if (p.x[1] < -1e-6 * wr) continue;
    const Vec X = map.inverse({p.x[0], p.x[1]});
    if (X.norm() > rho * (1.0 + 1e-9)) continue;
    tr.after.push_back(p.x);
  }
  tr.count_before = tr.before.size();
  tr.count_after = tr.after.size();

  std::ostringstream diag;
  for (std::size_t k = 0; k < tr.images.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& w : tr.after) best = std::min(best, (w - tr.images[k]).norm());
    tr.max_image_mismatch = std::max(tr.max_image_mismatch, best);
    if (!(best <= 1e-6 * wr)) diag << "unmatched u point " << format_point(tr.before[k]) << " -> " << format_point(tr.images[k]) << "; ";
  }
  for (const Vec& w : tr.after) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& im : tr.images) best = std::min(best, (w - im).norm());
    if (!(best <= 1e-6 * wr)) diag << "unmatched û point " << format_point(w) << "; ";
  }
  tr.diagnostic = diag.str();
  tr.matched = tr.count_before == tr.count_after && tr.diagnostic.empty();

  QuadratureSpec qs;
  qs.tol = 1e-8;
  tr.N_freq = frequency_report(*u, D, D.boundary_point(Vec::Zero(1)), 2.0 * map.R(), qs).N_C;
  return tr;
}

}  // namespace freqlab
