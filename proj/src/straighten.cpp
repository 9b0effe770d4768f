#include "freqlab/straighten.hpp"

#include "freqlab/integrate1d.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace freqlab {

namespace {

constexpr const char* kModule = "straighten";
constexpr double kPi = std::numbers::pi;

double bump(double q) { return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0; }

double spectral_norm(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

// ---------------------------------------------------------------- mollifier

Mollifier::Mollifier(int d, int points) : d_(d) {
  if (d != 2 && d != 3) fail(ErrorKind::Domain, kModule, "Mollifier", "d must be 2 or 3");
  if (points < 4) fail(ErrorKind::Domain, kModule, "Mollifier", "need at least 4 points");
  // Unit mass from an independent adaptive rule.
  const double base =
      d == 2 ? adaptive_gauss([](double t, double* o) { o[0] = bump(t * t); }, 1, -1.0, 1.0, 20, 1e-15, 30)[0]
             : 2.0 * kPi *
                   adaptive_gauss([](double t, double* o) { o[0] = bump(t * t) * t; }, 1, 0.0, 1.0, 20, 1e-15, 30)[0];
  c_ = 1.0 / base;

  const GaussRule& rule = gauss_legendre(points);
  auto push = [&](const Vec& z, double w) {
    const double rho = profile(z);
    const Vec g = gradient(z);
    nodes_.push_back(z);
    w_rho_.push_back(w * rho);
    w_grad_.push_back(w * g);
    w_ds_.push_back(w * ((2.0 - d_) * rho - z.dot(g)));
  };
  if (d == 2) {
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) push(Vec::Constant(1, rule.nodes[k]), rule.weights[k]);
  } else {
    const int m = std::max(8, points / 2);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = 0.5 * (rule.nodes[k] + 1.0);
      const double wt = 0.5 * rule.weights[k] * t * (2.0 * kPi / m);
      for (int j = 0; j < m; ++j) {
        const double a = 2.0 * kPi * (j + 0.5) / m;
        push(vec2(t * std::cos(a), t * std::sin(a)), wt);
      }
    }
  }
  // Make the discrete rule reproduce unit mass and the moment identity exactly,
  // so that a flat boundary yields DG = I to rounding.
  double mass = 0.0, moment = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    mass += w_rho_[k];
    moment += nodes_[k].dot(w_grad_[k]);
  }
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    w_rho_[k] /= mass;
    w_grad_[k] *= -(d_ - 1.0) / moment;
    w_ds_[k] = (2.0 - d_) * w_rho_[k] - nodes_[k].dot(w_grad_[k]);
  }
}

double Mollifier::profile(const Vec& z) const { return c_ * bump(z.squaredNorm()); }

Vec Mollifier::gradient(const Vec& z) const {
  const double q = z.squaredNorm();
  if (q >= 1.0) return Vec::Zero(z.size());
  const double om = 1.0 - q;
  return profile(z) * (-2.0 / (om * om)) * z;
}

double Mollifier::mass() const {
  double s = 0.0;
  for (double w : w_rho_) s += w;
  return s;
}

Vec Mollifier::gradient_mass() const {
  Vec s = Vec::Zero(d_ - 1);
  for (const Vec& g : w_grad_) s += g;
  return s;
}

double Mollifier::radial_moment() const {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) s += nodes_[k].dot(w_grad_[k]);
  return s;
}

// ---------------------------------------------------------------- map

StraighteningMap::StraighteningMap(GraphDomain domain, int moll_points)
    : domain_(std::move(domain)), moll_(domain_.dim(), moll_points) {}

Vec StraighteningMap::G(const Vec& z) const {
  const int d = dim();
  if (z.size() != d) fail(ErrorKind::Domain, kModule, "map_G", "point dimension mismatch");
  const double s = z[d - 1];
  if (s < 0.0) fail(ErrorKind::Domain, kModule, "map_G", "s must be >= 0");
  const Vec x = z.head(d - 1);
  Vec out = domain_.boundary_point(x);
  if (s == 0.0) return out;
  // Moments are exact (mass 1), so only deviations from n(x) are summed.
  const Vec n0 = normal_vector(domain_, x);
  Vec acc = Vec::Zero(d);
  for (std::size_t k = 0; k < moll_.size(); ++k)
    acc += moll_.w_rho(k) * (normal_vector(domain_, x - s * moll_.node(k)) - n0);
  return out + s * (n0 + acc);
}

MapJet StraighteningMap::jet(const Vec& z) const {
  const int d = dim();
  if (z.size() != d) fail(ErrorKind::Domain, kModule, "jacobian_DG", "point dimension mismatch");
  const double s = z[d - 1];
  if (s < 0.0) fail(ErrorKind::Domain, kModule, "jacobian_DG", "s must be >= 0");
  const Vec x = z.head(d - 1);
  const Vec gphi = domain_.grad_phi(x);
  MapJet j;
  j.G = domain_.boundary_point(x);
  j.DG = Mat::Zero(d, d);
  for (int i = 0; i < d - 1; ++i) {
    j.DG(i, i) = 1.0;
    j.DG(d - 1, i) = gphi[i];
  }
  if (s == 0.0) {
    j.DG.col(d - 1) = normal_vector(domain_, x);
  } else {
    // The rule has mass 1, zero gradient mass and unit s-moment, so subtracting
    // n(x) from every sample leaves the sums unchanged and keeps flat data exact.
    const Vec n0 = normal_vector(domain_, x);
    Vec acc = Vec::Zero(d);
    Vec acc_s = Vec::Zero(d);
    Mat acc_x = Mat::Zero(d, d - 1);
    for (std::size_t k = 0; k < moll_.size(); ++k) {
      const Vec n = normal_vector(domain_, x - s * moll_.node(k)) - n0;
      acc += moll_.w_rho(k) * n;
      acc_s += moll_.w_ds(k) * n;
      acc_x += n * moll_.w_grad(k).transpose();
    }
    j.G += s * (n0 + acc);
    j.DG.leftCols(d - 1) += acc_x;
    j.DG.col(d - 1) = n0 + acc_s;
  }
  j.det = j.DG.determinant();
  return j;
}

Mat StraighteningMap::DG_fd(const Vec& z, double h) const {
  const int d = dim();
  Mat J(d, d);
  for (int i = 0; i < d - 1; ++i) {
    Vec zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    J.col(i) = (G(zp) - G(zm)) / (2.0 * h);
  }
  const double s = z[d - 1];
  if (s >= h) {
    Vec zp = z, zm = z;
    zp[d - 1] += h;
    zm[d - 1] -= h;
    J.col(d - 1) = (G(zp) - G(zm)) / (2.0 * h);
  } else {
    Vec z1 = z, z2 = z;
    z1[d - 1] += h;
    z2[d - 1] += 2.0 * h;
    J.col(d - 1) = (-3.0 * G(z) + 4.0 * G(z1) - G(z2)) / (2.0 * h);
  }
  return J;
}

double StraighteningMap::self_check(const Vec& z) const {
  const Mat J = DG(z);
  const double h = 1e-5 * std::max(1.0, z.norm());
  const double rel = (J - DG_fd(z, h)).norm() / J.norm();
  if (!(rel <= 1e-4)) {
    std::ostringstream os;
    os << "implementation fault: analytic DG differs from finite differences by " << rel << " at "
       << format_point(z);
    fail(ErrorKind::Numeric, kModule, "jacobian_DG", os.str());
  }
  return rel;
}

Mat StraighteningMap::A_boundary(const Vec& x) const {
  const int d = dim();
  if (x.size() != d - 1) fail(ErrorKind::Domain, kModule, "coefficient_A", "x must have d-1 components");
  const Vec g = domain_.grad_phi(x);
  const double c = std::sqrt(1.0 + g.squaredNorm());
  Mat M = Mat::Identity(d - 1, d - 1) + g * g.transpose();
  Mat A = Mat::Zero(d, d);
  A.topLeftCorner(d - 1, d - 1) = c * M.inverse();
  A(d - 1, d - 1) = c;
  return 0.5 * (A + A.transpose());
}

Mat StraighteningMap::A(const Vec& z) const {
  const int d = dim();
  if (z[d - 1] == 0.0) return A_boundary(z.head(d - 1));
  const MapJet j = jet(z);
  if (!(j.det >= 0.5 && j.det <= 1.5)) {
    std::ostringstream os;
    os << "det DG = " << j.det << " outside [1/2, 3/2] at " << format_point(z) << "; shrink the working ball";
    fail(ErrorKind::Precondition, kModule, "coefficient_A", os.str());
  }
  const Mat Jinv = j.DG.inverse();
  const Mat A = std::abs(j.det) * Jinv * Jinv.transpose();
  return 0.5 * (A + A.transpose());
}

Mat StraighteningMap::A_tilde(const Vec& z) const {
  const int d = dim();
  if (z[d - 1] >= 0.0) return A(z);
  Vec zr = z;
  zr[d - 1] = -z[d - 1];
  Mat M = A(zr);
  for (int i = 0; i < d - 1; ++i) {
    M(i, d - 1) = -M(i, d - 1);
    M(d - 1, i) = -M(d - 1, i);
  }
  return M;
}

WorkingBall StraighteningMap::find_working_ball(double rho_max, int grid) const {
  const int d = dim();
  if (!(rho_max > 0.0) || grid < 2) fail(ErrorKind::Domain, kModule, "working_ball", "bad arguments");
  WorkingBall best;
  auto ok = [&](double rho, WorkingBall& wb) {
    wb = WorkingBall{rho, 1.0, 1.0, 1.0};
    const int na = grid;
    const int nb = d == 3 ? 2 * grid : 1;
    for (int k = 1; k <= grid; ++k) {
      const double r = rho * k / grid;
      for (int a = 0; a <= na; ++a) {
        const double th = kPi * a / na;  // angle from the +x_1 axis in the (x_1, s) half plane
        for (int b = 0; b < nb; ++b) {
          const double psi = kPi * b / nb;
          Vec z(d);
          if (d == 2) {
            z << r * std::cos(th), r * std::sin(th);
          } else {
            z << r * std::cos(th) * std::cos(psi), r * std::cos(th) * std::sin(psi), r * std::sin(th);
          }
          const MapJet j = jet(z);
          wb.det_min = std::min(wb.det_min, j.det);
          wb.det_max = std::max(wb.det_max, j.det);
          if (!(j.det >= 0.5 && j.det <= 1.5)) return false;
          if (z[d - 1] > 0.0 && !domain_.contains(j.G)) return false;
          const Mat Jinv = j.DG.inverse();
          const Mat A = std::abs(j.det) * Jinv * Jinv.transpose();
          Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
          wb.lambda = std::min({wb.lambda, es.eigenvalues().minCoeff(), 1.0 / es.eigenvalues().maxCoeff()});
        }
      }
    }
    return true;
  };
  WorkingBall wb;
  if (ok(rho_max, wb)) return wb;
  double lo = 0.0, hi = rho_max;
  best = WorkingBall{0.0, 1.0, 1.0, 1.0};
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid, wb)) {
      lo = mid;
      best = wb;
    } else {
      hi = mid;
    }
  }
  if (!(best.radius > 0.0)) fail(ErrorKind::Numeric, kModule, "working_ball", "no admissible working ball found");
  return best;
}

// ---------------------------------------------------------------- extension

ExtendedField::ExtendedField(FieldPtr u, std::shared_ptr<const StraighteningMap> map, double radius)
    : Field(map->dim()), u_(std::move(u)), map_(std::move(map)), radius_(radius) {
  if (u_->dim() != map_->dim()) fail(ErrorKind::Domain, kModule, "extend_field", "dimension mismatch");
  if (!(radius > 0.0)) fail(ErrorKind::Domain, kModule, "extend_field", "radius must be positive");
}

void ExtendedField::check(const Vec& z) const {
  if (z.norm() > radius_ * (1.0 + 1e-12))
    fail(ErrorKind::Domain, kModule, "extend_field", "evaluation outside the working ball at " + format_point(z));
}

double ExtendedField::value(const Vec& z) const {
  check(z);
  const int d = dim();
  const double s = z[d - 1];
  if (s == 0.0) return 0.0;
  Vec zr = z;
  zr[d - 1] = std::abs(s);
  const double v = u_->value(map_->G(zr));
  return s > 0.0 ? v : -v;
}

ExtendedSample ExtendedField::sample(const Vec& z) const {
  check(z);
  const int d = dim();
  const double s = z[d - 1];
  Vec zr = z;
  zr[d - 1] = std::abs(s);
  const MapJet j = map_->jet(zr);
  const ValueGrad vg = u_->value_grad(j.G);
  ExtendedSample out;
  out.value = s == 0.0 ? 0.0 : vg.value;
  out.grad = j.DG.transpose() * vg.grad;
  if (s == 0.0) {
    out.A = map_->A_boundary(z.head(d - 1));
  } else {
    if (!(j.det >= 0.5 && j.det <= 1.5))
      fail(ErrorKind::Precondition, kModule, "coefficient_A", "det DG outside [1/2, 3/2] at " + format_point(z));
    const Mat Jinv = j.DG.inverse();
    const Mat A = std::abs(j.det) * Jinv * Jinv.transpose();
    out.A = 0.5 * (A + A.transpose());
  }
  if (s < 0.0) {
    out.value = -out.value;
    out.grad.head(d - 1) = -out.grad.head(d - 1);
    for (int i = 0; i < d - 1; ++i) {
      out.A(i, d - 1) = -out.A(i, d - 1);
      out.A(d - 1, i) = -out.A(d - 1, i);
    }
  }
  return out;
}

ValueGrad ExtendedField::value_grad(const Vec& z) const {
  const ExtendedSample e = sample(z);
  return {e.value, e.grad};
}

std::shared_ptr<const ExtendedField> extend_field(FieldPtr u, std::shared_ptr<const StraighteningMap> map,
                                                  double radius) {
  return std::make_shared<ExtendedField>(std::move(u), std::move(map), radius);
}

// ---------------------------------------------------------------- integrals over (x, s)-balls

namespace {

// Fixed tensor rule for ∫|f| over the cap; sets the absolute accuracy floor of the adaptive pass,
// so components that cancel to rounding level do not force refinement to max depth.
Values cap_abs_mass(const PointIntegrand& f, int k, int d, const Vec& c, double rho, double t0,
                    const QuadratureSpec& spec) {
  const GaussRule& gt = gauss_legendre(spec.radial);
  const GaussRule& gv = gauss_legendre(spec.angular);
  const double cs = c[d - 1];
  const double ht = 0.5 * (0.5 * kPi - t0), mt = 0.5 * (0.5 * kPi + t0);
  Values mass{};
  double buf[kMaxComponents];
  Vec z(d);
  for (std::size_t i = 0; i < gt.nodes.size(); ++i) {
    const double t = mt + ht * gt.nodes[i];
    const double w = rho * std::cos(t);
    z[d - 1] = cs + rho * std::sin(t);
    const double slice_jac = ht * gt.weights[i] * rho * std::cos(t);
    for (std::size_t j = 0; j < gv.nodes.size(); ++j) {
      if (d == 2) {
        z[0] = c[0] + w * gv.nodes[j];
        f(z, buf);
        for (int q = 0; q < k; ++q) mass[static_cast<std::size_t>(q)] += slice_jac * w * gv.weights[j] * std::abs(buf[q]);
      } else {
        const double tau = 0.5 * (1.0 + gv.nodes[j]);
        for (int a = 0; a < 8; ++a) {
          const double psi = 2.0 * kPi * a / 8.0;
          z[0] = c[0] + w * tau * std::cos(psi);
          z[1] = c[1] + w * tau * std::sin(psi);
          f(z, buf);
          const double wt = slice_jac * w * w * 0.5 * gv.weights[j] * tau * (2.0 * kPi / 8.0);
          for (int q = 0; q < k; ++q) mass[static_cast<std::size_t>(q)] += wt * std::abs(buf[q]);
        }
      }
    }
  }
  return mass;
}

// ∫_{B_rho(c) ∩ {s > 0}} f, by slices s = c_s + rho sin t.
QuadResult upper_cap(const PointIntegrand& f, int k, int d, const Vec& c, double rho, const QuadratureSpec& spec) {
  QuadResult res;
  res.components = k;
  const double cs = c[d - 1];
  if (cs + rho <= 0.0) return res;
  const double t0 = std::asin(std::clamp(-cs / rho, -1.0, 1.0));
  const double inner_tol = 0.1 * spec.tol;
  const Values mass = cap_abs_mass(f, k, d, c, rho, t0, spec);
  Vec z(d);
  auto slice = [&](double t, double* out) {
    const double w = rho * std::cos(t);
    z[d - 1] = cs + rho * std::sin(t);
    const double jac = rho * std::cos(t);
    // Inner error e changes the cap integral by about e * w^{d-1} * jac * (t-range).
    Values floor{};
    const double reach = std::max(std::pow(w, d - 1) * jac * kPi * (d == 3 ? 2.0 * kPi : 1.0), 1e-300);
    for (int i = 0; i < k; ++i) floor[static_cast<std::size_t>(i)] = mass[static_cast<std::size_t>(i)] / reach;
    QuadResult q;
    if (d == 2) {
      q = adaptive_gauss(
          [&](double v, double* o) {
            z[0] = c[0] + w * v;
            f(z, o);
          },
          k, -1.0, 1.0, spec.angular, inner_tol, spec.max_depth, floor);
      q = q.scaled(w);
    } else {
      q = periodic_trapezoid(
          [&](double psi, double* o) {
            const QuadResult qr = adaptive_gauss(
                [&](double tau, double* oo) {
                  z[0] = c[0] + w * tau * std::cos(psi);
                  z[1] = c[1] + w * tau * std::sin(psi);
                  f(z, oo);
                  for (int i = 0; i < k; ++i) oo[i] *= tau;
                },
                k, 0.0, 1.0, spec.radial, inner_tol, spec.max_depth, floor);
            for (int i = 0; i < k; ++i) o[i] = qr[i];
          },
          k, 2.0 * kPi, std::max(8, spec.angular / 2), inner_tol, 5);
      q = q.scaled(w * w);
    }
    for (int i = 0; i < k; ++i) out[i] = q[i] * jac;
  };
  return adaptive_gauss(slice, k, t0, 0.5 * kPi, spec.radial, spec.tol, spec.max_depth, mass);
}

}  // namespace

QuadResult split_ball_integral(const PointIntegrand& f, int k, int d, const Vec& c, double rho,
                               const QuadratureSpec& spec) {
  if (c.size() != d || !(rho > 0.0)) fail(ErrorKind::Domain, kModule, "split_ball_integral", "bad ball");
  if (k < 1 || k > kMaxComponents) fail(ErrorKind::Domain, kModule, "split_ball_integral", "bad component count");
  QuadResult total = upper_cap(f, k, d, c, rho, spec);
  Vec cr = c;
  cr[d - 1] = -c[d - 1];
  Vec zr(d);
  total += upper_cap(
      [&](const Vec& z, double* out) {
        zr = z;
        zr[d - 1] = -z[d - 1];
        f(zr, out);
      },
      k, d, cr, rho, spec);
  return total;
}

WeakResidual weak_residual(const StraighteningMap& map, const ExtendedField& ut, const Vec& c, double rho,
                           const QuadratureSpec& spec) {
  const int d = map.dim();
  if (c.norm() + rho > ut.radius() * (1.0 + 1e-12))
    fail(ErrorKind::Domain, kModule, "weak_residual", "test bump leaves the working ball");
  const double r2 = rho * rho;
  const QuadResult q = split_ball_integral(
      [&](const Vec& z, double* out) {
        const Vec dz = z - c;
        const double qn = dz.squaredNorm() / r2;
        if (qn >= 1.0) {
          out[0] = out[1] = out[2] = 0.0;
          return;
        }
        const double om = 1.0 - qn;
        const Vec gpsi = bump(qn) * (-1.0 / (om * om)) * (2.0 / r2) * dz;
        const ExtendedSample e = ut.sample(z);
        out[0] = (e.A * e.grad).dot(gpsi);
        out[1] = e.grad.squaredNorm();
        out[2] = gpsi.squaredNorm();
      },
      3, d, c, rho, spec);
  WeakResidual w;
  w.raw = q[0];
  w.straddles = std::abs(c[d - 1]) < rho;
  const double den = std::sqrt(q[1]) * std::sqrt(q[2]);
  if (!(den > 0.0)) fail(ErrorKind::Degenerate, kModule, "weak_residual", "grad u~ vanishes on the test ball");
  w.normalized = w.raw / den;
  return w;
}

ConormalJump conormal_jump(const StraighteningMap& map, const ExtendedField& ut, const Vec& x, double h, int levels) {
  const int d = map.dim();
  if (x.size() != d - 1) fail(ErrorKind::Domain, kModule, "conormal_jump", "x must have d-1 components");
  if (!(h > 0.0) || levels < 2) fail(ErrorKind::Domain, kModule, "conormal_jump", "need h > 0 and levels >= 2");
  Vec zp(d), zm(d);
  zp.head(d - 1) = x;
  zm.head(d - 1) = x;
  zp[d - 1] = h;
  if (zp.norm() > ut.radius())
    fail(ErrorKind::Domain, kModule, "conormal_jump", "x outside the working cylinder: " + format_point(x));
  ConormalJump cj;
  for (int j = 0; j < levels; ++j) {
    const double hj = h * std::pow(0.5, j);
    zp[d - 1] = hj;
    zm[d - 1] = -hj;
    const ExtendedSample up = ut.sample(zp);
    const ExtendedSample dn = ut.sample(zm);
    const Vec fu = up.A * up.grad;
    const Vec fd = dn.A * dn.grad;
    cj.h.push_back(hj);
    cj.jump.push_back(-fu[d - 1] + fd[d - 1]);
    cj.b_block.push_back(up.A.col(d - 1).head(d - 1).norm());
    cj.flux_scale = fu.norm();
  }
  // Richardson elimination assuming an expansion in powers of h.
  std::vector<double> t = cj.jump;
  for (int m = 1; m < levels; ++m)
    for (int j = levels - 1; j >= m; --j) t[j] = (std::pow(2.0, m) * t[j] - t[j - 1]) / (std::pow(2.0, m) - 1.0);
  cj.extrapolated = t.back();
  return cj;
}

// ---------------------------------------------------------------- certificates

HolderCertificate modulus_certificate(const StraighteningMap& map, double alpha, const std::vector<HolderPair>& pairs) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Domain, kModule, "modulus_certificate", "alpha in (0, 1]");
  HolderCertificate hc;
  hc.alpha = alpha;
  hc.pairs = pairs.size();
  hc.min_distance = std::numeric_limits<double>::infinity();
  for (const HolderPair& p : pairs) {
    const double dist = (p.z1 - p.z2).norm();
    if (!(dist > 0.0)) continue;
    hc.min_distance = std::min(hc.min_distance, dist);
    const double diff = spectral_norm(map.A_tilde(p.z1) - map.A_tilde(p.z2));
    hc.constant = std::max(hc.constant, diff / std::pow(dist, alpha));
  }
  const DiniParameter& th = map.domain().dini();
  hc.c_alpha = th.family() == DiniFamily::Holder ? th.c_alpha() : 0.0;
  hc.K = hc.c_alpha > 0.0 ? hc.constant / hc.c_alpha : 0.0;
  return hc;
}

std::vector<std::vector<HolderPair>> holder_pair_levels(int d, double radius, double h0, int levels,
                                                        int random_per_level, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<HolderPair>> out;
  auto e = [&](int i) {
    Vec v = Vec::Zero(d);
    v[i] = 1.0;
    return v;
  };
  for (int j = 0; j < levels; ++j) {
    const double h = h0 * std::pow(0.25, j);
    std::vector<HolderPair> P;
    const Vec zero = Vec::Zero(d);
    P.push_back({-0.5 * h * e(0), 0.5 * h * e(0)});
    P.push_back({zero, h * e(0)});
    P.push_back({zero, h * e(d - 1)});
    P.push_back({zero, -h * e(d - 1)});
    P.push_back({h * e(d - 1), 2.0 * h * e(d - 1)});
    P.push_back({zero, h * (e(0) + e(d - 1)).normalized()});
    P.push_back({h * e(d - 1), h * e(d - 1) + h * e(0)});
    for (int k = 0; k < random_per_level; ++k) {
      Vec c(d), dir(d);
      do {
        for (int i = 0; i < d; ++i) c[i] = unit(rng);
      } while (c.norm() > 1.0);
      do {
        for (int i = 0; i < d; ++i) dir[i] = unit(rng);
      } while (dir.norm() > 1.0 || dir.norm() < 1e-3);
      c *= 0.5 * radius;
      P.push_back({c, c + h * dir.normalized()});
    }
    out.push_back(std::move(P));
  }
  return out;
}

DoublingCertificate doubling_certificate(const ExtendedField& ut, const std::vector<std::pair<Vec, double>>& samples,
                                         const QuadratureSpec& spec, int refine) {
  const int d = ut.dim();
  const double R = ut.radius();
  const double r_min = R / 64.0;
  DoublingCertificate dc;
  dc.argmax_center = Vec::Zero(d);
  auto admissible = [&](const Vec& x, double r) { return r >= r_min * (1.0 - 1e-12) && x.norm() + 2.0 * r <= R; };
  auto ratio = [&](const Vec& x, double r) {
    ++dc.evaluations;
    const double ux = ut.value(x);
    auto mass = [&](double rr) {
      return split_ball_integral(
                 [&](const Vec& z, double* out) {
                   const double v = ut.value(z) - ux;
                   out[0] = v * v;
                 },
                 1, d, x, rr, spec)[0];
    };
    const double inner = mass(r);
    if (!(inner > 0.0)) fail(ErrorKind::Degenerate, kModule, "doubling_certificate", "u~ constant on a ball");
    return mass(2.0 * r) / inner;
  };
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [x, r] = samples[i];
    if (x.size() != d || !admissible(x, r))
      fail(ErrorKind::Domain, kModule, "doubling_certificate", "sample violates r >= R/64 or |x| + 2r <= R");
    ranked.emplace_back(ratio(x, r), i);
    ++dc.samples;
  }
  std::sort(ranked.begin(), ranked.end(), std::greater<>());
  for (const auto& [val, i] : ranked) {
    if (val > dc.sup_ratio) {
      dc.sup_ratio = val;
      dc.argmax_center = samples[i].first;
      dc.argmax_r = samples[i].second;
    }
  }
  // r = r_min + t (r_max(x) - r_min) keeps the edge |x| + 2r = R at t = 1.
  auto r_of = [&](const Vec& x, double t) {
    const double r_max = 0.5 * (R - x.norm());
    return r_min + t * (r_max - r_min);
  };
  const int n_refine = std::min<int>(refine, static_cast<int>(ranked.size()));
  for (int m = 0; m < n_refine; ++m) {
    Vec x = samples[ranked[m].second].first;
    const double r0 = samples[ranked[m].second].second;
    const double span = 0.5 * (R - x.norm()) - r_min;
    double t = span > 0.0 ? std::clamp((r0 - r_min) / span, 0.0, 1.0) : 0.0;
    double best = ranked[m].first;
    double step = 1.0 / 16.0;
    while (step > 1e-4) {
      bool moved = false;
      for (int c = 0; c <= d && !moved; ++c) {
        for (double sg : {1.0, -1.0}) {
          Vec xt = x;
          double tt = t;
          if (c < d) xt[c] += sg * step * R;
          else tt = std::clamp(tt + sg * step, 0.0, 1.0);
          if (0.5 * (R - xt.norm()) < r_min || (c == d && tt == t)) continue;
          const double v = ratio(xt, r_of(xt, tt));
          if (v > best) {
            best = v;
            x = xt;
            t = tt;
            moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    if (best > dc.sup_ratio) {
      dc.sup_ratio = best;
      dc.argmax_center = x;
      dc.argmax_r = r_of(x, t);
    }
  }
  return dc;
}

std::vector<std::pair<Vec, double>> doubling_samples(int d, double radius, int random, unsigned seed) {
  std::vector<std::pair<Vec, double>> out;
  const double R = radius;
  const double step = R / 4.0;
  std::vector<double> radii{R / 8.0, R / 16.0, R / 32.0, R / 64.0};
  const int m = 1;
  auto add = [&](const Vec& x) {
    for (double r : radii)
      if (x.norm() + 2.0 * r <= R) out.emplace_back(x, r);
  };
  if (d == 2) {
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j) add(vec2(i * step, j * step));
  } else {
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j)
        for (int k = -m; k <= m; ++k) add(vec3(i * step, j * step, k * step));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> logr(std::log(R / 64.0), std::log(R / 8.0));
  while (static_cast<int>(out.size()) < random + static_cast<int>(radii.size()) * 9) {
    Vec x(d);
    do {
      for (int i = 0; i < d; ++i) x[i] = unit(rng);
    } while (x.norm() > 1.0);
    x *= 0.6 * R;
    const double r = std::exp(logr(rng));
    if (x.norm() + 2.0 * r <= R) out.emplace_back(x, r);
  }
  return out;
}

}  // namespace freqlab
