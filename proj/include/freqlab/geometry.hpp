#pragma once

#include "freqlab/types.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace freqlab {

enum class DiniFamily { Zero, Holder, Tabulated };

// Modulus of continuity theta of the boundary gradient.
class DiniParameter {
 public:
  static DiniParameter zero();
  static DiniParameter holder(double alpha, double c_alpha);
  // Linear interpolation of nondecreasing samples, constant beyond the last sample.
  static DiniParameter tabulated(std::vector<double> s, std::vector<double> theta);

  DiniFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double c_alpha() const { return c_alpha_; }
  bool is_zero() const;

  double theta(double s) const;
  // theta_r(t) = theta(scale * t): the modulus seen by the domain rescaled by 1/scale.
  DiniParameter scaled(double scale) const;

  const std::vector<double>& samples_s() const { return s_; }
  const std::vector<double>& samples_theta() const { return theta_; }

 private:
  DiniFamily family_ = DiniFamily::Zero;
  double alpha_ = 1.0;
  double c_alpha_ = 0.0;
  std::vector<double> s_;
  std::vector<double> theta_;
};

// Integral of theta(s)/s over [a, b].
double dini_integral(const DiniParameter& dini, double a, double b);

// theta~(r) = (1/log^2 2) int_r^{2r} (1/t) int_t^{2t} theta(s)/s ds dt.
double smooth_theta(const DiniParameter& dini, double r);

enum class DomainFamily { Flat, QuadraticBump, PowerAlpha, CosineWindow, Custom };

const char* to_string(DomainFamily family);

// D = {x_d > phi(x')} near the origin, in dimension d in {2, 3}.
class GraphDomain {
 public:
  using PhiFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;

  static GraphDomain flat(int d, double R = 1.0);
  // phi = a |x|^2, theta = holder(1, 2a).
  static GraphDomain quadratic_bump(int d, double a, double R = 1.0);
  // phi = a |x|^{1+alpha}, theta = holder(alpha, a (1+alpha) 2^{1-alpha}).
  static GraphDomain power_alpha(int d, double a, double alpha, double R = 1.0);
  // phi = a sum_i (1 - cos(omega x_i)), theta = holder(1, a omega^2).
  static GraphDomain cosine_window(int d, double a, double omega, double R = 1.0);
  static GraphDomain custom(int d, PhiFn phi, GradFn grad_phi, DiniParameter dini, double R = 1.0);

  int dim() const { return d_; }
  double R() const { return R_; }
  DomainFamily family() const { return family_; }
  double amplitude() const { return a_; }
  double family_alpha() const { return alpha_; }
  double omega() const { return omega_; }
  const DiniParameter& dini() const { return dini_; }
  bool is_flat() const { return family_ == DomainFamily::Flat || dini_.is_zero(); }
  std::string describe() const;

  double phi(const Vec& x) const;
  Vec grad_phi(const Vec& x) const;
  // x_d - phi(x'): positive inside D.
  double gap(const Vec& X) const;
  bool contains(const Vec& X) const { return gap(X) > 0.0; }
  Vec boundary_point(const Vec& x) const;
  // Tangential part x' of a point X.
  Vec tangential(const Vec& X) const { return X.head(d_ - 1); }

  // The domain (D - X) / r with theta scaled accordingly.
  GraphDomain rescaled(const Vec& X, double r) const;

 private:
  double base_phi(const Vec& x) const;
  Vec base_grad(const Vec& x) const;

  int d_ = 2;
  double R_ = 1.0;
  DomainFamily family_ = DomainFamily::Flat;
  double a_ = 0.0;
  double alpha_ = 1.0;
  double omega_ = 1.0;
  DiniParameter dini_;
  std::shared_ptr<const PhiFn> custom_phi_;
  std::shared_ptr<const GradFn> custom_grad_;
  // Affine recentering: phi(y) = (phi_base(shift + scale y) - lift) / scale.
  Vec shift_;
  double lift_ = 0.0;
  double scale_ = 1.0;
};

// Inward unit normal (-grad phi, 1) / sqrt(1 + |grad phi|^2).
Vec normal_vector(const GraphDomain& domain, const Vec& x);

struct NearestBoundary {
  double dist = 0.0;
  Vec q;  // boundary point (x, phi(x))
};

// Requires p strictly inside D.
NearestBoundary nearest_boundary(const GraphDomain& domain, const Vec& p);
// As above but accepts p on the boundary (dist = 0, q = p).
NearestBoundary nearest_boundary_closure(const GraphDomain& domain, const Vec& p);

struct CriticalScale {
  Vec p;
  double dist = 0.0;
  double r_cs = std::numeric_limits<double>::infinity();  // +inf: flat sentinel
  bool infinite() const { return !(r_cs < std::numeric_limits<double>::infinity()); }
};

CriticalScale critical_scale(const GraphDomain& domain, const Vec& p);

struct AdmissibilityReport {
  double R = 0.0;
  double theta_8R = 0.0;
  double dini_16R = 0.0;
  bool theta_ok = false;
  bool dini_ok = false;
  bool admissible() const { return theta_ok && dini_ok; }
};

AdmissibilityReport admissibility(const GraphDomain& domain, double R);

}  // namespace freqlab
