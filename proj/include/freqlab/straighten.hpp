#pragma once

#include "freqlab/field.hpp"
#include "freqlab/geometry.hpp"
#include "freqlab/quadrature.hpp"

#include <memory>
#include <vector>

namespace freqlab {

// rho(z) = c exp(-1/(1-|z|^2)) on the unit ball of R^{d-1}, with a fixed quadrature rule over its support.
class Mollifier {
 public:
  // d is the ambient dimension; points = Gauss-Legendre order per axis (radial order in d = 3).
  explicit Mollifier(int d, int points = 128);

  int dim() const { return d_; }
  double profile(const Vec& z) const;
  Vec gradient(const Vec& z) const;

  std::size_t size() const { return w_rho_.size(); }
  const Vec& node(std::size_t k) const { return nodes_[k]; }
  // Quadrature weight times rho, d_i rho, and (2 - d) rho - z . grad rho (the d_s G profile).
  double w_rho(std::size_t k) const { return w_rho_[k]; }
  const Vec& w_grad(std::size_t k) const { return w_grad_[k]; }
  double w_ds(std::size_t k) const { return w_ds_[k]; }

  // Discrete versions of ∫rho = 1, ∫d_i rho = 0, ∫z.grad rho = -(d-1).
  double mass() const;
  Vec gradient_mass() const;
  double radial_moment() const;

 private:
  int d_;
  double c_ = 1.0;
  std::vector<Vec> nodes_;
  std::vector<double> w_rho_;
  std::vector<Vec> w_grad_;
  std::vector<double> w_ds_;
};

struct MapJet {
  Vec G;
  Mat DG;
  double det = 1.0;
};

struct WorkingBall {
  double radius = 0.0;
  double det_min = 1.0, det_max = 1.0;
  double lambda = 1.0;  // ellipticity: eigenvalues of A in [lambda, 1/lambda]
};

// G(x, s) = (x, phi(x)) + s (rho_s * n)(x) and the coefficient matrix of u o G.
class StraighteningMap {
 public:
  explicit StraighteningMap(GraphDomain domain, int moll_points = 128);

  const GraphDomain& domain() const { return domain_; }
  const Mollifier& mollifier() const { return moll_; }
  int dim() const { return domain_.dim(); }

  // z = (x, s) with s >= 0.
  MapJet jet(const Vec& z) const;
  Vec G(const Vec& z) const;
  Mat DG(const Vec& z) const { return jet(z).DG; }
  // Central differences of G (one-sided in s near s = 0).
  Mat DG_fd(const Vec& z, double h) const;
  // Throws a Numeric error when DG and DG_fd disagree by more than 1e-4 relative.
  double self_check(const Vec& z) const;

  // A = |det DG| DG^{-1} DG^{-T} for s > 0; the analytic limit for s = 0.
  Mat A(const Vec& z) const;
  // c(x) diag((I + grad phi grad phi^T)^{-1}, 1), c = sqrt(1 + |grad phi|^2).
  Mat A_boundary(const Vec& x) const;
  // Parity extension to s < 0: A_0 and the d-entry even, the B-block odd.
  Mat A_tilde(const Vec& z) const;

  // Largest radius rho <= rho_max such that sampled det DG lies in [1/2, 3/2] and G(x, s) in D for s > 0.
  WorkingBall find_working_ball(double rho_max, int grid = 16) const;

 private:
  GraphDomain domain_;
  Mollifier moll_;
};

struct ExtendedSample {
  double value = 0.0;
  Vec grad;
  Mat A;  // A~ at the same point
};

// u~(x, s) = u(G(x, s)) for s >= 0, extended oddly to s < 0.
class ExtendedField final : public Field {
 public:
  ExtendedField(FieldPtr u, std::shared_ptr<const StraighteningMap> map, double radius);
  double value(const Vec& z) const override;
  ValueGrad value_grad(const Vec& z) const override;
  // Value, gradient and A~ sharing one evaluation of DG.
  ExtendedSample sample(const Vec& z) const;
  std::string provenance() const override { return "extension(" + u_->provenance() + ")"; }
  double radius() const { return radius_; }
  const StraighteningMap& map() const { return *map_; }

 private:
  void check(const Vec& z) const;

  FieldPtr u_;
  std::shared_ptr<const StraighteningMap> map_;
  double radius_;
};

std::shared_ptr<const ExtendedField> extend_field(FieldPtr u, std::shared_ptr<const StraighteningMap> map,
                                                  double radius);

// Integral over the (x, s)-ball B_rho(c), split at s = 0 and evaluated as two upper half-space integrals.
QuadResult split_ball_integral(const PointIntegrand& f, int components, int d, const Vec& c, double rho,
                               const QuadratureSpec& spec);

struct WeakResidual {
  double raw = 0.0;         // ∬ A~ grad u~ . grad psi
  double normalized = 0.0;  // raw / (||grad u~||_{L^2} ||grad psi||_{L^2})
  bool straddles = false;
};

// Test function psi = exp(-1/(1 - |z - c|^2 / rho^2)).
WeakResidual weak_residual(const StraighteningMap& map, const ExtendedField& ut, const Vec& c, double rho,
                           const QuadratureSpec& spec = {});

struct ConormalJump {
  std::vector<double> h;
  std::vector<double> jump;      // A grad u~ (x, h) . (0,-1) + A~ grad u~ (x, -h) . (0, 1)
  std::vector<double> b_block;   // |B(x, h)|: the off-diagonal block that must vanish as h -> 0
  double extrapolated = 0.0;     // Richardson limit of the jump sequence
  double flux_scale = 0.0;       // |A grad u~ (x, h)| at the smallest h
};

ConormalJump conormal_jump(const StraighteningMap& map, const ExtendedField& ut, const Vec& x, double h,
                           int levels = 3);

struct HolderPair {
  Vec z1, z2;
};

struct HolderCertificate {
  double alpha = 0.0;
  double constant = 0.0;  // sup ||A~(z1) - A~(z2)|| / |z1 - z2|^alpha
  double c_alpha = 0.0;   // the domain's Hölder constant of grad phi
  double K = 0.0;         // constant / c_alpha
  std::size_t pairs = 0;
  double min_distance = 0.0;
};

HolderCertificate modulus_certificate(const StraighteningMap& map, double alpha, const std::vector<HolderPair>& pairs);

// Pair families at distance levels h_j = h0 4^{-j}, j = 0..levels-1: x-shifts at s = 0, s-shifts at x = 0,
// diagonal shifts, and seeded random pairs inside the ball of radius `radius`.
std::vector<std::vector<HolderPair>> holder_pair_levels(int d, double radius, double h0, int levels, int random_per_level,
                                                        unsigned seed);

struct DoublingCertificate {
  double sup_ratio = 0.0;
  Vec argmax_center;
  double argmax_r = 0.0;
  std::size_t samples = 0;
  std::size_t evaluations = 0;  // including the local refinement
};

// sup over (x, r) with B_{2r}(x) inside the ball of radius R and r >= R/64 of
// ∬_{B_2r}|u~ - u~(x)|^2 / ∬_{B_r}|u~ - u~(x)|^2. The best `refine` samples are
// polished by a compass search in (x, log r).
DoublingCertificate doubling_certificate(const ExtendedField& ut, const std::vector<std::pair<Vec, double>>& samples,
                                         const QuadratureSpec& spec, int refine = 3);

// Deterministic lattice centers (including the origin) plus `random` seeded samples.
std::vector<std::pair<Vec, double>> doubling_samples(int d, double radius, int random, unsigned seed);

}  // namespace freqlab
