#pragma once

#include "freqlab/critical.hpp"
#include "freqlab/field.hpp"
#include "freqlab/geometry.hpp"
#include "freqlab/mfs.hpp"

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace freqlab {

struct ConformalOptions {
  MfsOptions mfs;              // window defaults to 2R
  int table_per_R = 16;        // conjugate table nodes per unit R
  int path_panels = 4;         // Gauss panels per unit R on long paths
  double hopf_floor = 1e-4;
  int boundary_samples = 200;  // Hopf bound and image samples
};

// Phi = g~ + i g on D ∩ B_{3R/2}: g harmonic, zero on the graph, sup |g| = 1 on D ∩ B_{7R/4};
// g~ its harmonic conjugate with g~(0) = 0.
class ConformalMap2D {
 public:
  ConformalMap2D(GraphDomain domain, double R, const ConformalOptions& options);

  const GraphDomain& domain() const { return domain_; }
  double R() const { return R_; }
  double normalizer() const { return normalizer_; }  // g = g_raw / normalizer
  double hopf_c() const { return hopf_c_; }          // min |∇g|^2 on ∂D ∩ B_{3R/2}
  double b2_radius() const { return b2_radius_; }    // largest w-ball with Φ(D ∩ B_R) ⊇ B ∩ upper half plane
  double boundary_image_residual() const { return boundary_image_; }  // max |Im Φ| on ∂D ∩ B_{3R/2}
  const MfsField& raw_g() const { return *g_; }

  double g(const Vec& X) const;
  Vec grad_g(const Vec& X) const;
  // Conjugate from the table plus one short segment.
  double conjugate(const Vec& X) const;
  // Conjugate by Gauss integration along O -> (0, y + lift) -> (x, y + lift) -> X.
  double conjugate_path(const Vec& X, double lift) const;
  std::complex<double> phi(const Vec& X) const;
  // Complex derivative Φ' = g~_x + i g_x = g_y + i g_x.
  std::complex<double> dphi(const Vec& X) const;
  // DΦ with rows (g~_x, g~_y) and (g_x, g_y) from the Cauchy-Riemann relations.
  Mat jacobian(const Vec& X) const;
  // DΦ with the g~ row from fourth-order differences of conjugate().
  Mat jacobian_fd(const Vec& X, double h) const;
  double cr_residual(const Vec& X, double h = 1e-3) const;
  // Newton inversion of Φ; X may lie slightly outside D when Im w <= 0.
  Vec inverse(std::complex<double> w) const;

 private:
  double segment_integral(const Vec& A, const Vec& B, int panels) const;
  Vec nearest_node(const Vec& X, double* value) const;

  GraphDomain domain_;
  double R_;
  std::shared_ptr<const MfsField> g_;
  double normalizer_ = 1.0;
  double hopf_c_ = 0.0;
  double b2_radius_ = 0.0;
  double boundary_image_ = 0.0;
  double h_ = 0.0;
  int nx_ = 0, ny_ = 0;
  double x0_ = 0.0, y0_ = 0.0;
  std::vector<double> table_;
  std::vector<char> valid_;
  std::vector<Vec> node_pos_;
  std::vector<std::complex<double>> node_phi_;
};

std::shared_ptr<const ConformalMap2D> build_map(const GraphDomain& domain, double R,
                                                const ConformalOptions& options = {});

// û = u ∘ Φ^{-1}, continued across the real axis through the continuation of Φ;
// by Schwarz reflection this is the odd extension û(w̄) = -û(w).
class PushedField final : public Field {
 public:
  PushedField(FieldPtr u, std::shared_ptr<const ConformalMap2D> map);
  ValueGrad value_grad(const Vec& w) const override;
  std::string provenance() const override { return "pushed(" + u_->provenance() + ")"; }
  // |û(w) + û(w̄)| relative to |û(w)|.
  double oddness_residual(const Vec& w) const;

 private:
  FieldPtr u_;
  std::shared_ptr<const ConformalMap2D> map_;
};

struct TransferResult {
  std::size_t count_before = 0;
  std::size_t count_after = 0;
  std::vector<Vec> before;         // critical points of u in D ∩ B_rho
  std::vector<Vec> after;          // critical points of û in Φ(D ∩ B_rho)
  std::vector<Vec> images;         // Φ(before)
  double max_image_mismatch = 0.0; // max distance from an image to the nearest detected û point
  double min_det = 0.0;            // min |det DΦ| on the region samples
  double N_freq = 0.0;             // N_C at the origin, radius 2R
  double hopf_c = 0.0;
  double rho = 0.0;
  double w_radius = 0.0;
  bool matched = false;
  std::string diagnostic;
};

// Requires |det DΦ| >= c/2 on D ∩ B_rho.
TransferResult transfer_count(const ConformalMap2D& map, FieldPtr u, double rho, const CriticalOptions& options = {});

}  // namespace freqlab
