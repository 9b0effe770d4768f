#pragma once

#include "freqlab/field.hpp"
#include "freqlab/geometry.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace freqlab {

struct MfsOptions {
  double window_radius = 0.0;  // 0: 2R
  double check_radius = 0.0;   // graph residual and interior RMS are measured in B_check; 0: the window
  int charges = 0;             // 0: 160 in 2-D (offset curve, corners excluded), 600 in 3-D (enclosing sphere)
  double offset = 0.0;         // 0: half the window radius
  int oversample = 2;          // collocation points per unknown
  int corner_charges = 8;      // extra charges per corner, along the outward bisector
  double arc_weight = 1e-3;    // row weight of the arc data relative to the graph rows
  double rank_tol = 1e-12;     // truncated-SVD threshold relative to the largest singular value
  double boundary_tol = 1e-6;  // max |u| on the graph piece relative to the interior RMS
};

struct MfsDiagnostics {
  double window_radius = 0.0;
  double check_radius = 0.0;
  double offset = 0.0;
  int charges = 0;
  int collocation = 0;
  int rank = 0;
  double graph_residual = 0.0;  // max |u| on the graph in B_check, relative to interior_rms
  double arc_residual = 0.0;    // max |u - data| on the arc, relative to interior_rms
  double interior_rms = 0.0;   // over D ∩ B_check
  double max_weight = 0.0;
};

// u(X) = c + sum_j w_j K(X - c_j), K = (1/2) log|.|^2 in 2-D and 1/|.| in 3-D.
class MfsField final : public Field {
 public:
  MfsField(int dim, std::vector<double> cx, std::vector<double> cy, std::vector<double> cz, std::vector<double> w,
           double constant, std::string tag);

  double value(const Vec& X) const override;
  ValueGrad value_grad(const Vec& X) const override;
  Jet jet(const Vec& X) const override;
  std::string provenance() const override { return tag_; }

  std::size_t charge_count() const { return w_.size(); }
  Vec charge(std::size_t j) const;
  double weight(std::size_t j) const { return w_[j]; }
  double constant() const { return c0_; }
  const MfsDiagnostics& diagnostics() const { return diag_; }
  void set_diagnostics(const MfsDiagnostics& d) { diag_ = d; }

 private:
  Jet eval(const Vec& X, int order) const;

  std::vector<double> cx_, cy_, cz_, w_;
  double c0_;
  std::string tag_;
  MfsDiagnostics diag_;
};

using BoundaryData = std::function<double(const Vec&)>;

// Dirichlet data on the arc of the window; the field is fitted to vanish on the graph piece.
std::shared_ptr<const MfsField> solve_mfs(const GraphDomain& domain, const BoundaryData& data,
                                          const MfsOptions& options = {});

// X -> P(x', x_d - phi(x')): equals P on the flat domain and vanishes at the graph corners.
BoundaryData graph_adapted_data(const GraphDomain& domain, FieldPtr P);

}  // namespace freqlab
