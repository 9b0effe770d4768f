#pragma once

#include "freqlab/field.hpp"
#include "freqlab/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace freqlab {

// Axis-aligned box, optionally cut by a ball and by the closure of a domain.
struct Region {
  Vec lo, hi;
  std::optional<Vec> ball_center;
  double ball_radius = 0.0;
  std::optional<GraphDomain> domain;
  double closure_slack = 1e-9;  // points with gap >= -slack * diameter count as in the closure

  static Region box(Vec lo, Vec hi);
  static Region ball(Vec center, double radius);
  // B_radius(center) ∩ closure(D).
  static Region domain_ball(const GraphDomain& domain, Vec center, double radius);

  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vec& X, double pad = 0.0) const;
  std::string describe() const;
};

struct CriticalOptions {
  double seed_spacing = 0.05;
  double grad_tol = 1e-10;   // acceptance, relative to max |∇u| on the seeds
  double capture = 1e-2;     // seeding, relative to max |∇u|
  double value_tol = 1e-8;   // singular if |u| <= value_tol * max |u|
  double dedup = 1e-6;       // relative to the region diameter
  int max_iterations = 80;
};

struct CriticalPoint {
  Vec x;
  double grad_norm = 0.0;
  double value = 0.0;
  bool singular = false;
  bool fallback = false;  // Hessian was singular; minimum-norm steps were used
};

struct CriticalSetEstimate {
  std::vector<CriticalPoint> points;  // lexicographic order
  std::string region;
  double grad_scale = 0.0;
  double value_scale = 0.0;
  std::size_t seeds = 0;
  std::size_t captured = 0;
  std::size_t discarded = 0;

  std::size_t singular_count() const;
};

CriticalSetEstimate find_critical_points(const Field& u, const Region& region, const CriticalOptions& options = {});

struct ContentOptions {
  double kappa = 0.1;         // threshold(r) = kappa * r * median |Hess u|
  double leaf_fraction = 0.05;  // octree leaves of side <= leaf_fraction * r
  double sample_spacing = 0.1;  // Hessian statistics grid, relative to the region diameter
  std::size_t max_leaves = 4000000;
};

struct ContentRow {
  double r = 0.0;
  double threshold = 0.0;
  std::size_t leaves = 0;
  std::size_t count = 0;
  double count_r_pow = 0.0;  // count * r^{d-2}
  bool degenerate = false;   // no cell or every cell below threshold
};

// Greedy r/2-net of {x in region : |∇u(x)| <= threshold(r)} found by octree refinement.
std::vector<ContentRow> minkowski_content(const Field& u, const Region& region, const std::vector<double>& r_list,
                                          const ContentOptions& options = {});

// Greedy net: keeps a point when it is at least `separation` from all kept points.
std::vector<Vec> greedy_net(std::vector<Vec> points, double separation);

// ---------------------------------------------------------------- pipeline

struct PipelineOptions {
  double doubling_a = 2.0;
  int doubling_random = 120;
  unsigned seed = 1;
  double holder_alpha = 0.0;  // 0: use the domain's alpha (1 when unknown)
  int holder_levels = 6;
  CriticalOptions critical;
  std::vector<double> content_radii{0.2, 0.1};  // fractions of the working radius
  int charts = 3;  // boundary charts along the x_1 axis
};

struct ChartReport {
  Vec base;  // boundary point
  double radius = 0.0;
  std::size_t upper_points = 0;     // critical points of u~ with s > 0
  std::size_t boundary_points = 0;  // with s = 0
  std::size_t pulled_back = 0;      // upper points whose image has |∇u| <= tol
  bool symmetric = true;            // ± s pairing of off-plane points
};

struct PipelineReport {
  std::string stage;  // last completed stage
  double Lambda = 0.0;  // max N_C over the doubling sweep
  double u_doubling_sup = 0.0;
  double ut_doubling_sup = 0.0;
  double working_radius = 0.0;
  double holder_constant = 0.0;
  double holder_alpha = 0.0;
  std::vector<ContentRow> content;
  std::vector<ChartReport> charts;
  std::size_t interior_points = 0;
  std::size_t total_points = 0;
  bool passed = false;
  std::vector<std::string> notes;  // per-stage timings
};

PipelineReport theorem_pipeline(const GraphDomain& domain, FieldPtr u, double R, const PipelineOptions& options = {});

}  // namespace freqlab
