#include "freqlab/mfs.hpp"

#include "freqlab/kernels.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace freqlab {

namespace {

constexpr double kPi = std::numbers::pi;

double solve_bracket(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) fail(ErrorKind::Numeric, "harmonic", "solve_mfs", "window corner not bracketed");
  std::uintmax_t iters = 200;
  const auto res = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                     iters);
  return 0.5 * (res.first + res.second);
}

struct Node {
  Vec x;
  Vec n_out;  // outward unit normal of the window piece D ∩ B_W
};

// Chebyshev-like clustering toward both ends of [0, 1].
double cluster2(double t) { return 0.5 * (1.0 - std::cos(kPi * t)); }
// Clustering toward t = 1 only.
double cluster1(double t) { return std::sin(0.5 * kPi * t); }

struct Layout {
  std::vector<Node> graph, arc;  // collocation nodes
  std::vector<Vec> charges;
};

Vec graph_out_normal(const GraphDomain& D, const Vec& x) { return -normal_vector(D, x); }

// 2-D: window corners (x_L, phi(x_L)), (x_R, phi(x_R)) on |X| = W.
Layout layout2(const GraphDomain& D, double W, double offset, int M, int oversample, int corner_charges) {
  auto f = [&](double x) {
    const double p = D.phi(Vec::Constant(1, x));
    return x * x + p * p - W * W;
  };
  const double xR = solve_bracket(f, 0.0, W);
  const double xL = solve_bracket(f, -W, 0.0);
  const Vec cR = vec2(xR, D.phi(Vec::Constant(1, xR)));
  const Vec cL = vec2(xL, D.phi(Vec::Constant(1, xL)));
  const double bR = std::atan2(cR[1], cR[0]);
  double bL = std::atan2(cL[1], cL[0]);
  if (bL < bR) bL += 2.0 * kPi;

  auto graph_node = [&](double t) {
    const double x = xL + (xR - xL) * cluster2(t);
    const Vec xv = Vec::Constant(1, x);
    return Node{D.boundary_point(xv), graph_out_normal(D, xv)};
  };
  auto arc_node = [&](double t) {
    const double b = bR + (bL - bR) * cluster2(t);
    const Vec e = vec2(std::cos(b), std::sin(b));
    return Node{W * e, e};
  };

  const double len_g = xR - xL;
  const double len_a = W * (bL - bR);
  const int Mg = std::max(8, static_cast<int>(std::lround(M * len_g / (len_g + len_a))));
  const int Ma = std::max(8, M - Mg);
  const int unknowns = Mg + Ma + 2 * corner_charges + 1;
  const int Ng = std::max(Mg + 1, static_cast<int>(std::lround(oversample * unknowns * len_g / (len_g + len_a))));
  const int Na = std::max(Ma + 1, oversample * unknowns - Ng);

  Layout L;
  for (int i = 0; i < Ng; ++i) L.graph.push_back(graph_node(static_cast<double>(i) / (Ng - 1)));
  for (int i = 1; i < Na; ++i) L.arc.push_back(arc_node(static_cast<double>(i) / Na));
  for (int j = 0; j < Mg; ++j) {
    const Node n = graph_node((j + 0.5) / Mg);
    L.charges.push_back(n.x + offset * n.n_out);
  }
  for (int j = 0; j < Ma; ++j) {
    const Node n = arc_node((j + 0.5) / Ma);
    L.charges.push_back(n.x + offset * n.n_out);
  }
  for (const auto& [corner, xc] : {std::pair{cR, xR}, std::pair{cL, xL}}) {
    const Vec bis = (graph_out_normal(D, Vec::Constant(1, xc)) + corner / W).normalized();
    for (int k = 0; k < corner_charges; ++k) {
      const double s = offset * std::pow(0.5, corner_charges - k);
      L.charges.push_back(corner + s * bis);
    }
  }
  return L;
}

// 3-D: collocation rings on the graph piece (polar (rho, psi) in x') and on the cap (polar angle from +x_3);
// charges on a Fibonacci sphere of radius W + offset enclosing the window.
Layout layout3(const GraphDomain& D, double W, double offset, int M, int oversample) {
  auto corner_rho = [&](double psi) {
    const Vec e = vec2(std::cos(psi), std::sin(psi));
    return solve_bracket(
        [&](double rho) {
          const double p = D.phi(rho * e);
          return rho * rho + p * p - W * W;
        },
        0.0, W);
  };
  Layout L;
  const int K = std::max(4, static_cast<int>(std::lround(std::sqrt(oversample * M / kPi))));
  L.graph.push_back({D.boundary_point(Vec::Zero(2)), graph_out_normal(D, Vec::Zero(2))});
  L.arc.push_back({vec3(0.0, 0.0, W), vec3(0.0, 0.0, 1.0)});
  for (int k = 1; k <= K; ++k) {
    const double t = cluster1(static_cast<double>(k) / K);
    const int m = std::max(6, static_cast<int>(std::lround(2.0 * kPi * k)));
    for (int i = 0; i < m; ++i) {
      const double psi = 2.0 * kPi * (i + 0.5 * (k % 2)) / m;
      const double rc = corner_rho(psi);
      const Vec x = rc * t * vec2(std::cos(psi), std::sin(psi));
      L.graph.push_back({D.boundary_point(x), graph_out_normal(D, x)});
      if (k == K) continue;  // the corner ring is on the graph
      const double zc = D.phi(rc * vec2(std::cos(psi), std::sin(psi)));
      const double b = std::acos(std::clamp(zc / W, -1.0, 1.0)) * t;
      const Vec e = vec3(std::sin(b) * std::cos(psi), std::sin(b) * std::sin(psi), std::cos(b));
      L.arc.push_back({W * e, e});
    }
  }
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int j = 0; j < M; ++j) {
    const double z = 1.0 - 2.0 * (j + 0.5) / M;
    const double rho = std::sqrt(1.0 - z * z);
    const double psi = golden * j;
    L.charges.push_back((W + offset) * vec3(rho * std::cos(psi), rho * std::sin(psi), z));
  }
  return L;
}

double kernel(int d, const Vec& X, const Vec& c) {
  const double r2 = (X - c).squaredNorm();
  return d == 2 ? 0.5 * std::log(r2) : 1.0 / std::sqrt(r2);
}

}  // namespace

MfsField::MfsField(int dim, std::vector<double> cx, std::vector<double> cy, std::vector<double> cz,
                   std::vector<double> w, double constant, std::string tag)
    : Field(dim), cx_(std::move(cx)), cy_(std::move(cy)), cz_(std::move(cz)), w_(std::move(w)), c0_(constant),
      tag_(std::move(tag)) {
  if (dim != 2 && dim != 3) fail(ErrorKind::Domain, "harmonic", "MfsField", "d must be 2 or 3");
  if (cx_.size() != w_.size() || cy_.size() != w_.size() || (dim == 3 && cz_.size() != w_.size()))
    fail(ErrorKind::Domain, "harmonic", "MfsField", "charge arrays differ in length");
}

Vec MfsField::charge(std::size_t j) const { return dim() == 2 ? vec2(cx_[j], cy_[j]) : vec3(cx_[j], cy_[j], cz_[j]); }

Jet MfsField::eval(const Vec& X, int order) const {
  const auto& k = kernels::active_kernels();
  if (dim() == 2) {
    kernels::MfsSums2 s;
    k.mfs2(cx_.data(), cy_.data(), w_.data(), w_.size(), X[0], X[1], order, &s);
    Mat H(2, 2);
    H << s.hxx, s.hxy, s.hxy, s.hyy;
    return {c0_ + s.value, vec2(s.gx, s.gy), H};
  }
  kernels::MfsSums3 s;
  k.mfs3(cx_.data(), cy_.data(), cz_.data(), w_.data(), w_.size(), X[0], X[1], X[2], order, &s);
  Mat H(3, 3);
  H << s.h[0], s.h[1], s.h[2], s.h[1], s.h[3], s.h[4], s.h[2], s.h[4], s.h[5];
  return {c0_ + s.value, vec3(s.g[0], s.g[1], s.g[2]), H};
}

double MfsField::value(const Vec& X) const { return eval(X, 0).value; }

ValueGrad MfsField::value_grad(const Vec& X) const {
  const Jet j = eval(X, 1);
  return {j.value, j.grad};
}

Jet MfsField::jet(const Vec& X) const { return eval(X, 2); }

std::shared_ptr<const MfsField> solve_mfs(const GraphDomain& domain, const BoundaryData& data,
                                          const MfsOptions& options) {
  const int d = domain.dim();
  const double W = options.window_radius > 0.0 ? options.window_radius : 2.0 * domain.R();
  const double Wc = options.check_radius > 0.0 ? std::min(W, options.check_radius) : W;
  const double offset = options.offset > 0.0 ? options.offset : 0.5 * W;
  if ((options.charges != 0 && options.charges < 8) || options.oversample < 1 || options.corner_charges < 0)
    fail(ErrorKind::Domain, "harmonic", "solve_mfs", "need charges >= 8, oversample >= 1, corner_charges >= 0");
  if (!(std::abs(domain.phi(Vec::Zero(d - 1))) < W))
    fail(ErrorKind::Domain, "harmonic", "solve_mfs", "graph does not cross the window");

  const int M = options.charges > 0 ? options.charges : (d == 2 ? 160 : 600);
  const Layout L = d == 2 ? layout2(domain, W, offset, M, options.oversample, options.corner_charges)
                          : layout3(domain, W, offset, M, options.oversample);
  for (const Vec& c : L.charges)
    if (domain.gap(c) >= 0.0 && c.norm() <= W)
      fail(ErrorKind::Numeric, "harmonic", "solve_mfs",
           "charge inside the window domain at " + format_point(c) + "; use a smaller offset");

  const int nc = static_cast<int>(L.charges.size());
  const int ng = static_cast<int>(L.graph.size());
  const int rows = ng + static_cast<int>(L.arc.size());
  Eigen::MatrixXd A(rows, nc + 1);
  Eigen::VectorXd b(rows);
  double data_max = 0.0;
  for (int i = 0; i < rows; ++i) {
    const Vec& X = i < ng ? L.graph[static_cast<std::size_t>(i)].x : L.arc[static_cast<std::size_t>(i - ng)].x;
    const double wt = i < ng ? 1.0 : options.arc_weight;
    for (int j = 0; j < nc; ++j) A(i, j) = wt * kernel(d, X, L.charges[static_cast<std::size_t>(j)]);
    A(i, nc) = wt;
    const double g = i < ng ? 0.0 : data(X);
    if (!std::isfinite(g)) fail(ErrorKind::Numeric, "harmonic", "solve_mfs", "non-finite boundary data");
    b[i] = wt * g;
    data_max = std::max(data_max, std::abs(g));
  }
  if (data_max == 0.0)
    fail(ErrorKind::Degenerate, "harmonic", "solve_mfs", "boundary data vanish identically: trivial field");

  Eigen::VectorXd scale(nc + 1);
  for (int j = 0; j <= nc; ++j) {
    scale[j] = A.col(j).norm();
    A.col(j) /= scale[j];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(options.rank_tol);
  const Eigen::VectorXd y = svd.solve(b);
  const Eigen::VectorXd coef = y.cwiseQuotient(scale);

  std::vector<double> cx, cy, cz, w;
  for (int j = 0; j < nc; ++j) {
    const Vec& c = L.charges[static_cast<std::size_t>(j)];
    cx.push_back(c[0]);
    cy.push_back(c[1]);
    if (d == 3) cz.push_back(c[2]);
    w.push_back(coef[j]);
  }
  std::ostringstream tag;
  tag << "mfs(" << domain.describe() << ",W=" << W << ",charges=" << nc << ")";
  auto field = std::make_shared<MfsField>(d, cx, cy, cz, w, coef[nc], tag.str());

  MfsDiagnostics diag;
  diag.window_radius = W;
  diag.check_radius = Wc;
  diag.offset = offset;
  diag.charges = nc;
  diag.collocation = rows;
  diag.rank = static_cast<int>(svd.rank());
  diag.max_weight = coef.head(nc).cwiseAbs().maxCoeff();

  // Interior RMS on a polar grid of D ∩ B_check.
  double s2 = 0.0, sw = 0.0;
  const int nr = 24, na = 48;
  for (int i = 0; i < nr; ++i) {
    const double r = Wc * (i + 0.5) / nr;
    if (d == 2) {
      for (int k = 0; k < na; ++k) {
        const double a = 2.0 * kPi * (k + 0.5) / na;
        const Vec X = r * vec2(std::cos(a), std::sin(a));
        if (!domain.contains(X)) continue;
        const double u = field->value(X);
        s2 += r * u * u;
        sw += r;
      }
    } else {
      for (int k = 0; k < na / 2; ++k) {
        const double bpol = kPi * (k + 0.5) / (na / 2);
        for (int m = 0; m < na; ++m) {
          const double a = 2.0 * kPi * (m + 0.5) / na;
          const Vec X = r * vec3(std::sin(bpol) * std::cos(a), std::sin(bpol) * std::sin(a), std::cos(bpol));
          if (!domain.contains(X)) continue;
          const double u = field->value(X);
          const double wt = r * r * std::sin(bpol);
          s2 += wt * u * u;
          sw += wt;
        }
      }
    }
  }
  diag.interior_rms = sw > 0.0 ? std::sqrt(s2 / sw) : 0.0;
  if (!(diag.interior_rms > 0.0) || !std::isfinite(diag.interior_rms))
    fail(ErrorKind::Numeric, "harmonic", "solve_mfs", "fitted field has no interior mass");

  // Residual checks on points distinct from the collocation nodes.
  double g_res = 0.0, a_res = 0.0;
  const Layout check = d == 2 ? layout2(domain, W, offset, 2 * M + 7, options.oversample, 0)
                              : layout3(domain, W, offset, M + 50, options.oversample);
  for (const Node& n : check.graph)
    if (n.x.norm() <= Wc) g_res = std::max(g_res, std::abs(field->value(n.x)));
  for (const Node& n : check.arc) a_res = std::max(a_res, std::abs(field->value(n.x) - data(n.x)));
  diag.graph_residual = g_res / diag.interior_rms;
  diag.arc_residual = a_res / diag.interior_rms;
  field->set_diagnostics(diag);

  if (diag.max_weight > 1e13 * std::max(data_max, diag.interior_rms))
    fail(ErrorKind::Numeric, "harmonic", "solve_mfs",
         "ill-conditioned beyond rank tolerance (weights cancel); use fewer charges or a larger offset");
  if (!(diag.graph_residual <= options.boundary_tol)) {
    std::ostringstream os;
    os << "boundary residual " << diag.graph_residual << " exceeds boundary_tol " << options.boundary_tol;
    fail(ErrorKind::Quality, "harmonic", "solve_mfs", os.str());
  }
  return field;
}

BoundaryData graph_adapted_data(const GraphDomain& domain, FieldPtr P) {
  return [domain, P](const Vec& X) {
    Vec Y = X;
    Y[X.size() - 1] = domain.gap(X);
    return P->value(Y);
  };
}

}  // namespace freqlab
