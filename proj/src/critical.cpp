#include "freqlab/critical.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace freqlab {

namespace {

constexpr const char* kModule = "critical";

double spectral_norm(const Mat& H) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// Grid points lo + i h inside the region.
std::vector<Vec> grid_points(const Region& region, double h) {
  const int d = region.dim();
  std::vector<int> n(d);
  for (int i = 0; i < d; ++i) n[i] = static_cast<int>(std::floor((region.hi[i] - region.lo[i]) / h + 1e-9));
  std::vector<Vec> out;
  std::vector<int> idx(d, 0);
  while (true) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = region.lo[i] + idx[i] * h;
    if (region.contains(x)) out.push_back(x);
    int k = 0;
    while (k < d && ++idx[k] > n[k]) idx[k++] = 0;
    if (k == d) break;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- region

Region Region::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || (lo.size() != 2 && lo.size() != 3))
    fail(ErrorKind::Domain, kModule, "region", "box corners must share dimension 2 or 3");
  if (((hi - lo).array() <= 0.0).any()) fail(ErrorKind::Domain, kModule, "region", "empty box");
  Region r;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  return r;
}

Region Region::ball(Vec center, double radius) {
  if (!(radius > 0.0)) fail(ErrorKind::Domain, kModule, "region", "radius must be positive");
  Region r = box(center.array() - radius, center.array() + radius);
  r.ball_center = std::move(center);
  r.ball_radius = radius;
  return r;
}

Region Region::domain_ball(const GraphDomain& domain, Vec center, double radius) {
  if (center.size() != domain.dim()) fail(ErrorKind::Domain, kModule, "region", "dimension mismatch");
  Region r = ball(std::move(center), radius);
  r.domain = domain;
  return r;
}

bool Region::contains(const Vec& X, double pad) const {
  if (X.size() != lo.size()) return false;
  if (((X - lo).array() < -pad).any() || ((hi - X).array() < -pad).any()) return false;
  if (ball_center && (X - *ball_center).norm() > ball_radius + pad) return false;
  if (domain) {
    const double slack = closure_slack * diameter() + 2.0 * pad;
    if (domain->gap(X) < -slack) return false;
  }
  return true;
}

std::string Region::describe() const {
  std::ostringstream os;
  if (ball_center) os << "ball(" << format_point(*ball_center) << ", " << ball_radius << ")";
  else os << "box(" << format_point(lo) << ", " << format_point(hi) << ")";
  if (domain) os << " ∩ closure(" << domain->describe() << ")";
  return os.str();
}

std::size_t CriticalSetEstimate::singular_count() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const CriticalPoint& p) { return p.singular; }));
}

// ---------------------------------------------------------------- detection

CriticalSetEstimate find_critical_points(const Field& u, const Region& region, const CriticalOptions& opt) {
  if (u.dim() != region.dim()) fail(ErrorKind::Domain, kModule, "find_critical_points", "dimension mismatch");
  if (!(opt.seed_spacing > 0.0)) fail(ErrorKind::Domain, kModule, "find_critical_points", "seed spacing must be positive");
  const int d = u.dim();
  const double h = opt.seed_spacing;
  CriticalSetEstimate est;
  est.region = region.describe();

  const std::vector<Vec> seeds = grid_points(region, h);
  est.seeds = seeds.size();
  if (seeds.empty()) fail(ErrorKind::Domain, kModule, "find_critical_points", "no seed inside " + est.region);
  std::vector<Jet> jets;
  jets.reserve(seeds.size());
  for (const Vec& x : seeds) {
    jets.push_back(u.jet(x));
    est.grad_scale = std::max(est.grad_scale, jets.back().grad.norm());
    est.value_scale = std::max(est.value_scale, std::abs(jets.back().value));
  }
  if (!(est.grad_scale > 0.0)) fail(ErrorKind::Degenerate, kModule, "find_critical_points", "∇u vanishes on every seed");

  const double accept = opt.grad_tol * est.grad_scale;
  const double pad = 1e-9 * region.diameter();
  std::vector<CriticalPoint> found;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    // A zero within half a cell gives |∇u| <= sqrt(d) h |Hess| / 2 at the seed.
    const double gate = std::max(opt.capture * est.grad_scale, std::sqrt(double(d)) * h * spectral_norm(jets[i].hess));
    if (jets[i].grad.norm() > gate) continue;
    ++est.captured;
    Vec X = seeds[i];
    Jet J = jets[i];
    bool fallback = false;
    bool ok = true;
    for (int it = 0; it < opt.max_iterations; ++it) {
      const double g = J.grad.norm();
      if (g == 0.0) break;
      Eigen::JacobiSVD<Mat> svd(J.hess, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double cut = 1e-10 * std::max(sv[0], 1e-300);
      Vec step = Vec::Zero(d);
      for (int k = 0; k < d; ++k) {
        if (sv[k] > cut) step -= svd.matrixV().col(k) * (svd.matrixU().col(k).dot(J.grad) / sv[k]);
        else fallback = true;
      }
      if (!step.allFinite() || step.norm() > 4.0 * h + 1.0) {
        ok = false;
        break;
      }
      X += step;
      if (!region.contains(X, 2.0 * h)) {
        ok = false;
        break;
      }
      J = u.jet(X);
      if (step.norm() <= 1e-14 * (1.0 + X.norm())) break;
    }
    if (!ok || !(J.grad.norm() <= accept) || !region.contains(X, pad)) {
      ++est.discarded;
      continue;
    }
    found.push_back({X, J.grad.norm(), J.value, false, fallback});
  }

  std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) { return lex_less(a.x, b.x); });
  const double radius = opt.dedup * region.diameter();
  for (const CriticalPoint& p : found) {
    bool dup = false;
    for (CriticalPoint& q : est.points) {
      if ((q.x - p.x).norm() <= radius) {
        if (p.grad_norm < q.grad_norm) q = p;
        dup = true;
        break;
      }
    }
    if (!dup) est.points.push_back(p);
  }
  std::sort(est.points.begin(), est.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return lex_less(a.x, b.x); });
  for (CriticalPoint& p : est.points) p.singular = std::abs(p.value) <= opt.value_tol * std::max(est.value_scale, 1e-300);
  return est;
}

// ---------------------------------------------------------------- content

std::vector<Vec> greedy_net(std::vector<Vec> points, double separation) {
  if (points.empty()) return {};
  if (!(separation > 0.0)) fail(ErrorKind::Domain, kModule, "greedy_net", "separation must be positive");
  const int d = static_cast<int>(points.front().size());
  // Sweep along the axis of largest spread so that curves are traversed in order.
  Vec lo = points.front(), hi = points.front();
  for (const Vec& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::vector<int> axes(d);
  for (int i = 0; i < d; ++i) axes[i] = i;
  std::stable_sort(axes.begin(), axes.end(), [&](int a, int b) { return hi[a] - lo[a] > hi[b] - lo[b]; });
  std::sort(points.begin(), points.end(), [&](const Vec& a, const Vec& b) {
    for (int i : axes) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  });
  auto key = [&](const Vec& p, int off0, int off1, int off2) {
    const long long a = static_cast<long long>(std::floor((p[0] - lo[0]) / separation)) + off0;
    const long long b = static_cast<long long>(std::floor((p[1] - lo[1]) / separation)) + off1;
    const long long c = d == 3 ? static_cast<long long>(std::floor((p[2] - lo[2]) / separation)) + off2 : 0;
    return (a * 1000003LL + b) * 1000003LL + c;
  };
  std::unordered_map<long long, std::vector<std::size_t>> cells;
  std::vector<Vec> kept;
  for (const Vec& p : points) {
    bool near = false;
    const int r2 = d == 3 ? 1 : 0;
    for (int a = -1; a <= 1 && !near; ++a)
      for (int b = -1; b <= 1 && !near; ++b)
        for (int c = -r2; c <= r2 && !near; ++c) {
          auto it = cells.find(key(p, a, b, c));
          if (it == cells.end()) continue;
          for (std::size_t k : it->second)
            if ((kept[k] - p).norm() < separation) {
              near = true;
              break;
            }
        }
    if (!near) {
      cells[key(p, 0, 0, 0)].push_back(kept.size());
      kept.push_back(p);
    }
  }
  return kept;
}

std::vector<ContentRow> minkowski_content(const Field& u, const Region& region, const std::vector<double>& r_list,
                                          const ContentOptions& opt) {
  const int d = region.dim();
  if (u.dim() != d) fail(ErrorKind::Domain, kModule, "minkowski_content", "dimension mismatch");
  const std::vector<Vec> samples = grid_points(region, opt.sample_spacing * region.diameter());
  if (samples.empty()) fail(ErrorKind::Domain, kModule, "minkowski_content", "region too small for the sample grid");
  std::vector<double> norms;
  norms.reserve(samples.size());
  for (const Vec& x : samples) norms.push_back(spectral_norm(u.jet(x).hess));
  const double hmax = *std::max_element(norms.begin(), norms.end());
  std::nth_element(norms.begin(), norms.begin() + norms.size() / 2, norms.end());
  // Affine u: threshold 0, so only exact zeros of ∇u survive.
  const double median = norms[norms.size() / 2] > 0.0 ? norms[norms.size() / 2] : hmax;
  if (hmax == 0.0 && u.value_grad(samples.front()).grad.norm() == 0.0)
    fail(ErrorKind::Degenerate, kModule, "minkowski_content", "u is constant on the region");
  const double lip = 2.0 * hmax;

  const Vec centre = 0.5 * (region.lo + region.hi);
  const double side0 = (region.hi - region.lo).maxCoeff();
  std::vector<ContentRow> rows;
  for (double r : r_list) {
    if (!(r > 0.0)) fail(ErrorKind::Domain, kModule, "minkowski_content", "radii must be positive");
    ContentRow row;
    row.r = r;
    row.threshold = opt.kappa * r * median;
    std::vector<Vec> leaves;
    std::size_t rejected = 0;
    const double leaf_side = opt.leaf_fraction * r;
    std::function<void(const Vec&, double)> visit = [&](const Vec& c, double side) {
      const double half_diag = 0.5 * side * std::sqrt(double(d));
      if (!region.contains(c, half_diag)) return;
      const double g = u.value_grad(c).grad.norm();
      if (g - lip * half_diag > row.threshold) {
        ++rejected;
        return;
      }
      if (side <= leaf_side) {
        if (region.contains(c) && g <= row.threshold) leaves.push_back(c);
        else ++rejected;
        if (leaves.size() > opt.max_leaves)
          fail(ErrorKind::Numeric, kModule, "minkowski_content", "leaf budget exceeded; threshold rule too loose");
        return;
      }
      const double q = 0.25 * side;
      for (int m = 0; m < (1 << d); ++m) {
        Vec cc = c;
        for (int i = 0; i < d; ++i) cc[i] += (m >> i & 1) ? q : -q;
        visit(cc, 0.5 * side);
      }
    };
    visit(centre, side0);
    row.leaves = leaves.size();
    row.degenerate = leaves.empty() || rejected == 0;
    row.count = greedy_net(std::move(leaves), 0.5 * r).size();
    row.count_r_pow = row.count * std::pow(r, d - 2);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace freqlab
