#include "freqlab/integrate1d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace freqlab {

namespace {

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

struct Panel {
  Values value{};
  Values absval{};
};

Panel eval_panel(const LineIntegrand& f, int k, double a, double b, const GaussRule& rule) {
  Panel p;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double buf[kMaxComponents];
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    f(mid + half * rule.nodes[i], buf);
    const double w = rule.weights[i] * half;
    for (int c = 0; c < k; ++c) {
      p.value[static_cast<std::size_t>(c)] += w * buf[c];
      p.absval[static_cast<std::size_t>(c)] += w * std::abs(buf[c]);
    }
  }
  return p;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

QuadResult& QuadResult::operator+=(const QuadResult& other) {
  components = std::max(components, other.components);
  for (int c = 0; c < components; ++c) {
    value[static_cast<std::size_t>(c)] += other.value[static_cast<std::size_t>(c)];
    error[static_cast<std::size_t>(c)] += other.error[static_cast<std::size_t>(c)];
  }
  converged = converged && other.converged;
  return *this;
}

QuadResult QuadResult::scaled(double factor) const {
  QuadResult out = *this;
  for (int c = 0; c < components; ++c) {
    out.value[static_cast<std::size_t>(c)] *= factor;
    out.error[static_cast<std::size_t>(c)] *= std::abs(factor);
  }
  return out;
}

QuadResult adaptive_gauss(const LineIntegrand& f, int k, double a, double b, int n, double tol_rel,
                          int max_depth, const Values& abs_floor) {
  QuadResult result;
  result.components = k;
  if (!(b > a)) return result;
  const GaussRule& rule = gauss_legendre(n);

  struct Item {
    double a, b;
    Panel coarse;
    int depth;
  };
  const Panel whole = eval_panel(f, k, a, b, rule);
  const double m = 0.5 * (a + b);
  const Panel left = eval_panel(f, k, a, m, rule);
  const Panel right = eval_panel(f, k, m, b, rule);
  // Scale fixed from the first refinement so later panels share one absolute target.
  Values scale{};
  bool accept_whole = true;
  for (int c = 0; c < k; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    scale[cc] = std::max({left.absval[cc] + right.absval[cc], abs_floor[cc], 1e-300});
    const double diff = std::abs(left.value[cc] + right.value[cc] - whole.value[cc]);
    if (diff > tol_rel * scale[cc]) accept_whole = false;
  }
  if (accept_whole) {
    for (int c = 0; c < k; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      result.value[cc] = left.value[cc] + right.value[cc];
      result.error[cc] = std::abs(result.value[cc] - whole.value[cc]);
    }
    return result;
  }

  // Depth-first, left half first, so the summation order is fixed.
  std::vector<Item> work;
  work.push_back({m, b, right, 1});
  work.push_back({a, m, left, 1});
  const double length = b - a;
  while (!work.empty()) {
    const Item it = work.back();
    work.pop_back();
    const double mid = 0.5 * (it.a + it.b);
    const Panel pl = eval_panel(f, k, it.a, mid, rule);
    const Panel pr = eval_panel(f, k, mid, it.b, rule);
    const double frac = (it.b - it.a) / length;
    bool ok = true;
    Values diff{};
    for (int c = 0; c < k; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      diff[cc] = std::abs(pl.value[cc] + pr.value[cc] - it.coarse.value[cc]);
      if (diff[cc] > tol_rel * scale[cc] * std::max(frac, 1e-3)) ok = false;
    }
    if (ok || it.depth >= max_depth) {
      if (!ok) result.converged = false;
      for (int c = 0; c < k; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        result.value[cc] += pl.value[cc] + pr.value[cc];
        result.error[cc] += diff[cc];
      }
    } else {
      work.push_back({mid, it.b, pr, it.depth + 1});
      work.push_back({it.a, mid, pl, it.depth + 1});
    }
  }
  return result;
}

QuadResult periodic_trapezoid(const LineIntegrand& f, int k, double period, int n0, double tol_rel,
                              int max_doublings) {
  QuadResult result;
  result.components = k;
  double buf[kMaxComponents];
  Values sum{};
  Values abssum{};
  int n = std::max(n0, 2);
  for (int i = 0; i < n; ++i) {
    f(period * i / n, buf);
    for (int c = 0; c < k; ++c) {
      sum[static_cast<std::size_t>(c)] += buf[c];
      abssum[static_cast<std::size_t>(c)] += std::abs(buf[c]);
    }
  }
  Values prev{};
  for (int c = 0; c < k; ++c) prev[static_cast<std::size_t>(c)] = sum[static_cast<std::size_t>(c)] * period / n;
  for (int level = 0; level <= max_doublings; ++level) {
    // Add the n midpoints, doubling the node count.
    for (int i = 0; i < n; ++i) {
      f(period * (i + 0.5) / n, buf);
      for (int c = 0; c < k; ++c) {
        sum[static_cast<std::size_t>(c)] += buf[c];
        abssum[static_cast<std::size_t>(c)] += std::abs(buf[c]);
      }
    }
    n *= 2;
    bool ok = true;
    for (int c = 0; c < k; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      const double cur = sum[cc] * period / n;
      const double scale = std::max(abssum[cc] * period / n, 1e-300);
      result.value[cc] = cur;
      result.error[cc] = std::abs(cur - prev[cc]);
      if (result.error[cc] > tol_rel * scale) ok = false;
      prev[cc] = cur;
    }
    if (ok) return result;
  }
  result.converged = false;
  return result;
}

}  // namespace freqlab
