#include "freqlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace freqlab {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Powers x_i^e for e = 0..max_exp.
struct PowerTable {
  std::array<std::array<double, 24>, 3> p{};
  PowerTable(const Vec& X, int max_exp) {
    for (Eigen::Index i = 0; i < X.size(); ++i) {
      p[static_cast<std::size_t>(i)][0] = 1.0;
      for (int e = 1; e <= max_exp; ++e)
        p[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)] =
            p[static_cast<std::size_t>(i)][static_cast<std::size_t>(e - 1)] * X[i];
    }
  }
  double operator()(int i, int e) const {
    return e < 0 ? 0.0 : p[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
  }
};

int max_exponent(const std::vector<PolynomialField::Term>& terms) {
  int m = 0;
  for (const auto& t : terms) m = std::max({m, t.exps[0], t.exps[1], t.exps[2]});
  return m;
}

}  // namespace

PolynomialField::PolynomialField(int dim, std::vector<Term> terms, std::string tag)
    : Field(dim), terms_(std::move(terms)), tag_(std::move(tag)) {
  if (max_exponent(terms_) > 22) fail(ErrorKind::Domain, "harmonic", "PolynomialField", "degree above 22");
}

double PolynomialField::value(const Vec& X) const {
  const PowerTable P(X, max_exponent(terms_));
  double s = 0.0;
  for (const auto& t : terms_) {
    double m = t.coef;
    for (int i = 0; i < dim(); ++i) m *= P(i, t.exps[static_cast<std::size_t>(i)]);
    s += m;
  }
  return s;
}

ValueGrad PolynomialField::value_grad(const Vec& X) const {
  const Jet j = jet(X);
  return {j.value, j.grad};
}

Jet PolynomialField::jet(const Vec& X) const {
  const int d = dim();
  const PowerTable P(X, max_exponent(terms_));
  Jet j{0.0, Vec::Zero(d), Mat::Zero(d, d)};
  for (const auto& t : terms_) {
    const auto& e = t.exps;
    double base[3];
    for (int i = 0; i < d; ++i) base[i] = P(i, e[static_cast<std::size_t>(i)]);
    double v = t.coef;
    for (int i = 0; i < d; ++i) v *= base[i];
    j.value += v;
    for (int a = 0; a < d; ++a) {
      const int ea = e[static_cast<std::size_t>(a)];
      if (ea == 0) continue;
      double g = t.coef * ea * P(a, ea - 1);
      for (int i = 0; i < d; ++i)
        if (i != a) g *= base[i];
      j.grad[a] += g;
      for (int b = 0; b < d; ++b) {
        const int eb = e[static_cast<std::size_t>(b)];
        double h;
        if (b == a) {
          if (ea < 2) continue;
          h = t.coef * ea * (ea - 1) * P(a, ea - 2);
          for (int i = 0; i < d; ++i)
            if (i != a) h *= base[i];
        } else {
          if (eb == 0) continue;
          h = t.coef * ea * eb * P(a, ea - 1) * P(b, eb - 1);
          for (int i = 0; i < d; ++i)
            if (i != a && i != b) h *= base[i];
        }
        j.hess(a, b) += h;
      }
    }
  }
  return j;
}

std::shared_ptr<const PolynomialField> exact_polynomial(int d, int k) {
  if (d != 2 && d != 3) fail(ErrorKind::Domain, "harmonic", "exact_polynomial", "d must be 2 or 3");
  if (k < 1) fail(ErrorKind::Domain, "harmonic", "exact_polynomial", "degree must be >= 1");
  using T = PolynomialField::Term;
  const std::string tag = "poly(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")";
  if (d == 3 && k <= 4) {
    switch (k) {
      case 1: return std::make_shared<PolynomialField>(3, std::vector<T>{{1.0, {0, 0, 1}}}, tag);
      case 2: return std::make_shared<PolynomialField>(3, std::vector<T>{{1.0, {1, 0, 1}}}, tag);
      case 3: return std::make_shared<PolynomialField>(3, std::vector<T>{{3.0, {2, 0, 1}}, {-1.0, {0, 0, 3}}}, tag);
      default: return std::make_shared<PolynomialField>(3, std::vector<T>{{1.0, {3, 0, 1}}, {-1.0, {1, 0, 3}}}, tag);
    }
  }
  // Im((x_1 + i x_d)^k); in d = 3 it does not depend on x_2.
  std::vector<T> terms;
  for (int j = 1; j <= k; j += 2) {
    const double sign = ((j - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    T t{sign * binom(k, j), {k - j, 0, 0}};
    t.exps[static_cast<std::size_t>(d - 1)] = j;
    terms.push_back(t);
  }
  return std::make_shared<PolynomialField>(d, std::move(terms), tag);
}

std::shared_ptr<const PolynomialField> im_complex_polynomial(const std::vector<std::complex<double>>& a,
                                                             std::complex<double> z0) {
  const int n = static_cast<int>(a.size());
  // Re-expand about the origin: b_m = sum_k a_k C(k, m) (-z0)^{k-m}.
  std::vector<std::complex<double>> b(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m <= k; ++m)
      b[static_cast<std::size_t>(m)] += a[static_cast<std::size_t>(k)] * binom(k, m) * std::pow(-z0, k - m);
  std::map<std::pair<int, int>, double> acc;
  for (int m = 0; m < n; ++m) {
    const auto bm = b[static_cast<std::size_t>(m)];
    // Im(b z^m) = Re(b) Im(z^m) + Im(b) Re(z^m), z^m = sum_j C(m,j) x^{m-j} (i y)^j.
    for (int j = 0; j <= m; ++j) {
      const double c = binom(m, j);
      const double sign = (j / 2) % 2 == 0 ? 1.0 : -1.0;
      const double coef = (j % 2 == 1) ? bm.real() * sign * c : bm.imag() * sign * c;
      if (coef != 0.0) acc[{m - j, j}] += coef;
    }
  }
  std::vector<PolynomialField::Term> terms;
  for (const auto& [e, c] : acc)
    if (c != 0.0) terms.push_back({c, {e.first, e.second, 0}});
  return std::make_shared<PolynomialField>(2, std::move(terms), "poly(complex)");
}

}  // namespace freqlab
