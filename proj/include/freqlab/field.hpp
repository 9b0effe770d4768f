#pragma once

#include "freqlab/geometry.hpp"
#include "freqlab/quadrature.hpp"
#include "freqlab/types.hpp"

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace freqlab {

struct ValueGrad {
  double value = 0.0;
  Vec grad;
};

struct Jet {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

// Scalar field u with first and second derivatives.
class Field {
 public:
  explicit Field(int dim) : dim_(dim) {}
  virtual ~Field() = default;

  int dim() const { return dim_; }
  virtual double value(const Vec& X) const { return value_grad(X).value; }
  virtual ValueGrad value_grad(const Vec& X) const = 0;
  // Default: central differences of the gradient.
  virtual Jet jet(const Vec& X) const;
  virtual std::string provenance() const = 0;

  double laplacian(const Vec& X) const { return jet(X).hess.trace(); }

 protected:
  Jet jet_by_differences(const Vec& X, double h) const;

 private:
  int dim_;
};

using FieldPtr = std::shared_ptr<const Field>;

// Sum of monomials c * prod x_i^{e_i}.
class PolynomialField final : public Field {
 public:
  struct Term {
    double coef;
    std::array<int, 3> exps;
  };

  PolynomialField(int dim, std::vector<Term> terms, std::string tag);

  double value(const Vec& X) const override;
  ValueGrad value_grad(const Vec& X) const override;
  Jet jet(const Vec& X) const override;
  std::string provenance() const override { return tag_; }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
  std::string tag_;
};

// Homogeneous degree-k harmonic polynomial vanishing on {x_d = 0}.
std::shared_ptr<const PolynomialField> exact_polynomial(int d, int k);

// Im(sum_k a_k (z - z0)^k) in d = 2, z = x + i y.
std::shared_ptr<const PolynomialField> im_complex_polynomial(const std::vector<std::complex<double>>& a,
                                                             std::complex<double> z0 = {0.0, 0.0});

// Real combination sum c_i u_i.
class SumField final : public Field {
 public:
  SumField(std::vector<FieldPtr> parts, std::vector<double> coefs);
  ValueGrad value_grad(const Vec& X) const override;
  Jet jet(const Vec& X) const override;
  std::string provenance() const override;

 private:
  std::vector<FieldPtr> parts_;
  std::vector<double> coefs_;
};

// T_{X,r}u(Y) = (u(X + rY) - u(X)) / (r^{-d} ∬_{B_r(X) ∩ D} |u - u(X)|^2)^{1/2}.
class RescaledField final : public Field {
 public:
  RescaledField(FieldPtr base, Vec center, double r, double norm);
  double value(const Vec& Y) const override;
  ValueGrad value_grad(const Vec& Y) const override;
  Jet jet(const Vec& Y) const override;
  std::string provenance() const override { return "rescaled(" + base_->provenance() + ")"; }

  const Vec& center() const { return center_; }
  double radius() const { return r_; }
  double norm() const { return norm_; }

 private:
  FieldPtr base_;
  Vec center_;
  double r_;
  double norm_;
  double base_value_;
};

std::shared_ptr<const RescaledField> rescale(const FieldPtr& u, const GraphDomain& domain, const Vec& X, double r,
                                             const QuadratureSpec& spec = {});

// Simon's example u = xy + sin^2(eps z) with A(z) = [[1, -q, 0], [-q, 1, 0], [0, 0, 1]],
// q = (g^2)''/2 = eps^2 cos(2 eps z).
class SimonField final : public Field {
 public:
  explicit SimonField(double eps);
  double value(const Vec& X) const override;
  ValueGrad value_grad(const Vec& X) const override;
  Jet jet(const Vec& X) const override;
  std::string provenance() const override;
  double epsilon() const { return eps_; }
  Mat coefficient(double z) const;

 private:
  double eps_;
};

struct SimonFixture {
  std::shared_ptr<const SimonField> field;
  std::vector<double> critical_z;  // all of C(u) ∩ {|z| <= z_max}, increasing
  std::vector<double> singular_z;  // the subset where sin(eps z) = 0
  Mat coefficient(double z) const { return field->coefficient(z); }
};

SimonFixture simon_fixture(double eps, double z_max = 12.0);

// div(A grad u) by fourth-order central differences of the flux; identically 0 in exact arithmetic.
double simon_divergence_residual(const SimonField& u, const Vec& X, double h = 1e-3);

}  // namespace freqlab
