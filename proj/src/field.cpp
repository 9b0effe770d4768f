#include "freqlab/field.hpp"

#include <cmath>
#include <sstream>

namespace freqlab {

Jet Field::jet(const Vec& X) const { return jet_by_differences(X, 1e-5 * std::max(1.0, X.norm())); }

Jet Field::jet_by_differences(const Vec& X, double h) const {
  const ValueGrad c = value_grad(X);
  Jet j{c.value, c.grad, Mat::Zero(dim_, dim_)};
  Vec Y = X;
  for (int i = 0; i < dim_; ++i) {
    Y[i] = X[i] + h;
    const Vec gp = value_grad(Y).grad;
    Y[i] = X[i] - h;
    const Vec gm = value_grad(Y).grad;
    Y[i] = X[i];
    j.hess.col(i) = (gp - gm) / (2.0 * h);
  }
  j.hess = 0.5 * (j.hess + j.hess.transpose()).eval();
  return j;
}

SumField::SumField(std::vector<FieldPtr> parts, std::vector<double> coefs)
    : Field(parts.empty() ? 2 : parts.front()->dim()), parts_(std::move(parts)), coefs_(std::move(coefs)) {
  if (parts_.empty() || parts_.size() != coefs_.size())
    fail(ErrorKind::Domain, "harmonic", "SumField", "need one coefficient per part");
  for (const auto& p : parts_)
    if (p->dim() != dim()) fail(ErrorKind::Domain, "harmonic", "SumField", "dimension mismatch");
}

ValueGrad SumField::value_grad(const Vec& X) const {
  ValueGrad out{0.0, Vec::Zero(dim())};
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const ValueGrad v = parts_[i]->value_grad(X);
    out.value += coefs_[i] * v.value;
    out.grad += coefs_[i] * v.grad;
  }
  return out;
}

Jet SumField::jet(const Vec& X) const {
  Jet out{0.0, Vec::Zero(dim()), Mat::Zero(dim(), dim())};
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const Jet v = parts_[i]->jet(X);
    out.value += coefs_[i] * v.value;
    out.grad += coefs_[i] * v.grad;
    out.hess += coefs_[i] * v.hess;
  }
  return out;
}

std::string SumField::provenance() const {
  std::ostringstream os;
  os << "sum(";
  for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? " + " : "") << coefs_[i] << "*" << parts_[i]->provenance();
  os << ")";
  return os.str();
}

RescaledField::RescaledField(FieldPtr base, Vec center, double r, double norm)
    : Field(base->dim()), base_(std::move(base)), center_(std::move(center)), r_(r), norm_(norm) {
  base_value_ = base_->value(center_);
}

double RescaledField::value(const Vec& Y) const { return (base_->value(center_ + r_ * Y) - base_value_) / norm_; }

ValueGrad RescaledField::value_grad(const Vec& Y) const {
  const ValueGrad v = base_->value_grad(center_ + r_ * Y);
  return {(v.value - base_value_) / norm_, (r_ / norm_) * v.grad};
}

Jet RescaledField::jet(const Vec& Y) const {
  const Jet j = base_->jet(center_ + r_ * Y);
  return {(j.value - base_value_) / norm_, (r_ / norm_) * j.grad, (r_ * r_ / norm_) * j.hess};
}

std::shared_ptr<const RescaledField> rescale(const FieldPtr& u, const GraphDomain& domain, const Vec& X, double r,
                                             const QuadratureSpec& spec) {
  if (!(r > 0.0)) fail(ErrorKind::Domain, "harmonic", "rescale", "r must be positive");
  const double uX = u->value(X);
  const QuadResult q = ball_integral(
      [&](const Vec& Z) {
        const double v = u->value(Z) - uX;
        return v * v;
      },
      domain, X, r, spec);
  const double norm2 = q[0] / std::pow(r, domain.dim());
  if (!(norm2 > 1e-28 * std::max(1.0, uX * uX)))
    fail(ErrorKind::Degenerate, "harmonic", "rescale", "u is constant on B_r(X) ∩ D at " + format_point(X));
  return std::make_shared<RescaledField>(u, X, r, std::sqrt(norm2));
}

}  // namespace freqlab
