#include "freqlab/field.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace freqlab {

SimonField::SimonField(double eps) : Field(3), eps_(eps) {
  if (!(eps > 0.0)) fail(ErrorKind::Domain, "harmonic", "SimonField", "eps must be positive");
  if (!(2.0 * eps * eps < 0.25))
    fail(ErrorKind::Precondition, "harmonic", "SimonField", "ellipticity needs 2 eps^2 < 1/4");
}

double SimonField::value(const Vec& X) const {
  const double s = std::sin(eps_ * X[2]);
  return X[0] * X[1] + s * s;
}

ValueGrad SimonField::value_grad(const Vec& X) const {
  const double s = std::sin(eps_ * X[2]);
  return {X[0] * X[1] + s * s, vec3(X[1], X[0], eps_ * std::sin(2.0 * eps_ * X[2]))};
}

Jet SimonField::jet(const Vec& X) const {
  const ValueGrad vg = value_grad(X);
  Mat H = Mat::Zero(3, 3);
  H(0, 1) = H(1, 0) = 1.0;
  H(2, 2) = 2.0 * eps_ * eps_ * std::cos(2.0 * eps_ * X[2]);
  return {vg.value, vg.grad, H};
}

std::string SimonField::provenance() const {
  std::ostringstream os;
  os << "simon(eps=" << eps_ << ")";
  return os.str();
}

Mat SimonField::coefficient(double z) const {
  const double q = eps_ * eps_ * std::cos(2.0 * eps_ * z);
  Mat A = Mat::Identity(3, 3);
  A(0, 1) = A(1, 0) = -q;
  return A;
}

SimonFixture simon_fixture(double eps, double z_max) {
  SimonFixture fx{std::make_shared<SimonField>(eps), {}, {}};
  // grad u = 0 iff x = y = 0 and sin(2 eps z) = 0.
  const double step = std::numbers::pi / (2.0 * eps);
  const int kmax = static_cast<int>(std::floor(z_max / step + 1e-12));
  for (int k = -kmax; k <= kmax; ++k) {
    const double z = k * step;
    fx.critical_z.push_back(z);
    if (k % 2 == 0) fx.singular_z.push_back(z);
  }
  return fx;
}

double simon_divergence_residual(const SimonField& u, const Vec& X, double h) {
  auto flux = [&](const Vec& Y) -> Vec { return u.coefficient(Y[2]) * u.value_grad(Y).grad; };
  double div = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec e = Vec::Zero(3);
    e[i] = h;
    const double d = -flux(X + 2.0 * e)[i] + 8.0 * flux(X + e)[i] - 8.0 * flux(X - e)[i] + flux(X - 2.0 * e)[i];
    div += d / (12.0 * h);
  }
  return div;
}

}  // namespace freqlab
