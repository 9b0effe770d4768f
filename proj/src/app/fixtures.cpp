#include "app/fixtures.hpp"

#include <complex>

namespace freqlab::app {

namespace {
constexpr const char* kModule = "cli";
}

GraphDomain make_domain(const Config& cfg) {
  const std::string family = cfg.str("domain.family");
  const int d = cfg.integer("domain.dimension");
  const double a = cfg.number("domain.amplitude");
  const double R = cfg.number("domain.R");
  if (d != 2 && d != 3) fail(ErrorKind::Config, kModule, "make_domain", "domain.dimension must be 2 or 3");
  if (!(R > 0.0)) fail(ErrorKind::Config, kModule, "make_domain", "domain.R must be positive");
  if (family == "flat") return GraphDomain::flat(d, R);
  if (family == "bump") return GraphDomain::quadratic_bump(d, a, R);
  if (family == "power") return GraphDomain::power_alpha(d, a, cfg.number("domain.alpha"), R);
  if (family == "cosine") return GraphDomain::cosine_window(d, a, cfg.number("domain.omega"), R);
  fail(ErrorKind::Config, kModule, "make_domain", "unknown domain.family '" + family + "'");
}

MfsOptions make_mfs_options(const Config& cfg) {
  MfsOptions o;
  o.charges = cfg.integer("mfs.charges");
  o.offset = cfg.number("mfs.offset");
  o.boundary_tol = cfg.number("mfs.boundary_tol");
  return o;
}

QuadratureSpec make_quadrature(const Config& cfg) {
  QuadratureSpec q;
  q.radial = cfg.integer("quad.radial");
  q.angular = cfg.integer("quad.angular");
  q.tol = cfg.number("quad.tol");
  if (q.radial < 2 || q.angular < 2 || !(q.tol > 0.0))
    fail(ErrorKind::Config, kModule, "make_quadrature", "quad.radial, quad.angular >= 2 and quad.tol > 0 required");
  return q;
}

namespace {

FieldPtr polynomial(const Config& cfg, int d) {
  if (cfg.has("field.coefs")) {
    if (d != 2) fail(ErrorKind::Config, kModule, "make_field", "field.coefs requires domain.dimension = 2");
    std::vector<std::complex<double>> a;
    for (double c : cfg.list("field.coefs")) a.emplace_back(c, 0.0);
    return im_complex_polynomial(a);
  }
  const int k = cfg.integer("field.degree");
  if (k < 1) fail(ErrorKind::Config, kModule, "make_field", "field.degree must be >= 1");
  return exact_polynomial(d, k);
}

}  // namespace

FieldPtr make_field(const Config& cfg, const GraphDomain& domain) {
  const std::string kind = cfg.str("field.kind");
  if (kind == "simon") return simon_fixture(cfg.number("field.epsilon")).field;
  if (kind == "poly") {
    if (!domain.is_flat())
      fail(ErrorKind::Config, kModule, "make_field",
           "field.kind = poly vanishes on the graph only for domain.family = flat; use field.kind = mfs");
    return polynomial(cfg, domain.dim());
  }
  if (kind == "mfs") return solve_mfs(domain, graph_adapted_data(domain, polynomial(cfg, domain.dim())), make_mfs_options(cfg));
  fail(ErrorKind::Config, kModule, "make_field", "unknown field.kind '" + kind + "'");
}

Fixture mfs_fixture(const std::string& name, const GraphDomain& domain, FieldPtr P) {
  return {name, domain, solve_mfs(domain, graph_adapted_data(domain, std::move(P)))};
}

Fixture bump_fixture() { return mfs_fixture("bump", GraphDomain::quadratic_bump(2, 0.05), exact_polynomial(2, 3)); }

Fixture cosine_fixture() {
  return mfs_fixture("cosine", GraphDomain::cosine_window(2, 0.05, 1.5), exact_polynomial(2, 2));
}

}  // namespace freqlab::app
