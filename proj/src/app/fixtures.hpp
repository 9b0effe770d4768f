#pragma once

#include "app/config.hpp"
#include "freqlab/field.hpp"
#include "freqlab/geometry.hpp"
#include "freqlab/mfs.hpp"
#include "freqlab/quadrature.hpp"

#include <string>
#include <vector>

namespace freqlab::app {

GraphDomain make_domain(const Config& cfg);
MfsOptions make_mfs_options(const Config& cfg);
QuadratureSpec make_quadrature(const Config& cfg);
// poly: the flat domain only; mfs: any domain, data P(x, x_d - phi(x)); simon: d = 3, domain ignored.
FieldPtr make_field(const Config& cfg, const GraphDomain& domain);

struct Fixture {
  std::string name;
  GraphDomain domain;
  FieldPtr u;
};

// MFS field on `domain` with arc data adapted from the polynomial P.
Fixture mfs_fixture(const std::string& name, const GraphDomain& domain, FieldPtr P);

// Curved d = 2 MFS fixtures on the unit scale (not admissible at R = 1; used where admissibility is not required).
Fixture bump_fixture();    // phi = 0.05 x^2, data from Im z^3
Fixture cosine_fixture();  // phi = 0.05 (1 - cos 1.5x), data from Im z^2

}  // namespace freqlab::app
