#pragma once
// Poincare disk (4|dz|^2/(1-|z|^2)^2) and the cusp model |dz|^2/(|z| ln|z|)^2.
#include <vector>

#include "higgslab/types.hpp"

namespace higgslab::hypgeom {

double hyp_distance(cplx a, cplx b);
double disk_conformal_factor(cplx z);
double cusp_conformal_factor(cplx z);
double fuchsian_norm(double d);

std::vector<cplx> radial_geodesic(double r_from, double r_to, int n);

// Unit-speed geodesic from p in direction angle phi, evaluated at distance s.
cplx disk_geodesic_point(cplx p, double phi, double s);

// Half-plane model helpers for the cusp: w = exp(2 pi i w') covering.
cplx cusp_cover(cplx w);

}  // namespace higgslab::hypgeom
