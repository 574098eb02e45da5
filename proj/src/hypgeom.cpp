#include "higgslab/hypgeom.hpp"

#include <cmath>

#include "higgslab/errors.hpp"

namespace higgslab::hypgeom {

namespace {
void require_in_disk(cplx z, const char* who) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) >= 1.0)
    throw InvalidInput(std::string(who) + ": point not in the open unit disk");
}
}  // namespace

double hyp_distance(cplx a, cplx b) {
  require_in_disk(a, "hyp_distance");
  require_in_disk(b, "hyp_distance");
  double q = std::abs(a - b) / std::abs(1.0 - std::conj(a) * b);
  return 2.0 * std::atanh(std::min(q, 1.0 - 1e-16));
}

double disk_conformal_factor(cplx z) {
  require_in_disk(z, "disk_conformal_factor");
  double s = 1.0 - std::norm(z);
  return 4.0 / (s * s);
}

double cusp_conformal_factor(cplx z) {
  double r = std::abs(z);
  if (!(r > 0.0) || !(r < 1.0))
    throw InvalidInput("cusp_conformal_factor: requires 0 < |z| < 1");
  double d = r * std::log(r);
  return 1.0 / (d * d);
}

double fuchsian_norm(double d) {
  if (!(d >= 0.0)) throw InvalidInput("fuchsian_norm: distance must be non-negative");
  return std::sqrt(2.0 * std::cosh(d));
}

std::vector<cplx> radial_geodesic(double r_from, double r_to, int n) {
  if (!(r_from >= 0.0) || !(r_to > r_from) || !(r_to < 1.0) || n < 2)
    throw InvalidInput("radial_geodesic: need 0 <= r_from < r_to < 1 and n >= 2");
  const double s0 = 2.0 * std::atanh(r_from);
  const double s1 = 2.0 * std::atanh(r_to);
  std::vector<cplx> pts(n);
  for (int i = 0; i < n; ++i) {
    double s = s0 + (s1 - s0) * i / (n - 1);
    pts[i] = std::tanh(0.5 * s);
  }
  pts.front() = r_from;
  pts.back() = r_to;
  return pts;
}

cplx disk_geodesic_point(cplx p, double phi, double s) {
  cplx w = std::tanh(0.5 * s) * std::polar(1.0, phi);
  return (w + p) / (1.0 + std::conj(p) * w);
}

cplx cusp_cover(cplx w) { return std::exp(cplx(0.0, 2.0 * M_PI) * w); }

}  // namespace higgslab::hypgeom
