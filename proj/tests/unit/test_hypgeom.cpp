#include <doctest.h>

#include <cmath>
#include <random>

#include "higgslab/errors.hpp"
#include "higgslab/field.hpp"
#include "higgslab/hypgeom.hpp"

using namespace higgslab;
using namespace higgslab::hypgeom;

namespace {
// Length of the radial segment [0, r] by composite Simpson on sqrt(lambda) = 2 / (1 - s^2).
double radial_length_oracle(double r) {
  const int n = 20000;
  const double h = r / n;
  auto f = [](double s) { return 2.0 / (1.0 - s * s); };
  double acc = f(0.0) + f(r);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}
cplx random_disk_point(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
}
}  // namespace

TEST_CASE("radial distance matches quadrature") {
  for (double r : {0.1, 0.5, 0.9}) {
    CHECK(hyp_distance(0.0, r) == doctest::Approx(radial_length_oracle(r)).epsilon(1e-10));
    CHECK(hyp_distance(0.0, r) == doctest::Approx(std::log((1 + r) / (1 - r))).epsilon(1e-14));
  }
  CHECK(hyp_distance(0.3, 0.3) == 0.0);
}

TEST_CASE("distance is a metric invariant under rotations") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    const cplx a = random_disk_point(rng, 0.95), b = random_disk_point(rng, 0.95),
               c = random_disk_point(rng, 0.95);
    const double ab = hyp_distance(a, b);
    CHECK(ab == doctest::Approx(hyp_distance(b, a)).epsilon(1e-12));
    CHECK(ab <= hyp_distance(a, c) + hyp_distance(c, b) + 1e-12);
    const cplx rot = std::polar(1.0, 0.37 * k);
    CHECK(hyp_distance(rot * a, rot * b) == doctest::Approx(ab).epsilon(1e-10));
  }
}

TEST_CASE("conformal factors") {
  CHECK(disk_conformal_factor(0.0) == 4.0);
  CHECK(cusp_conformal_factor(std::exp(-1.0)) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  const double q = std::exp(2.0) / 2.0;
  CHECK(cusp_conformal_factor(std::exp(-2.0)) == doctest::Approx(q * q).epsilon(1e-14));
  CHECK_THROWS_AS(cusp_conformal_factor(0.0), InvalidInput);
  CHECK_THROWS_AS(disk_conformal_factor(1.0), InvalidInput);
}

TEST_CASE("cusp metric is the pullback of the half-plane metric") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.2, 3.0);
  for (int k = 0; k < 100; ++k) {
    const cplx w(ux(rng), uy(rng));
    const cplx z = cusp_cover(w);
    const double dz_dw = 2.0 * M_PI * std::abs(z);
    const double pulled = cusp_conformal_factor(z) * dz_dw * dz_dw;
    CHECK(pulled == doctest::Approx(1.0 / (w.imag() * w.imag())).epsilon(1e-12));
  }
}

TEST_CASE("fuchsian norm") {
  CHECK(fuchsian_norm(0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(fuchsian_norm(3.0) == doctest::Approx(std::sqrt(2.0 * std::cosh(3.0))));
  CHECK_THROWS_AS(fuchsian_norm(-1.0), InvalidInput);
}

TEST_CASE("radial geodesic samples are equally spaced") {
  const auto pts = radial_geodesic(0.1, 0.99, 51);
  REQUIRE(pts.size() == 51);
  CHECK(pts.front() == cplx(0.1));
  CHECK(pts.back() == cplx(0.99));
  const double step = hyp_distance(pts[0], pts[1]);
  for (std::size_t i = 1; i + 1 < pts.size(); ++i)
    CHECK(hyp_distance(pts[i], pts[i + 1]) == doctest::Approx(step).epsilon(1e-9));
  CHECK_THROWS_AS(radial_geodesic(0.5, 0.2, 10), InvalidInput);
}

TEST_CASE("geodesic points are at the requested distance") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const cplx p = random_disk_point(rng, 0.8);
    const double s = 0.1 * (k + 1);
    CHECK(hyp_distance(p, disk_geodesic_point(p, 0.3 * k, s)) == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("charts: distances agree with the disk model") {
  Chart disk{ChartKind::disk};
  CHECK(disk.distance(0.2, cplx(0.1, 0.4)) == doctest::Approx(hyp_distance(0.2, cplx(0.1, 0.4))));
  Chart cusp{ChartKind::cusp};
  const double t = -3.0;
  const cplx a(t, 0.0);
  const cplx b = cusp.geodesic_point(a, 0.0, 0.5);
  CHECK(cusp.distance(a, b) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(cusp.hyp_factor(t) == doctest::Approx(1.0 / (t * t)));
}
