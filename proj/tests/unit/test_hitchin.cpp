#include <doctest.h>

#include <cmath>
#include <random>

#include "higgslab/errors.hpp"
#include "higgslab/hitchin.hpp"

using namespace higgslab;
using namespace higgslab::hitchin;

namespace {
HiggsCoefficients coeffs(cplx b, int bp, cplx c, int cp) {
  HiggsCoefficients k;
  k.b = {b, bp};
  k.c = {c, cp};
  return k;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

// Shooting oracle for b = c = 0 in the disk chart: d = y - x solves d'' = 8 e^{2t} e^d and
// x + y is linear in t. RK4 on a fine grid, bisection on the initial slope.
struct ShootingOracle {
  double t0, t1, d0, d1;
  int steps = 40000;
  std::vector<double> run(double slope, std::vector<double>* at_t = nullptr,
                          const std::vector<double>* ts = nullptr) const {
    const double h = (t1 - t0) / steps;
    double t = t0, d = d0, p = slope;
    auto acc = [](double tt, double dd) { return 8.0 * std::exp(2.0 * tt + dd); };
    std::vector<double> out;
    std::size_t next = 0;
    for (int k = 0; k <= steps; ++k) {
      if (ts && at_t) {
        while (next < ts->size() && std::abs((*ts)[next] - t) < 0.5 * h) {
          at_t->push_back(d);
          ++next;
        }
      }
      if (k == steps) break;
      const double k1d = p, k1p = acc(t, d);
      const double k2d = p + 0.5 * h * k1p, k2p = acc(t + 0.5 * h, d + 0.5 * h * k1d);
      const double k3d = p + 0.5 * h * k2p, k3p = acc(t + 0.5 * h, d + 0.5 * h * k2d);
      const double k4d = p + h * k3p, k4p = acc(t + h, d + h * k3d);
      d += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
      p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      t = t0 + (k + 1) * h;
    }
    out.push_back(d);
    return out;
  }
  double slope() const {
    double lo = -50.0, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double end = run(mid).back();
      if (!std::isfinite(end) || end > d1) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  }
};
}  // namespace

TEST_CASE("mesh construction") {
  const auto m = make_mesh(ChartKind::disk, 0.05, 0.9, 64);
  CHECK(m.n() == 64);
  CHECK(m.r(0) == doctest::Approx(0.05));
  CHECK(m.r(63) == doctest::Approx(0.9));
  CHECK(m.t[1] - m.t[0] == doctest::Approx(m.h));
  CHECK_THROWS_AS(make_mesh(ChartKind::disk, 0.05, 0.9, 8), InvalidInput);
  CHECK_THROWS_AS(make_mesh(ChartKind::disk, 0.5, 0.1, 64), InvalidInput);
  CHECK_THROWS_AS(make_mesh(ChartKind::cusp, 0.1, 1.0, 64), InvalidInput);
}

TEST_CASE("discrete laplacian of |z|^2 in the disk chart") {
  const auto mesh = make_mesh(ChartKind::disk, 0.1, 0.9, 200);
  const auto sys = assemble_system(coeffs(1.0, 0, 0.0, 0), mesh);
  std::vector<double> f(mesh.n());
  for (int i = 0; i < mesh.n(); ++i) f[i] = std::exp(2.0 * mesh.t[i]);
  const auto lap = sys.discrete_laplacian(f);
  for (int i = 1; i + 1 < mesh.n(); ++i) CHECK(lap[i] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("gamma = 0 decouples the |c|^2 terms") {
  const auto mesh = make_mesh(ChartKind::disk, 0.1, 0.9, 32);
  const auto sys = assemble_system(coeffs(2.0, 0, 0.0, 0), mesh);
  const auto f = sys.forcing(5, -0.3, 0.4);
  const double rho = sys.rho(5);
  CHECK(f.f1 == doctest::Approx(-rho * std::exp(0.7)));
  CHECK(f.f2 == doctest::Approx(rho * (std::exp(0.7) - 4.0 * std::exp(-0.4))));
}

TEST_CASE("cusp chart with constant coefficients is translation covariant") {
  const auto k = coeffs(0.7, 0, 0.4, 0);
  const auto m1 = make_mesh(ChartKind::cusp, std::exp(-30.0), std::exp(-10.0), 64);
  const auto m2 = make_mesh(ChartKind::cusp, std::exp(-25.0), std::exp(-5.0), 64);
  std::vector<double> x(64), y(64);
  for (int i = 0; i < 64; ++i) {
    x[i] = std::sin(0.1 * i);
    y[i] = -0.5 + 0.01 * i;
  }
  const auto r1 = assemble_system(k, m1).residual(x, y);
  const auto r2 = assemble_system(k, m2).residual(x, y);
  CHECK(sup_diff(r1, r2) < 1e-12);
}

TEST_CASE("parallel kernels match their serial references") {
  const auto mesh = make_mesh(ChartKind::disk, 0.05, 0.95, 300);
  const auto sys = assemble_system(coeffs(1.0, 0, 3.0, 0), mesh);
  std::vector<double> x(mesh.n()), y(mesh.n());
  for (int i = 0; i < mesh.n(); ++i) {
    x[i] = -1.0 + 0.3 * std::cos(0.05 * i);
    y[i] = -0.2 + 0.1 * std::sin(0.03 * i);
  }
  CHECK(sys.residual(x, y) == sys.residual_serial(x, y));
  const auto j1 = sys.jacobian(x, y), j2 = sys.jacobian_serial(x, y);
  REQUIRE(j1.diag.size() == j2.diag.size());
  for (std::size_t i = 0; i < j1.diag.size(); ++i) {
    CHECK(j1.diag[i] == j2.diag[i]);
    CHECK(j1.lower[i] == j2.lower[i]);
    CHECK(j1.upper[i] == j2.upper[i]);
  }
}

TEST_CASE("jacobian agrees with finite differences of the residual") {
  const auto mesh = make_mesh(ChartKind::disk, 0.05, 0.9, 40);
  const auto sys = assemble_system(coeffs(1.5, 0, 2.0, 0), mesh);
  const int n = mesh.n();
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -0.5 + 0.2 * std::sin(0.2 * i);
    y[i] = -0.1 * i / n;
  }
  const auto jac = sys.jacobian(x, y);
  const double eps = 1e-6;
  // Interior node k owns block k - 1; perturb node j in {k-1, k, k+1}.
  for (int k = 3; k < n - 3; k += 7) {
    for (int dj = -1; dj <= 1; ++dj) {
      const int j = k + dj;
      for (int comp = 0; comp < 2; ++comp) {
        auto xp = x, yp = y, xm = x, ym = y;
        (comp == 0 ? xp : yp)[j] += eps;
        (comp == 0 ? xm : ym)[j] -= eps;
        const auto rp = sys.residual(xp, yp), rm = sys.residual(xm, ym);
        const Eigen::Matrix2d& blk =
            dj < 0 ? jac.lower[k - 1] : dj > 0 ? jac.upper[k - 1] : jac.diag[k - 1];
        for (int row = 0; row < 2; ++row) {
          const double fd = (rp[2 * k + row] - rm[2 * k + row]) / (2 * eps);
          CHECK(std::abs(fd - blk(row, comp)) < 1e-6 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("block thomas solves a block-tridiagonal system") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 20;
  DiscreteSystem::Jacobian j;
  j.lower.resize(n);
  j.diag.resize(n);
  j.upper.resize(n);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  auto rnd = [&] {
    Eigen::Matrix2d m;
    m << g(rng), g(rng), g(rng), g(rng);
    return m;
  };
  for (int i = 0; i < n; ++i) {
    j.lower[i] = i > 0 ? rnd() : Eigen::Matrix2d::Zero().eval();
    j.upper[i] = i + 1 < n ? rnd() : Eigen::Matrix2d::Zero().eval();
    j.diag[i] = rnd() + 10.0 * Eigen::Matrix2d::Identity();
    dense.block(2 * i, 2 * i, 2, 2) = j.diag[i];
    if (i > 0) dense.block(2 * i, 2 * i - 2, 2, 2) = j.lower[i];
    if (i + 1 < n) dense.block(2 * i, 2 * i + 2, 2, 2) = j.upper[i];
  }
  std::vector<double> rhs(2 * n);
  for (auto& v : rhs) v = g(rng);
  const auto sol = block_thomas(j, rhs);
  const Eigen::VectorXd ref = dense.lu().solve(Eigen::Map<Eigen::VectorXd>(rhs.data(), 2 * n));
  for (int i = 0; i < 2 * n; ++i) CHECK(std::abs(sol[i] - ref(i)) < 1e-12);
}

TEST_CASE("fuchsian data reproduce the exact solution") {
  const double b2 = 1.0;
  const auto mesh = make_mesh(ChartKind::disk, 0.05, 0.9, 512);
  const auto bc = fuchsian_dirichlet(b2, mesh);
  const auto sol = solve(coeffs(1.0, 0, 0.0, 0), mesh, bc);
  double err = 0.0;
  for (int i = 0; i < mesh.n(); ++i) {
    const auto ex = fuchsian_log_metric(b2, mesh.t[i]);
    err = std::max({err, std::abs(sol.x[i] - ex.first), std::abs(sol.y[i] - ex.second)});
  }
  CHECK(err < 1e-6);
  CHECK(sol.residual_sup < 1e-8);
  CHECK(sol.x.front() == bc.x_min);
  CHECK(sol.y.back() == bc.y_max);
  const auto d = derived_fields(sol);
  for (double u : d.u) CHECK(u == 0.0);
  // Constant curvature -2 of the fuchsian metric.
  const auto reg = interior_region(mesh);
  const auto k = curvature_check(d, sol, reg);
  CHECK(k.agreement < 1e-5);
  CHECK(k.ok);
}

TEST_CASE("b = c = 0 solution matches a shooting oracle") {
  const auto mesh = make_mesh(ChartKind::disk, 0.05, 0.9, 256);
  DirichletData bc{0.0, -1.0, 0.0, -1.0, "test"};
  const auto sol = solve(coeffs(0.0, 0, 0.0, 0), mesh, bc);
  ShootingOracle o{mesh.t.front(), mesh.t.back(), -1.0, -1.0, (mesh.n() - 1) * 160};
  const double p = o.slope();
  std::vector<double> dvals;
  o.run(p, &dvals, &mesh.t);
  REQUIRE(dvals.size() == mesh.t.size());
  double err = 0.0;
  for (int i = 0; i < mesh.n(); ++i) {
    // x + y = -1 everywhere since both ends carry -1.
    const double xo = 0.5 * (-1.0 - dvals[i]);
    err = std::max(err, std::abs(sol.x[i] - xo));
    err = std::max(err, std::abs(sol.x[i] + sol.y[i] + 1.0));
  }
  CHECK(err < 1e-6);
}

TEST_CASE("model metric boundary data") {
  bundle::CyclicHiggsData d;
  d.genus = 0;
  d.punctures = {{0, 0.3, bundle::FlagVariant::positive},
                 {1, 0.3, bundle::FlagVariant::positive},
                 {2, 0.3, bundle::FlagVariant::positive}};
  const auto h = boundary_from_model_metric(d, 0, std::exp(-1.0));
  CHECK(h.first == doctest::Approx(std::exp(-0.6)));
  CHECK(h.second == doctest::Approx(std::exp(-0.6)));
  const auto lg = model_log_metric(0.3, -2.0);
  CHECK(lg.first == doctest::Approx(-1.2 + std::log(2.0)));
  CHECK(lg.second == doctest::Approx(-1.2 - std::log(2.0)));
}

TEST_CASE("cusp solution: quasi-isometry ratio tends to one and is refinement stable") {
  const auto k = coeffs(1.0, 1, 0.8, 0);
  const double delta = 0.25;
  double consts[2];
  int idx = 0;
  for (int n : {256, 512}) {
    const auto mesh = make_mesh(ChartKind::cusp, std::exp(-40.0), std::exp(-1.0), n, 0);
    const auto sol = solve(k, mesh, model_dirichlet(delta, mesh));
    CHECK(sol.iterations <= 25);
    const auto d = derived_fields(sol);
    const auto q = quasi_isometry_check(d);
    CHECK(q.ratio_at_rmin == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(q.inf_ratio > 0.0);
    CHECK(std::isfinite(q.sup_ratio));
    const auto reg = interior_region(mesh);
    CHECK(gap_verify(d, reg) > 0.0);
    CHECK(sup_u(d, reg) < 1.0);
    consts[idx++] = q.constant;
  }
  CHECK(std::abs(consts[0] - consts[1]) < 0.05 * consts[1]);
}

TEST_CASE("b = 0 gives curvature identically -2") {
  const auto k = coeffs(0.0, 0, 0.8, 0);
  std::vector<double> agreement;
  for (int n : {128, 256}) {
    const auto mesh = make_mesh(ChartKind::cusp, std::exp(-40.0), std::exp(-1.0), n, 0);
    const auto sol = solve(k, mesh, model_dirichlet(0.25, mesh));
    const auto d = derived_fields(sol);
    for (double ki : d.curvature_identity) CHECK(ki == -2.0);
    const auto rep = curvature_check(d, sol, interior_region(mesh));
    agreement.push_back(rep.agreement);
    CHECK(rep.agreement < 1e-3);
  }
}

TEST_CASE("discretization error decreases at fourth order on the fuchsian solution") {
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const auto mesh = make_mesh(ChartKind::disk, 0.05, 0.9, n);
    const auto sol = solve(coeffs(1.0, 0, 0.0, 0), mesh, fuchsian_dirichlet(1.0, mesh));
    double e = 0.0;
    for (int i = 0; i < n; ++i)
      e = std::max(e, std::abs(sol.x[i] - fuchsian_log_metric(1.0, mesh.t[i]).first));
    errs.push_back(e);
  }
  for (std::size_t i = 1; i < errs.size(); ++i)
    CHECK(std::log2(errs[i - 1] / errs[i]) > 3.5);
}

TEST_CASE("background subtraction and the direct solve converge together") {
  // Both schemes are fourth order, so their difference shrinks like h^4.
  const auto k = coeffs(1.0, 0, 2.0, 0);
  std::vector<double> diffs;
  for (int n : {128, 256}) {
    const auto mesh = make_mesh(ChartKind::disk, 0.05, 0.9, n);
    const auto bc = fuchsian_dirichlet(1.0, mesh);
    const auto direct = solve(k, mesh, bc);
    SolverOptions opt;
    opt.background = fuchsian_background(1.0, mesh);
    const auto sub = solve(k, mesh, bc, opt);
    diffs.push_back(std::max(sup_diff(direct.x, sub.x), sup_diff(direct.y, sub.y)));
    const auto field = make_field(sub);
    CHECK(std::abs(field->eval(mesh.r(n / 3)).x - sub.x[n / 3]) < 1e-10);
  }
  CHECK(diffs[1] < 1e-5);
  CHECK(std::log2(diffs[0] / diffs[1]) > 3.0);
}

TEST_CASE("newton failure reports the last residual") {
  const auto mesh = make_mesh(ChartKind::cusp, std::exp(-40.0), std::exp(-1.0), 128, 0);
  SolverOptions opt;
  opt.max_iter = 1;
  try {
    solve(coeffs(1.0, 1, 0.8, 0), mesh, model_dirichlet(0.25, mesh), opt);
    FAIL("expected a convergence failure");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_residual > 0.0);
    CHECK(e.iterations >= 1);
  }
  HiggsCoefficients nonrot = coeffs(1.0, 0, 0.0, 0);
  nonrot.rotational = false;
  CHECK_THROWS_AS(assemble_system(nonrot, mesh), Unsupported);
}
