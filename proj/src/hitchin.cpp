#include "higgslab/hitchin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "higgslab/errors.hpp"

namespace higgslab::hitchin {

RadialMesh make_mesh(ChartKind kind, double r_min, double r_max, int n, int chart_id) {
  if (!(r_min > 0.0) || !(r_max > r_min) || !(r_max < 1.0))
    throw InvalidInput("mesh: requires 0 < r_min < r_max < 1");
  if (n < 16) throw InvalidInput("mesh: requires n >= 16");
  RadialMesh m;
  m.chart = Chart{kind};
  m.chart_id = chart_id;
  const double t0 = std::log(r_min), t1 = std::log(r_max);
  m.h = (t1 - t0) / (n - 1);
  m.t.resize(n);
  for (int i = 0; i < n; ++i) m.t[i] = t0 + m.h * i;
  m.t.back() = t1;
  return m;
}

DiscreteSystem::DiscreteSystem(HiggsCoefficients coeffs, RadialMesh mesh,
                               std::optional<Background> background)
    : coeffs_(std::move(coeffs)), mesh_(std::move(mesh)), bg_(std::move(background)) {
  if (!coeffs_.rotational) throw Unsupported("assemble_system: coefficients must be rotational");
  const int n = mesh_.n();
  if (bg_ && (static_cast<int>(bg_->x.size()) != n || static_cast<int>(bg_->xtt.size()) != n))
    throw InvalidInput("assemble_system: background does not match the mesh");
  b2_.resize(n);
  c2_.resize(n);
  rho_.resize(n);
  for (int i = 0; i < n; ++i) {
    b2_[i] = mesh_.chart.abs2(coeffs_.b, mesh_.t[i]);
    c2_[i] = mesh_.chart.abs2(coeffs_.c, mesh_.t[i]);
    rho_[i] = mesh_.chart.rho(mesh_.t[i]);
  }
}

NodeForcing DiscreteSystem::forcing(int i, double x, double y) const {
  const double r = rho_[i];
  const double exy = std::exp(y - x);
  const double cxy = c2_[i] == 0.0 ? 0.0 : c2_[i] * std::exp(x + y);
  const double by = b2_[i] == 0.0 ? 0.0 : b2_[i] * std::exp(-y);
  NodeForcing f;
  f.f1 = r * (cxy - exy);
  f.f2 = r * (exy + cxy - by);
  f.j11 = r * (cxy + exy);
  f.j12 = r * (cxy - exy);
  f.j21 = r * (cxy - exy);
  f.j22 = r * (exy + cxy + by);
  return f;
}

namespace {

template <bool Parallel>
std::vector<NodeForcing> all_forcing(const DiscreteSystem& s, const std::vector<double>& x,
                                     const std::vector<double>& y) {
  const int n = s.mesh().n();
  std::vector<NodeForcing> f(n);
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) f[i] = s.forcing(i, x[i], y[i]);
  } else {
    for (int i = 0; i < n; ++i) f[i] = s.forcing(i, x[i], y[i]);
  }
  return f;
}

template <bool Parallel>
std::vector<double> residual_impl(const DiscreteSystem& s, const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const int n = s.mesh().n();
  const double q = 1.0 / (4.0 * s.mesh().h * s.mesh().h);
  auto f = all_forcing<Parallel>(s, x, y);
  const auto& bg = s.background();
  std::vector<double> p = x, g = y;
  if (bg) {
    for (int i = 0; i < n; ++i) {
      p[i] -= bg->x[i];
      g[i] -= bg->y[i];
      f[i].f1 -= 0.25 * bg->xtt[i];
      f[i].f2 -= 0.25 * bg->ytt[i];
    }
  }
  std::vector<double> r(2 * n, 0.0);
  auto row = [&](int i) {
    r[2 * i] = q * (p[i + 1] - 2.0 * p[i] + p[i - 1]) -
               (f[i - 1].f1 + 10.0 * f[i].f1 + f[i + 1].f1) / 12.0;
    r[2 * i + 1] = q * (g[i + 1] - 2.0 * g[i] + g[i - 1]) -
                   (f[i - 1].f2 + 10.0 * f[i].f2 + f[i + 1].f2) / 12.0;
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 1; i < n - 1; ++i) row(i);
  } else {
    for (int i = 1; i < n - 1; ++i) row(i);
  }
  return r;
}

Eigen::Matrix2d jac_block(const NodeForcing& f) {
  Eigen::Matrix2d m;
  m << f.j11, f.j12, f.j21, f.j22;
  return m;
}

template <bool Parallel>
DiscreteSystem::Jacobian jacobian_impl(const DiscreteSystem& s, const std::vector<double>& x,
                                       const std::vector<double>& y) {
  const int n = s.mesh().n();
  const int m = n - 2;
  const double q = 1.0 / (4.0 * s.mesh().h * s.mesh().h);
  auto f = all_forcing<Parallel>(s, x, y);
  DiscreteSystem::Jacobian j;
  j.lower.resize(m);
  j.diag.resize(m);
  j.upper.resize(m);
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  auto row = [&](int k) {
    const int i = k + 1;
    j.lower[k] = q * I - jac_block(f[i - 1]) / 12.0;
    j.diag[k] = -2.0 * q * I - 10.0 * jac_block(f[i]) / 12.0;
    j.upper[k] = q * I - jac_block(f[i + 1]) / 12.0;
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < m; ++k) row(k);
  } else {
    for (int k = 0; k < m; ++k) row(k);
  }
  return j;
}

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s = std::max(s, std::abs(a));
  return s;
}

}  // namespace

std::vector<double> DiscreteSystem::residual(const std::vector<double>& x,
                                             const std::vector<double>& y) const {
  return residual_impl<true>(*this, x, y);
}
std::vector<double> DiscreteSystem::residual_serial(const std::vector<double>& x,
                                                    const std::vector<double>& y) const {
  return residual_impl<false>(*this, x, y);
}
DiscreteSystem::Jacobian DiscreteSystem::jacobian(const std::vector<double>& x,
                                                  const std::vector<double>& y) const {
  return jacobian_impl<true>(*this, x, y);
}
DiscreteSystem::Jacobian DiscreteSystem::jacobian_serial(const std::vector<double>& x,
                                                         const std::vector<double>& y) const {
  return jacobian_impl<false>(*this, x, y);
}

std::vector<double> DiscreteSystem::discrete_laplacian(const std::vector<double>& f) const {
  const int n = mesh_.n();
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  const double h2 = mesh_.h * mesh_.h;
  for (int i = 1; i < n - 1; ++i)
    out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (4.0 * rho_[i] * h2);
  return out;
}

DiscreteSystem assemble_system(const HiggsCoefficients& coeffs, const RadialMesh& mesh,
                               std::optional<Background> background) {
  return DiscreteSystem(coeffs, mesh, std::move(background));
}

std::vector<double> block_thomas(const DiscreteSystem::Jacobian& j, const std::vector<double>& rhs) {
  const int m = static_cast<int>(j.diag.size());
  std::vector<Eigen::Matrix2d> dprime(m);
  std::vector<Eigen::Vector2d> rprime(m);
  for (int k = 0; k < m; ++k) {
    Eigen::Vector2d r(rhs[2 * k], rhs[2 * k + 1]);
    if (k == 0) {
      dprime[k] = j.diag[k];
      rprime[k] = r;
    } else {
      Eigen::Matrix2d w = j.lower[k] * dprime[k - 1].inverse();
      dprime[k] = j.diag[k] - w * j.upper[k - 1];
      rprime[k] = r - w * rprime[k - 1];
    }
    if (!(std::abs(dprime[k].determinant()) > 0.0))
      throw NumericalError("block_thomas: singular pivot block");
  }
  std::vector<double> sol(2 * m);
  Eigen::Vector2d next = Eigen::Vector2d::Zero();
  for (int k = m - 1; k >= 0; --k) {
    Eigen::Vector2d rr = rprime[k];
    if (k < m - 1) rr -= j.upper[k] * next;
    next = dprime[k].inverse() * rr;
    sol[2 * k] = next(0);
    sol[2 * k + 1] = next(1);
  }
  return sol;
}

MetricSolution solve(const HiggsCoefficients& coeffs, const RadialMesh& mesh,
                     const DirichletData& bc, const SolverOptions& opt) {
  for (double v : {bc.x_min, bc.y_min, bc.x_max, bc.y_max})
    if (!std::isfinite(v)) throw InvalidInput("solve: boundary data must be positive and finite");
  DiscreteSystem sys(coeffs, mesh, opt.background);
  const int n = mesh.n();
  MetricSolution sol;
  sol.mesh = mesh;
  sol.coeffs = coeffs;
  sol.boundary_source = bc.source;
  sol.background = opt.background;
  if (opt.x0 && opt.y0) {
    if (static_cast<int>(opt.x0->size()) != n || static_cast<int>(opt.y0->size()) != n)
      throw InvalidInput("solve: initial guess has the wrong size");
    sol.x = *opt.x0;
    sol.y = *opt.y0;
  } else {
    sol.x.resize(n);
    sol.y.resize(n);
    const auto& bg = opt.background;
    auto bx = [&](int i) { return bg ? bg->x[i] : 0.0; };
    auto by = [&](int i) { return bg ? bg->y[i] : 0.0; };
    for (int i = 0; i < n; ++i) {
      double s = static_cast<double>(i) / (n - 1);
      sol.x[i] = bx(i) + (1 - s) * (bc.x_min - bx(0)) + s * (bc.x_max - bx(n - 1));
      sol.y[i] = by(i) + (1 - s) * (bc.y_min - by(0)) + s * (bc.y_max - by(n - 1));
    }
  }
  sol.x.front() = bc.x_min;
  sol.y.front() = bc.y_min;
  sol.x.back() = bc.x_max;
  sol.y.back() = bc.y_max;

  auto residual = [&](const std::vector<double>& x, const std::vector<double>& y) {
    return opt.parallel ? sys.residual(x, y) : sys.residual_serial(x, y);
  };
  auto apply = [&](const std::vector<double>& step, double a, std::vector<double>& x,
                   std::vector<double>& y) {
    for (int k = 0; k < n - 2; ++k) {
      x[k + 1] += a * step[2 * k];
      y[k + 1] += a * step[2 * k + 1];
    }
  };
  auto interior = [&](const std::vector<double>& r) {
    return std::vector<double>(r.begin() + 2, r.end() - 2);
  };

  std::vector<double> r = residual(sol.x, sol.y);
  double res = sup_abs(r);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (res < opt.tol) break;
    auto jac = opt.parallel ? sys.jacobian(sol.x, sol.y) : sys.jacobian_serial(sol.x, sol.y);
    std::vector<double> rhs = interior(r);
    for (double& v : rhs) v = -v;
    std::vector<double> step = block_thomas(jac, rhs);
    double step_norm = sup_abs(step);

    double a = 1.0;
    std::vector<double> xt, yt, rt;
    double rest = 0.0;
    bool accepted = false;
    while (a >= 1.0 / 64.0) {
      xt = sol.x;
      yt = sol.y;
      apply(step, a, xt, yt);
      rt = residual(xt, yt);
      rest = sup_abs(rt);
      if (std::isfinite(rest) && rest <= (1.0 - 1e-4 * a) * res) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      // Near the roundoff floor a stalled step means we are done.
      if (res < opt.accept_tol) break;
      // Picard relaxation: Laplacian-only linearization, damped.
      DiscreteSystem::Jacobian lap = jac;
      const double q = 1.0 / (4.0 * mesh.h * mesh.h);
      for (int k = 0; k < n - 2; ++k) {
        lap.lower[k] = q * Eigen::Matrix2d::Identity();
        lap.upper[k] = q * Eigen::Matrix2d::Identity();
        lap.diag[k] = -2.0 * q * Eigen::Matrix2d::Identity();
      }
      std::vector<double> pstep = block_thomas(lap, rhs);
      xt = sol.x;
      yt = sol.y;
      apply(pstep, 0.5, xt, yt);
      rt = residual(xt, yt);
      rest = sup_abs(rt);
      if (!std::isfinite(rest))
        throw ConvergenceError("solve: iteration produced non-finite values", res, it + 1);
      ++sol.picard_steps;
    }
    sol.x = std::move(xt);
    sol.y = std::move(yt);
    r = std::move(rt);
    res = rest;
    double xnorm = std::max(sup_abs(sol.x), sup_abs(sol.y));
    if (res < opt.accept_tol && a * step_norm <= 1e-13 * (1.0 + xnorm)) {
      ++it;
      break;
    }
  }
  sol.iterations = it;
  sol.residual_sup = res;
  if (!(res < opt.accept_tol))
    throw ConvergenceError("solve: Newton did not converge (residual " + std::to_string(res) + ")",
                           res, it);
  return sol;
}

std::pair<double, double> model_log_metric(double delta, double t) {
  const double l = std::log(std::abs(t));
  return {2.0 * delta * t + l, 2.0 * delta * t - l};
}

std::pair<double, double> boundary_from_model_metric(const bundle::CyclicHiggsData& data,
                                                     int puncture_id, double r) {
  const auto& p = data.puncture(puncture_id);
  if (p.zeta == 0.0) throw Unsupported("model boundary: zero-weight punctures are out of scope");
  if (!(r > 0.0 && r < 1.0)) throw InvalidInput("model boundary: requires 0 < r < 1");
  const double d = p.delta();
  const double lr = std::abs(std::log(r));
  const double base = std::pow(r, 2.0 * d);
  return {base * lr, base / lr};
}

DirichletData model_dirichlet(double delta, const RadialMesh& mesh) {
  auto a = model_log_metric(delta, mesh.t.front());
  auto b = model_log_metric(delta, mesh.t.back());
  return {a.first, a.second, b.first, b.second, "model metric"};
}

std::pair<double, double> fuchsian_log_metric(double beta_abs2, double t) {
  const double s = -std::expm1(2.0 * t);
  const double loglam = std::log(4.0) - 2.0 * std::log(s);
  const double la = std::log(FuchsianField::amplitude(beta_abs2));
  return {la - 2.0 * loglam, la - loglam};
}

Background fuchsian_background(double beta_abs2, const RadialMesh& mesh) {
  if (mesh.chart.kind != ChartKind::disk) throw InvalidInput("fuchsian background: disk chart only");
  Background bg;
  bg.name = "fuchsian";
  bg.field = std::make_shared<FuchsianField>(beta_abs2);
  for (double t : mesh.t) {
    auto [x, y] = fuchsian_log_metric(beta_abs2, t);
    // ln lambda has t-derivatives 4 e^{2t}/s and 8 e^{2t}/s^2 with s = 1 - e^{2t}.
    const double e = std::exp(2.0 * t), s = -std::expm1(2.0 * t);
    const double l1 = 4.0 * e / s, l2 = 8.0 * e / (s * s);
    bg.x.push_back(x);
    bg.y.push_back(y);
    bg.xt.push_back(-2.0 * l1);
    bg.yt.push_back(-l1);
    bg.xtt.push_back(-2.0 * l2);
    bg.ytt.push_back(-l2);
  }
  return bg;
}

DirichletData fuchsian_dirichlet(double beta_abs2, const RadialMesh& mesh) {
  auto a = fuchsian_log_metric(beta_abs2, mesh.t.front());
  auto b = fuchsian_log_metric(beta_abs2, mesh.t.back());
  return {a.first, a.second, b.first, b.second, "fuchsian"};
}

namespace {

double d2_at(const std::vector<double>& f, int i, double h) {
  const int n = static_cast<int>(f.size());
  const double s = 12.0 * h * h;
  if (i >= 2 && i <= n - 3)
    return (-f[i - 2] + 16 * f[i - 1] - 30 * f[i] + 16 * f[i + 1] - f[i + 2]) / s;
  if (i == 0) return (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4] - 10 * f[5]) / s;
  if (i == 1) return (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]) / s;
  if (i == n - 1)
    return (45 * f[n - 1] - 154 * f[n - 2] + 214 * f[n - 3] - 156 * f[n - 4] + 61 * f[n - 5] -
            10 * f[n - 6]) / s;
  return (10 * f[n - 1] - 15 * f[n - 2] - 4 * f[n - 3] + 14 * f[n - 4] - 6 * f[n - 5] +
          f[n - 6]) / s;
}

double d1_at(const std::vector<double>& f, int i, double h) {
  const int n = static_cast<int>(f.size());
  const double s = 12.0 * h;
  if (i >= 2 && i <= n - 3) return (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / s;
  if (i == 0) return (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / s;
  if (i == 1) return (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / s;
  if (i == n - 1) return -(-25 * f[n - 1] + 48 * f[n - 2] - 36 * f[n - 3] + 16 * f[n - 4] - 3 * f[n - 5]) / s;
  return -(-3 * f[n - 1] - 10 * f[n - 2] + 18 * f[n - 3] - 6 * f[n - 4] + f[n - 5]) / s;
}

}  // namespace

DerivedFields derived_fields(const MetricSolution& sol) {
  DiscreteSystem sys(sol.coeffs, sol.mesh);
  const auto& mesh = sol.mesh;
  const int n = mesh.n();
  DerivedFields d;
  d.t = mesh.t;
  d.gh_factor.resize(n);
  d.tau_norm.resize(n);
  d.gamma_norm.resize(n);
  d.u.resize(n);
  d.curvature.resize(n);
  d.curvature_identity.resize(n);
  d.hyp_factor.resize(n);
  d.xtt.resize(n);
  d.ytt.resize(n);
  d.res1.resize(n);
  d.res2.resize(n);
  const auto& bg = sol.background;
  std::vector<double> px = sol.x, py = sol.y;
  if (bg)
    for (int i = 0; i < n; ++i) {
      px[i] -= bg->x[i];
      py[i] -= bg->y[i];
    }
  for (int i = 0; i < n; ++i) {
    const double x = sol.x[i], y = sol.y[i];
    const double exy = std::exp(y - x);
    const double lam = mesh.chart.hyp_factor(mesh.t[i]);
    d.hyp_factor[i] = lam;
    d.gh_factor[i] = 2.0 * exy;
    const double tau2 = exy / lam;
    d.tau_norm[i] = std::sqrt(tau2);
    d.u[i] = sys.c_abs2(i) * std::exp(2.0 * x);
    d.gamma_norm[i] = std::sqrt(d.u[i] * tau2);
    d.xtt[i] = d2_at(px, i, mesh.h) + (bg ? bg->xtt[i] : 0.0);
    d.ytt[i] = d2_at(py, i, mesh.h) + (bg ? bg->ytt[i] : 0.0);
    const double rho = sys.rho(i);
    d.curvature[i] = -(d.ytt[i] - d.xtt[i]) / (4.0 * rho) / exy;
    d.curvature_identity[i] = -2.0 + sys.b_abs2(i) * std::exp(-y) / exy;
    auto f = sys.forcing(i, x, y);
    d.res1[i] = 0.25 * d.xtt[i] - f.f1;
    d.res2[i] = 0.25 * d.ytt[i] - f.f2;
  }
  return d;
}

std::pair<int, int> interior_region(const RadialMesh& mesh, double fraction) {
  const int n = mesh.n();
  const double margin = 0.5 * (1.0 - fraction);
  int i0 = static_cast<int>(std::lround(margin * (n - 1)));
  int i1 = static_cast<int>(std::lround((1.0 - margin) * (n - 1)));
  return {std::max(i0, 2), std::min(i1, n - 3)};
}

double continuous_residual(const DerivedFields& f, std::pair<int, int> region) {
  double s = 0.0;
  for (int i = region.first; i <= region.second; ++i)
    s = std::max({s, std::abs(f.res1[i]), std::abs(f.res2[i])});
  return s;
}

double gap_verify(const DerivedFields& f, std::pair<int, int> region) {
  double g = std::numeric_limits<double>::infinity();
  for (int i = region.first; i <= region.second; ++i)
    g = std::min(g, f.tau_norm[i] - f.gamma_norm[i]);
  return g;
}

double sup_u(const DerivedFields& f, std::pair<int, int> region) {
  double s = 0.0;
  for (int i = region.first; i <= region.second; ++i) s = std::max(s, f.u[i]);
  return s;
}

UIdentityReport u_identity_residual(const DerivedFields& f, const MetricSolution& sol,
                                    std::pair<int, int> region) {
  UIdentityReport rep;
  if (sol.coeffs.c.is_zero()) return rep;
  rep.applicable = true;
  const auto& mesh = sol.mesh;
  for (int i = region.first; i <= region.second; ++i) {
    if (!(f.u[i] > 0.0)) {
      ++rep.excluded;
      continue;
    }
    // ln u = 2x + ln|c|^2; the second term is linear in t in both charts.
    const double rho = mesh.chart.rho(mesh.t[i]);
    const double lap = 2.0 * f.xtt[i] / (4.0 * rho);
    const double lhs = lap / f.gh_factor[i];
    rep.sup = std::max(rep.sup, std::abs(lhs - (f.u[i] - 1.0)));
    if (f.u[i] < 1.0 && !(lhs < 0.0)) ++rep.sign_mismatches;
  }
  return rep;
}

CurvatureReport curvature_check(const DerivedFields& f, const MetricSolution& sol,
                                std::pair<int, int> region) {
  CurvatureReport rep;
  rep.min_k = std::numeric_limits<double>::infinity();
  rep.min_k_identity = std::numeric_limits<double>::infinity();
  for (int i = region.first; i <= region.second; ++i) {
    if (f.curvature[i] < rep.min_k) {
      rep.min_k = f.curvature[i];
      rep.argmin_t = f.t[i];
    }
    rep.min_k_identity = std::min(rep.min_k_identity, f.curvature_identity[i]);
    rep.agreement = std::max(rep.agreement, std::abs(f.curvature[i] - f.curvature_identity[i]));
  }
  const double h = sol.mesh.h;
  rep.lower_bound = -2.0 - 5.0 * h * h;
  rep.ok = rep.min_k >= rep.lower_bound;
  return rep;
}

QuasiIsometryReport quasi_isometry_check(const DerivedFields& f) {
  QuasiIsometryReport rep;
  rep.inf_ratio = std::numeric_limits<double>::infinity();
  for (double tn : f.tau_norm) {
    const double ratio = tn * tn;
    rep.sup_ratio = std::max(rep.sup_ratio, ratio);
    rep.inf_ratio = std::min(rep.inf_ratio, ratio);
  }
  rep.constant = std::max(rep.sup_ratio, 1.0 / rep.inf_ratio);
  rep.ratio_at_rmin = f.tau_norm.front() * f.tau_norm.front();
  return rep;
}

std::unique_ptr<MetricField> make_field(const MetricSolution& sol) {
  DiscreteSystem sys(sol.coeffs, sol.mesh);
  const int n = sol.mesh.n();
  const double h = sol.mesh.h;
  const auto& bg = sol.background;
  std::vector<double> px = sol.x, py = sol.y;
  if (bg)
    for (int i = 0; i < n; ++i) {
      px[i] -= bg->x[i];
      py[i] -= bg->y[i];
    }
  std::vector<double> xt(n), yt(n), xtt(n), ytt(n);
  for (int i = 0; i < n; ++i) {
    xt[i] = d1_at(px, i, h);
    yt[i] = d1_at(py, i, h);
    auto f = sys.forcing(i, sol.x[i], sol.y[i]);
    xtt[i] = 4.0 * f.f1 - (bg ? bg->xtt[i] : 0.0);
    ytt[i] = 4.0 * f.f2 - (bg ? bg->ytt[i] : 0.0);
  }
  auto corr = std::make_unique<HermiteField>(sol.mesh.chart, sol.mesh.t, px, xt, xtt, py, yt, ytt);
  if (!bg) return corr;
  return std::make_unique<SumField>(bg->field, std::move(corr));
}

}  // namespace higgslab::hitchin
