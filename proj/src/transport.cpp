#include "higgslab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "higgslab/errors.hpp"

namespace higgslab::transport {

namespace {

using Vec5d = Eigen::Matrix<double, 5, 1>;

Vec5d log_h(const FieldSample& s) {
  Vec5d l;
  l << s.x, s.y, 0.0, -s.y, -s.x;
  return l;
}

Eigen::Matrix<cplx, 5, 1> dlog_h(const FieldSample& s) {
  Eigen::Matrix<cplx, 5, 1> d;
  d << s.dx, s.dy, 0.0, -s.dy, -s.dx;
  return d;
}

void check_so_q(const CMat5& phi) {
  const CMat5 q = bundle::orthogonal_pairing().cast<cplx>();
  const double defect = (phi.transpose() * q + q * phi).cwiseAbs().maxCoeff();
  if (defect > 1e-12 * std::max(1.0, phi.cwiseAbs().maxCoeff()))
    throw NumericalError("higgs_matrix: Phi is not Q-skew (dual sign convention broken)");
}

CMat5 generator(const UnitaryConnection& c, cplx v) {
  return c.A_xi * v + c.A_xibar * std::conj(v);
}

}  // namespace

CMat5 higgs_matrix(cplx xi, const hitchin::HiggsCoefficients& coeffs, const Chart& chart) {
  CMat5 phi = bundle::higgs_pattern(chart.coefficient(coeffs.b, xi), chart.coefficient(coeffs.c, xi));
  check_so_q(phi);
  return phi;
}

ConnectionSample connection_sample(cplx xi, const MetricField& field,
                                   const hitchin::HiggsCoefficients& coeffs) {
  if (!field.contains(xi)) throw InvalidInput("connection_sample: point outside the solved region");
  const FieldSample s = field.eval(xi);
  const CMat5 phi = higgs_matrix(xi, coeffs, field.chart());
  ConnectionSample out;
  const Vec5d l = log_h(s);
  out.H = l.array().exp();
  const auto dl = dlog_h(s);
  out.A_xi = phi;
  out.A_xi.diagonal() += dl;
  out.A_xibar = CMat5::Zero();
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) out.A_xibar(i, j) = std::conj(phi(j, i)) * out.H(j) / out.H(i);
  return out;
}

UnitaryConnection unitary_connection(cplx xi, const MetricField& field,
                                     const hitchin::HiggsCoefficients& coeffs) {
  if (!field.contains(xi)) throw InvalidInput("transport: point outside the solved region");
  UnitaryConnection u;
  u.sample = field.eval(xi);
  const CMat5 phi = higgs_matrix(xi, coeffs, field.chart());
  const Vec5d l = log_h(u.sample);
  const auto dl = dlog_h(u.sample);
  u.phi = CMat5::Zero();
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (phi(i, j) != cplx(0.0)) u.phi(i, j) = phi(i, j) * std::exp(0.5 * (l(i) - l(j)));
  u.A_xi = u.phi;
  u.A_xi.diagonal() += 0.5 * dl;
  u.A_xibar = u.phi.adjoint();
  u.A_xibar.diagonal() -= 0.5 * dl.conjugate();
  return u;
}

const CMat5& real_frame() {
  static const CMat5 r = [] {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    CMat5 m = CMat5::Zero();
    // unitary index: 0 -> L-2, 1 -> L-1, 2 -> L0, 3 -> L1, 4 -> L2
    m(3, 0) = s;      m(1, 0) = s;        // e1
    m(3, 1) = i * s;  m(1, 1) = -i * s;   // e2
    m(4, 2) = i * s;  m(0, 2) = -i * s;   // f2
    m(4, 3) = s;      m(0, 3) = s;        // f1
    m(2, 4) = 1.0;                        // f3
    return m;
  }();
  return r;
}

Mat5 real_generator(cplx xi, cplx dxi, const MetricField& field,
                    const hitchin::HiggsCoefficients& coeffs, double* imag_part) {
  const auto c = unitary_connection(xi, field, coeffs);
  const CMat5 g = -(real_frame().adjoint() * generator(c, dxi) * real_frame());
  if (imag_part) *imag_part = g.imag().cwiseAbs().maxCoeff();
  return g.real();
}

CMat5 transport_unitary(const std::vector<cplx>& path, const MetricField& field,
                        const hitchin::HiggsCoefficients& coeffs, int substeps,
                        std::vector<CMat5>* history) {
  if (substeps < 1) throw InvalidInput("transport: substeps must be positive");
  CMat5 T = CMat5::Identity();
  if (history) {
    history->clear();
    history->push_back(T);
  }
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const cplx a = path[k];
    const cplx v = path[k + 1] - a;
    if (v == cplx(0.0)) {
      if (history) history->push_back(T);
      continue;
    }
    const double dt = 1.0 / substeps;
    auto rhs = [&](double tau, const CMat5& m) -> CMat5 {
      return -generator(unitary_connection(a + tau * v, field, coeffs), v) * m;
    };
    for (int s = 0; s < substeps; ++s) {
      const double tau = s * dt;
      CMat5 k1 = rhs(tau, T);
      CMat5 k2 = rhs(tau + 0.5 * dt, T + 0.5 * dt * k1);
      CMat5 k3 = rhs(tau + 0.5 * dt, T + 0.5 * dt * k2);
      CMat5 k4 = rhs(tau + dt, T + dt * k3);
      T += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!T.allFinite()) throw NumericalError("transport: non-finite transport matrix");
    if (history) history->push_back(T);
  }
  return T;
}

TransportResult parallel_transport(const std::vector<cplx>& path, const MetricField& field,
                                   const hitchin::HiggsCoefficients& coeffs, int substeps,
                                   double membership_tol) {
  if (path.empty()) throw InvalidInput("parallel_transport: empty path");
  TransportResult res;
  res.path = path;
  res.unitary = transport_unitary(path, field, coeffs, substeps);
  const CMat5 m = real_frame().adjoint() * res.unitary * real_frame();
  res.imag_residual = m.imag().cwiseAbs().maxCoeff();
  res.matrix = m.real();
  res.membership = liegroup::membership_check(res.matrix, membership_tol);
  res.relative_gram = liegroup::relative_gram_residual(res.matrix);
  res.cartan = liegroup::cartan_projection(res.matrix);
  return res;
}

double flatness_residual(const std::vector<cplx>& loop, const MetricField& field,
                         const hitchin::HiggsCoefficients& coeffs, int substeps) {
  if (loop.empty()) throw InvalidInput("flatness_residual: empty loop");
  if (std::abs(loop.front() - loop.back()) > 1e-14 * std::max(1.0, std::abs(loop.front())))
    throw InvalidInput("flatness_residual: path is not closed");
  CMat5 T = transport_unitary(loop, field, coeffs, substeps);
  const CMat5 m = real_frame().adjoint() * T * real_frame();
  return (m - CMat5::Identity()).cwiseAbs().maxCoeff();
}

std::vector<cplx> square_loop(cplx centre, double side, int per_edge) {
  const double a = 0.5 * side;
  const cplx corners[5] = {centre + cplx(-a, -a), centre + cplx(a, -a), centre + cplx(a, a),
                           centre + cplx(-a, a), centre + cplx(-a, -a)};
  std::vector<cplx> pts;
  for (int e = 0; e < 4; ++e)
    for (int k = 0; k < per_edge; ++k)
      pts.push_back(corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(k) / per_edge));
  pts.push_back(corners[4]);
  return pts;
}

std::vector<cplx> segment(cplx a, cplx b, int n) {
  if (n < 2) throw InvalidInput("segment: need at least two points");
  std::vector<cplx> pts(n);
  for (int k = 0; k < n; ++k) pts[k] = a + (b - a) * (static_cast<double>(k) / (n - 1));
  pts.back() = b;
  return pts;
}

double conserved_value(const CVec5& holo, const Eigen::Matrix<double, 5, 1>& H) {
  return 2.0 * H(3) * std::norm(holo(3)) - 2.0 * H(4) * std::norm(holo(4)) - H(2) * std::norm(holo(2));
}

CVec5 unitary_to_holomorphic(const CVec5& w, const FieldSample& s) {
  const Vec5d l = log_h(s);
  CVec5 v;
  for (int i = 0; i < 5; ++i) v(i) = w(i) * std::exp(-0.5 * l(i));
  return v;
}

ConservationReport conservation_probe(const std::vector<cplx>& path, const Vec5& v0,
                                      const MetricField& field,
                                      const hitchin::HiggsCoefficients& coeffs, int substeps) {
  const double q0 = v0.transpose() * liegroup::gram23() * v0;
  if (std::abs(q0 - 1.0) > 1e-12 * std::max(1.0, v0.squaredNorm())) throw PreconditionError("conservation_probe: start vector must be Q-unit");
  std::vector<CMat5> hist;
  transport_unitary(path, field, coeffs, substeps, &hist);
  const CVec5 w0 = real_frame() * v0.cast<cplx>();
  ConservationReport rep;
  rep.min_v1 = rep.min_v1_minus_v2 = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < path.size(); ++k) {
    const CVec5 w = hist[k] * w0;
    const FieldSample s = field.eval(path[k]);
    const CVec5 holo = unitary_to_holomorphic(w, s);
    const Vec5d H = log_h(s).array().exp();
    const double val = conserved_value(holo, H);
    rep.values.push_back(val);
    const double dev = std::abs(val - 1.0);
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev / std::max(1.0, w.squaredNorm()));
    const double n1 = std::abs(w(3)), n2 = std::abs(w(4));
    rep.min_v1 = std::min(rep.min_v1, n1);
    rep.min_v1_minus_v2 = std::min(rep.min_v1_minus_v2, n1 - n2);
  }
  return rep;
}

namespace {

using quad = __float128;

quad quad_sqrt(quad a) {
  quad x = static_cast<quad>(std::sqrt(static_cast<double>(a)));
  for (int k = 0; k < 3; ++k) x = quad(0.5) * (x + a / x);
  return x;
}

// Gaussian elimination with partial pivoting, n <= 10, rhs with k columns.
void quad_solve(quad (&a)[10][10], quad (&b)[10][6], int n, int k) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      quad ar = a[r][c] < 0 ? -a[r][c] : a[r][c];
      quad ap = a[piv][c] < 0 ? -a[piv][c] : a[piv][c];
      if (ar > ap) piv = r;
    }
    if (a[piv][c] == 0) throw NumericalError("extended transport: singular stage system");
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[c][j], a[piv][j]);
      for (int j = 0; j < k; ++j) std::swap(b[c][j], b[piv][j]);
    }
    for (int r = c + 1; r < n; ++r) {
      const quad f = a[r][c] / a[c][c];
      if (f == 0) continue;
      for (int j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      for (int j = 0; j < k; ++j) b[r][j] -= f * b[c][j];
    }
  }
  for (int c = n - 1; c >= 0; --c)
    for (int j = 0; j < k; ++j) {
      quad acc = b[c][j];
      for (int i = c + 1; i < n; ++i) acc -= a[c][i] * b[i][j];
      b[c][j] = acc / a[c][c];
    }
}

constexpr double kSign[5] = {1.0, 1.0, -1.0, -1.0, -1.0};

}  // namespace

ExtendedTransportReport conservation_probe_extended(const std::vector<cplx>& path, const Vec5& v0,
                                                    const MetricField& field,
                                                    const hitchin::HiggsCoefficients& coeffs,
                                                    int substeps) {
  if (path.empty()) throw InvalidInput("conservation_probe_extended: empty path");
  if (substeps < 1) throw InvalidInput("conservation_probe_extended: substeps must be positive");
  const double q0 = v0.transpose() * liegroup::gram23() * v0;
  if (std::abs(q0 - 1.0) > 1e-12 * std::max(1.0, v0.squaredNorm()))
    throw PreconditionError("conservation_probe_extended: start vector must be Q-unit");

  // Columns 0..4: transport matrix, column 5: the probe vector.
  quad state[5][6];
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) state[i][j] = i == j ? 1 : 0;
    state[i][5] = v0(i);
  }
  const quad r3 = quad_sqrt(3), half_sqrt = quad_sqrt(quad(0.5));
  const quad a11 = quad(0.25), a12 = quad(0.25) - r3 / 6, a21 = quad(0.25) + r3 / 6, a22 = quad(0.25);
  const double c1 = static_cast<double>(quad(0.5) - r3 / 6), c2 = static_cast<double>(quad(0.5) + r3 / 6);

  ExtendedTransportReport rep;
  // Q evaluated from unitary components: 2|w_1|^2 - 2|w_2|^2 - |w_0|^2.
  auto q_value = [&]() {
    const quad a = half_sqrt * state[0][5], b = half_sqrt * state[1][5];
    const quad c = half_sqrt * state[2][5], d = half_sqrt * state[3][5];
    const quad e = state[4][5];
    const quad v = 2 * (a * a + b * b) - 2 * (c * c + d * d) - e * e;
    const double dev = static_cast<double>(v - 1);
    return dev < 0 ? -dev : dev;
  };
  auto generator_at = [&](cplx xi, cplx vel) {
    const Mat5 g = real_generator(xi, vel, field, coeffs);
    const double defect = (g.transpose() * liegroup::gram23() + liegroup::gram23() * g)
                              .cwiseAbs().maxCoeff();
    rep.max_generator_defect = std::max(rep.max_generator_defect, defect);
    return g;
  };
  rep.max_abs_deviation = q_value();
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const cplx a = path[k], v = path[k + 1] - a;
    if (v == cplx(0.0)) continue;
    const quad h = quad(1) / substeps;
    for (int s = 0; s < substeps; ++s) {
      const double tau = static_cast<double>(s) / substeps;
      const double hd = 1.0 / substeps;
      const Mat5 g1 = generator_at(a + (tau + c1 * hd) * v, v);
      const Mat5 g2 = generator_at(a + (tau + c2 * hd) * v, v);
      quad m[10][10];
      quad rhs[10][6];
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          const quad d = i == j ? 1 : 0;
          m[i][j] = d - h * a11 * quad(g1(i, j));
          m[i][j + 5] = -h * a12 * quad(g1(i, j));
          m[i + 5][j] = -h * a21 * quad(g2(i, j));
          m[i + 5][j + 5] = d - h * a22 * quad(g2(i, j));
        }
      for (int i = 0; i < 5; ++i)
        for (int c = 0; c < 6; ++c) {
          quad s1 = 0, s2 = 0;
          for (int j = 0; j < 5; ++j) {
            s1 += quad(g1(i, j)) * state[j][c];
            s2 += quad(g2(i, j)) * state[j][c];
          }
          rhs[i][c] = s1;
          rhs[i + 5][c] = s2;
        }
      quad_solve(m, rhs, 10, 6);
      for (int i = 0; i < 5; ++i)
        for (int c = 0; c < 6; ++c) state[i][c] += h * quad(0.5) * (rhs[i][c] + rhs[i + 5][c]);
    }
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, q_value());
    if (!std::isfinite(rep.max_abs_deviation))
      throw NumericalError("conservation_probe_extended: non-finite state");
  }
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      quad acc = 0;
      for (int l = 0; l < 5; ++l) acc += state[l][i] * quad(kSign[l]) * state[l][j];
      const quad d = acc - (i == j ? quad(kSign[i]) : quad(0));
      const double dd = std::abs(static_cast<double>(d));
      rep.gram_residual = std::max(rep.gram_residual, dd);
      rep.matrix(i, j) = static_cast<double>(state[i][j]);
    }
  return rep;
}

double chern_curvature_defect(cplx xi, const MetricField& field,
                              const hitchin::HiggsCoefficients& coeffs, double step) {
  auto logs = [&](cplx p) { return log_h(field.eval(p)); };
  const Vec5d c = logs(xi);
  const Vec5d lap = (logs(xi + step) + logs(xi - step) + logs(xi + cplx(0, step)) +
                     logs(xi - cplx(0, step)) - 4.0 * c) / (4.0 * step * step);
  const auto conn = connection_sample(xi, field, coeffs);
  const CMat5 phi = higgs_matrix(xi, coeffs, field.chart());
  const CMat5& phistar = conn.A_xibar;
  CMat5 defect = phi * phistar - phistar * phi;
  defect.diagonal() -= lap.cast<cplx>();
  return defect.cwiseAbs().maxCoeff();
}

}  // namespace higgslab::transport
