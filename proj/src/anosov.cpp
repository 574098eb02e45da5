#include "higgslab/anosov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "higgslab/errors.hpp"

namespace higgslab::anosov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CVec5 rk4_chord(cplx a, cplx v, const CVec5& w0, const MetricField& field,
                const HiggsCoefficients& coeffs, int substeps) {
  const double dt = 1.0 / substeps;
  auto rhs = [&](double tau, const CVec5& w) -> CVec5 {
    const auto c = transport::unitary_connection(a + tau * v, field, coeffs);
    return -(c.A_xi * v + c.A_xibar * std::conj(v)) * w;
  };
  CVec5 w = w0;
  for (int s = 0; s < substeps; ++s) {
    const double tau = s * dt;
    const CVec5 k1 = rhs(tau, w);
    const CVec5 k2 = rhs(tau + 0.5 * dt, w + 0.5 * dt * k1);
    const CVec5 k3 = rhs(tau + 0.5 * dt, w + 0.5 * dt * k2);
    const CVec5 k4 = rhs(tau + dt, w + dt * k3);
    w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return w;
}

double conserved_unitary(const CVec5& w) {
  return 2.0 * std::norm(w(3)) - 2.0 * std::norm(w(4)) - std::norm(w(2));
}

// Natural length scale of the chart near xi, for finite-difference steps.
double chart_scale(const Chart& chart, cplx xi) {
  return chart.kind == ChartKind::disk ? std::abs(xi) : std::max(1.0, std::abs(xi.real()));
}

double fd_step_at(const MetricField& field, cplx xi, double fraction) {
  const double h = field.t_spacing();
  if (h > 0.0) return fraction * field.chart().cell_size(xi, h);
  return fraction * 1e-3 * chart_scale(field.chart(), xi);
}

double f_after(cplx p, cplx e, const CVec5& w, const MetricField& field,
               const HiggsCoefficients& coeffs, int substeps) {
  return f_value(rk4_chord(p, e, w, field, coeffs, substeps));
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, max_dev = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y, size_t lo,
                      size_t hi) {
  const double n = static_cast<double>(hi - lo);
  double sx = 0, sy = 0;
  for (size_t i = lo; i < hi; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (size_t i = lo; i < hi; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (size_t i = lo; i < hi; ++i)
    f.max_dev = std::max(f.max_dev, std::abs(y[i] - (f.intercept + f.slope * x[i])));
  return f;
}

// Per-bin minima of y over an even partition of [min d, max d]; empty bins dropped.
void lower_envelope(const std::vector<double>& d, const std::vector<double>& y, int bins,
                    std::vector<double>& ed, std::vector<double>& ey, std::vector<int>& ebin) {
  const auto [dlo_it, dhi_it] = std::minmax_element(d.begin(), d.end());
  const double dlo = *dlo_it, dhi = *dhi_it;
  const double width = (dhi - dlo) / bins;
  std::vector<double> bd(bins, 0.0), by(bins, kInf);
  for (size_t i = 0; i < d.size(); ++i) {
    int b = width > 0 ? static_cast<int>((d[i] - dlo) / width) : 0;
    b = std::clamp(b, 0, bins - 1);
    if (y[i] < by[b]) {
      by[b] = y[i];
      bd[b] = d[i];
    }
  }
  ed.clear();
  ey.clear();
  ebin.clear();
  for (int b = 0; b < bins; ++b)
    if (std::isfinite(by[b])) {
      ed.push_back(bd[b]);
      ey.push_back(by[b]);
      ebin.push_back(b);
    }
}

}  // namespace

double f_value(const CVec5& w) { return std::norm(w(4)); }

cplx df_dxi(const transport::UnitaryConnection& c, const CVec5& w) {
  // d/dxi of |w_2|^2 using dw = -A w along xi and xibar.
  return -c.phi(4, 3) * w(3) * std::conj(w(4)) - c.phi(1, 4) * w(4) * std::conj(w(1));
}

double grad_norm(cplx xi, const CVec5& w, const MetricField& field,
                 const HiggsCoefficients& coeffs) {
  const auto c = transport::unitary_connection(xi, field, coeffs);
  return 2.0 * std::abs(df_dxi(c, w)) / std::sqrt(field.chart().hyp_factor_at(xi));
}

CVec5 transport_vector(const std::vector<cplx>& path, const CVec5& w0, const MetricField& field,
                       const HiggsCoefficients& coeffs, int substeps,
                       std::vector<CVec5>* history) {
  if (substeps < 1) throw InvalidInput("transport_vector: substeps must be positive");
  CVec5 w = w0;
  if (history) {
    history->clear();
    history->push_back(w);
  }
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const cplx v = path[k + 1] - path[k];
    if (v != cplx(0.0)) w = rk4_chord(path[k], v, w, field, coeffs, substeps);
    if (!w.allFinite()) throw NumericalError("transport_vector: non-finite section");
    if (history) history->push_back(w);
  }
  return w;
}

CVec5 section_at(cplx p0, const Vec5& v0, cplx target, const MetricField& field,
                 const HiggsCoefficients& coeffs, int chords) {
  const CVec5 w0 = transport::real_frame() * v0.cast<cplx>();
  if (p0 == target) return w0;
  return transport_vector(transport::segment(p0, target, chords + 1), w0, field, coeffs, 4);
}

FlatSectionTrace trace_section(const Vec5& v0, const std::vector<cplx>& path,
                               const MetricField& field, const HiggsCoefficients& coeffs,
                               const TraceOptions& opt) {
  if (path.empty()) throw InvalidInput("trace_section: empty path");
  if (!field.contains(path.front()))
    throw PreconditionError("trace_section: start point outside the solved region");
  const double q0 = v0.transpose() * liegroup::gram23() * v0;
  if (std::abs(q0 - 1.0) > 1e-12 * std::max(1.0, v0.squaredNorm())) throw PreconditionError("trace_section: v0 must be Q-unit");

  FlatSectionTrace tr;
  tr.path = path;
  const CVec5 w0 = transport::real_frame() * v0.cast<cplx>();
  transport_vector(path, w0, field, coeffs, opt.substeps, &tr.unitary);
  const Chart& chart = field.chart();
  const size_t n = path.size();
  tr.distance.resize(n);
  tr.components.resize(n);
  tr.f.resize(n);
  tr.grad_norm.resize(n);
  tr.conservation.resize(n);
  tr.tau_norm.resize(n);
  tr.gamma_norm.resize(n);
  if (opt.fd_check) tr.grad_fd.resize(n);
  for (size_t k = 0; k < n; ++k) {
    const cplx xi = path[k];
    const CVec5& w = tr.unitary[k];
    const auto c = transport::unitary_connection(xi, field, coeffs);
    const double lam = chart.hyp_factor_at(xi);
    tr.distance[k] = k == 0 ? 0.0 : chart.distance(path[0], xi);
    tr.components[k] = transport::unitary_to_holomorphic(w, c.sample);
    tr.f[k] = f_value(w);
    tr.grad_norm[k] = 2.0 * std::abs(df_dxi(c, w)) / std::sqrt(lam);
    tr.tau_norm[k] = std::abs(c.phi(4, 3)) / std::sqrt(lam);
    tr.gamma_norm[k] = std::abs(c.phi(1, 4)) / std::sqrt(lam);
    tr.conservation[k] = conserved_unitary(w);
    const double dev = std::abs(tr.conservation[k] - 1.0);
    tr.max_conservation_abs = std::max(tr.max_conservation_abs, dev);
    tr.max_conservation_rel = std::max(tr.max_conservation_rel, dev / std::max(1.0, w.squaredNorm()));
    if (opt.fd_check) {
      const double h = fd_step_at(field, xi, opt.fd_fraction);
      const double fa = (f_after(xi, h, w, field, coeffs, 2) - f_after(xi, -h, w, field, coeffs, 2)) / (2 * h);
      const double fb = (f_after(xi, cplx(0, h), w, field, coeffs, 2) -
                         f_after(xi, cplx(0, -h), w, field, coeffs, 2)) / (2 * h);
      tr.grad_fd[k] = std::hypot(fa, fb) / std::sqrt(lam);
      // Relative comparison is meaningless at the zero of v_2.
      if (tr.grad_norm[k] > 1e-6 * std::max(1.0, w.squaredNorm()))
        tr.max_fd_rel_error = std::max(tr.max_fd_rel_error,
                                       std::abs(tr.grad_fd[k] - tr.grad_norm[k]) / tr.grad_norm[k]);
    }
  }
  return tr;
}

SConditionReport s_conditions_check(const std::vector<FlatSectionTrace>& traces, double gap,
                                    double t_lo, double t_hi, const Chart& chart) {
  if (!(gap > 0.0)) throw PreconditionError("s_conditions_check: gap must be positive");
  SConditionReport r;
  r.min_chain_margin = r.min_local_margin = r.c = r.c_prime = r.inf_v1_over_v2 = kInf;
  const double s2 = std::sqrt(2.0);
  for (const auto& tr : traces) {
    for (size_t k = 0; k < tr.path.size(); ++k) {
      ++r.points;
      const CVec5& w = tr.unitary[k];
      const double f = tr.f[k], g = tr.grad_norm[k];
      if (f <= 1e-24 * std::max(1.0, w.squaredNorm())) {
        ++r.trivial_points;
        continue;
      }
      const double v1 = std::abs(w(3)), v2 = std::abs(w(4));
      const double local = s2 * (tr.tau_norm[k] - tr.gamma_norm[k]) * v1 * v2;
      if (local <= 0.0) {
        r.local_chain_ok = false;
        r.min_local_margin = std::min(r.min_local_margin, 0.0);
      } else {
        const double m = g / local;
        r.min_local_margin = std::min(r.min_local_margin, m);
        if (m < 1.0 - 1e-12) r.local_chain_ok = false;
      }
      const double t = chart.t_of(tr.path[k]);
      if (t < t_lo || t > t_hi) continue;
      ++r.chain_points;
      const double m = g / (s2 * gap * v1 * v2);
      r.min_chain_margin = std::min(r.min_chain_margin, m);
      if (m < 1.0 - 1e-12) r.chain_ok = false;
      r.c = std::min(r.c, g / f);
      r.c_prime = std::min(r.c_prime, g / std::sqrt(f));
      r.inf_v1_over_v2 = std::min(r.inf_v1_over_v2, v1 / v2);
    }
  }
  if (r.chain_points > 0) r.c_consistent = r.c >= s2 * gap * r.inf_v1_over_v2 * (1.0 - 1e-12);
  return r;
}

Eigen::Matrix2d hessian_closed_form(cplx s, cplx t) {
  const cplx wt = std::conj(s + t) * (s - t);
  Eigen::Matrix2d h;
  h << 2.0 * std::norm(s + t), -2.0 * wt.imag(), -2.0 * wt.imag(), 2.0 * std::norm(s - t);
  return h;
}

double hessian_det_formula(cplx s, cplx t) {
  const cplx v = std::conj(s + t) * (s - t) + std::conj(s - t) * (s + t);
  return (v * v).real();
}

HessianReport hessian_nondegeneracy(cplx point, const CVec5& w, const MetricField& field,
                                    const HiggsCoefficients& coeffs, double fd_step) {
  HessianReport rep;
  rep.f_at_point = f_value(w);
  if (rep.f_at_point > 1e-8 * std::max(1.0, w.squaredNorm()))
    throw PreconditionError("hessian_nondegeneracy: v_2 does not vanish at the point");
  const auto c = transport::unitary_connection(point, field, coeffs);
  rep.s = c.phi(4, 3) * w(3);
  rep.t = std::conj(c.phi(1, 4)) * w(1);
  rep.gap_violation = std::abs(rep.s) <= std::abs(rep.t);
  rep.closed_form = hessian_closed_form(rep.s, rep.t);
  rep.det = rep.closed_form.determinant();
  rep.det_formula = hessian_det_formula(rep.s, rep.t);

  const double h = fd_step > 0 ? fd_step : 1e-3 * chart_scale(field.chart(), point);
  auto f = [&](double a, double b) { return f_after(point, cplx(a, b), w, field, coeffs, 8); };
  const double f0 = rep.f_at_point;
  const double faa = (f(h, 0) - 2 * f0 + f(-h, 0)) / (h * h);
  const double fbb = (f(0, h) - 2 * f0 + f(0, -h)) / (h * h);
  const double fab = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
  rep.fd << faa, fab, fab, fbb;
  rep.det_fd = rep.fd.determinant();
  rep.rel_error = std::abs(rep.det_fd - rep.det_formula) / std::max(std::abs(rep.det_formula), 1e-300);
  rep.entry_rel_error = (rep.fd - rep.closed_form).cwiseAbs().maxCoeff() /
                        std::max(rep.closed_form.cwiseAbs().maxCoeff(), 1e-300);
  return rep;
}

FlowResult flow_descend(cplx start, const CVec5& w_start, const MetricField& field,
                        const HiggsCoefficients& coeffs, const FlowOptions& opt) {
  if (!field.contains(start)) throw PreconditionError("flow_descend: start outside the solved region");
  const Chart& chart = field.chart();
  struct Deriv {
    cplx dxi;
    CVec5 dw;
    double grad;
  };
  auto deriv = [&](cplx xi, const CVec5& w) {
    const auto c = transport::unitary_connection(xi, field, coeffs);
    const double lam = chart.hyp_factor_at(xi);
    const cplx df = df_dxi(c, w);
    const double g = 2.0 * std::abs(df) / std::sqrt(lam);
    cplx v = -2.0 * std::conj(df) / lam;
    if (opt.normalized) v *= g / (1.0 + g * g);
    return Deriv{v, -(c.A_xi * v + c.A_xibar * std::conj(v)) * w, g};
  };

  FlowResult res;
  cplx xi = start;
  CVec5 w = w_start;
  res.trajectory.push_back(xi);
  res.f_values.push_back(f_value(w));
  double dt = 0.0;
  while (true) {
    const Deriv d0 = deriv(xi, w);
    res.final_grad = d0.grad;
    res.final_f = f_value(w);
    if (d0.grad < opt.grad_tol) {
      res.converged = true;
      res.spurious_critical = res.final_f >= opt.f_tol;
      break;
    }
    if (res.steps >= opt.max_steps) break;
    const double speed = std::abs(d0.dxi) * std::sqrt(chart.hyp_factor_at(xi));
    const double cap = opt.max_hyp_step / speed;
    dt = dt > 0 ? std::min(2.0 * dt, cap) : cap;
    bool accepted = false;
    int halvings = 0;
    while (!accepted) {
      try {
        const Deriv k1 = d0;
        const Deriv k2 = deriv(xi + 0.5 * dt * k1.dxi, w + 0.5 * dt * k1.dw);
        const Deriv k3 = deriv(xi + 0.5 * dt * k2.dxi, w + 0.5 * dt * k2.dw);
        const Deriv k4 = deriv(xi + dt * k3.dxi, w + dt * k3.dw);
        const cplx xn = xi + (dt / 6.0) * (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi);
        if (!field.contains(xn)) throw InvalidInput("flow left the chart");
        // The coupled step only picks the path; w is re-transported along the chord so it
        // stays the flat section to chord accuracy.
        const CVec5 wn = rk4_chord(xi, xn - xi, w, field, coeffs, 4);
        if (f_value(wn) > res.final_f) {
          ++res.rejected;
          dt *= 0.25;
        } else {
          res.length += chart.distance(xi, xn);
          xi = xn;
          w = wn;
          accepted = true;
        }
      } catch (const InvalidInput&) {
        dt *= 0.5;
        if (++halvings > 40) {
          res.exited_chart = true;
          break;
        }
      }
      if (dt < 1e-300) break;
    }
    if (!accepted) break;
    ++res.steps;
    res.trajectory.push_back(xi);
    res.f_values.push_back(f_value(w));
  }
  for (size_t k = 1; k < res.f_values.size(); ++k)
    if (res.f_values[k] > res.f_values[k - 1]) res.monotone = false;
  res.end = xi;
  res.w_end = w;
  return res;
}

UniquenessReport flow_uniqueness(cplx p0, const Vec5& v0, const std::vector<cplx>& starts,
                                 const MetricField& field, const HiggsCoefficients& coeffs,
                                 const FlowOptions& opt) {
  UniquenessReport rep;
  bool all = !starts.empty();
  cplx mean = 0.0;
  for (const cplx s : starts) {
    const CVec5 w = section_at(p0, v0, s, field, coeffs);
    rep.runs.push_back(flow_descend(s, w, field, coeffs, opt));
    const auto& r = rep.runs.back();
    all = all && r.converged && !r.spurious_critical;
    mean += r.end;
  }
  if (starts.empty()) return rep;
  mean /= static_cast<double>(starts.size());
  for (size_t i = 0; i < rep.runs.size(); ++i)
    for (size_t j = i + 1; j < rep.runs.size(); ++j)
      rep.spread = std::max(rep.spread, std::abs(rep.runs[i].end - rep.runs[j].end));
  const double h = field.t_spacing();
  rep.cell = h > 0 ? field.chart().cell_size(mean, h) : 1e-3 * chart_scale(field.chart(), mean);
  rep.unique = all && rep.spread <= 2.0 * rep.cell;
  return rep;
}

EnvelopeFit envelope_fit(const std::vector<double>& d, const std::vector<double>& y, int bins) {
  if (d.size() != y.size() || d.empty()) throw InvalidInput("envelope_fit: bad sample arrays");
  std::vector<double> ed, ey;
  std::vector<int> eb;
  lower_envelope(d, y, bins, ed, ey, eb);
  EnvelopeFit fit;
  fit.support = static_cast<int>(d.size());
  if (ed.size() >= 2) fit.epsilon = least_squares(ed, ey, 0, ed.size()).slope;
  fit.C = -kInf;
  for (size_t i = 0; i < d.size(); ++i) fit.C = std::max(fit.C, fit.epsilon * d[i] - y[i]);
  return fit;
}

GrowthFit growth_fit(const std::vector<double>& d, const std::vector<double>& f, int bins) {
  if (d.size() != f.size() || d.size() < 3) throw InvalidInput("growth_fit: need matching samples");
  if (bins < 5) throw InvalidInput("growth_fit: need at least 5 bins");
  GrowthFit g;
  g.support = static_cast<int>(d.size());
  std::vector<double> L(f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0.0) throw InvalidInput("growth_fit: f must be non-negative");
    L[i] = std::log1p(f[i]);
  }
  const auto [lo, hi] = std::minmax_element(L.begin(), L.end());
  g.decades = (*hi - *lo) / std::log(10.0);
  if (g.decades < 2.0) {
    g.verdict = "inconclusive: less than 2 decades of f";
    return g;
  }
  std::vector<double> ed, ey;
  std::vector<int> eb;
  lower_envelope(d, L, bins, ed, ey, eb);
  // Longest contiguous run of bins on which the envelope is a line within 5% of its span.
  int best_cover = 0;
  LineFit best;
  for (size_t i = 0; i < ed.size(); ++i)
    for (size_t j = i + 2; j <= ed.size(); ++j) {
      const int cover = eb[j - 1] - eb[i] + 1;
      if (cover <= best_cover) continue;
      const LineFit lf = least_squares(ed, ey, i, j);
      const auto [mn, mx] = std::minmax_element(ey.begin() + i, ey.begin() + j);
      if (lf.max_dev <= 0.05 * (*mx - *mn)) {
        best_cover = cover;
        best = lf;
      }
    }
  g.window_fraction = static_cast<double>(best_cover) / bins;
  if (g.window_fraction < 0.8) {
    g.verdict = "inconclusive: lower envelope not linear over 80% of the range";
    return g;
  }
  g.epsilon = best.slope;
  g.C = -kInf;
  for (size_t i = 0; i < d.size(); ++i) g.C = std::max(g.C, g.epsilon * d[i] - L[i]);
  g.conclusive = g.epsilon > 0.0;
  g.verdict = g.conclusive ? "exponential" : "non-positive slope";
  return g;
}

GrowthFit growth_fit(const std::vector<FlatSectionTrace>& traces, int bins) {
  std::vector<double> d, f;
  for (const auto& tr : traces) {
    d.insert(d.end(), tr.distance.begin(), tr.distance.end());
    f.insert(f.end(), tr.f.begin(), tr.f.end());
  }
  return growth_fit(d, f, bins);
}

std::vector<double> ray_angles(const RayFamily& fam) {
  if (fam.directions < 1) throw InvalidInput("ray family: need at least one direction");
  std::vector<double> a(fam.directions);
  for (int j = 0; j < fam.directions; ++j)
    a[j] = fam.directions == 1
               ? fam.phi_min
               : fam.phi_min + (fam.phi_max - fam.phi_min) * j / (fam.directions - 1);
  return a;
}

std::vector<cplx> ray_path(const Chart& chart, const RayFamily& fam, double phi) {
  if (fam.lengths < 1 || fam.chords_per_length < 1 || !(fam.d_max > 0))
    throw InvalidInput("ray family: lengths, chords and d_max must be positive");
  const int m = fam.lengths * fam.chords_per_length;
  std::vector<cplx> pts(m + 1);
  pts[0] = fam.base;
  for (int k = 1; k <= m; ++k) pts[k] = chart.geodesic_point(fam.base, phi, fam.d_max * k / m);
  return pts;
}

std::vector<FlatSectionTrace> ray_traces(const RayFamily& fam, const Vec5& v0,
                                         const MetricField& field, const HiggsCoefficients& coeffs,
                                         bool parallel) {
  const auto angles = ray_angles(fam);
  std::vector<FlatSectionTrace> out(angles.size());
  std::vector<std::string> errs(angles.size());
  TraceOptions opt;
  opt.substeps = fam.substeps;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int j = 0; j < static_cast<int>(angles.size()); ++j) {
    try {
      out[j] = trace_section(v0, ray_path(field.chart(), fam, angles[j]), field, coeffs, opt);
    } catch (const std::exception& e) {
      errs[j] = e.what();
    }
  }
  for (const auto& e : errs)
    if (!e.empty()) throw InvalidInput("ray_traces: " + e);
  return out;
}

DominationReport domination_verify(const RayFamily& fam, const MetricField& field,
                                   const HiggsCoefficients& coeffs, double tol, bool parallel) {
  const auto angles = ray_angles(fam);
  const int nd = static_cast<int>(angles.size());
  std::vector<std::vector<DominationRecord>> per(nd);
  std::vector<std::string> errs(nd);
  const CMat5& R = transport::real_frame();
  const CMat5 Rh = R.adjoint();
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int j = 0; j < nd; ++j) {
    const auto path = ray_path(field.chart(), fam, angles[j]);
    std::vector<CMat5> hist;
    try {
      transport::transport_unitary(path, field, coeffs, fam.substeps, &hist);
    } catch (const std::exception& e) {
      errs[j] = e.what();
    }
    // Partial histories are not kept by transport_unitary; a failure drops the direction.
    if (!errs[j].empty()) continue;
    for (int k = 1; k <= fam.lengths; ++k) {
      const size_t idx = static_cast<size_t>(k) * fam.chords_per_length;
      const CMat5& T = hist[idx];
      const Mat5 M = (Rh * T * R).real();
      DominationRecord rec;
      rec.direction = j;
      rec.phi = angles[j];
      rec.d = fam.d_max * k / fam.lengths;
      const auto kak = liegroup::kak_decompose(M);
      rec.mu1 = kak.mu.mu1;
      rec.mu2 = kak.mu.mu2;
      const auto roots = liegroup::simple_roots(kak.mu);
      rec.alpha1 = roots.first;
      rec.alpha2 = roots.second;
      const Vec5 vprime = kak.k_plus.transpose().col(1);
      const CVec5 end = R * (M * vprime).cast<cplx>();
      rec.f_section = std::norm(end(4));
      rec.bound = 0.5 * std::exp(2.0 * rec.mu2) + 0.5;
      const cplx a = (R * M.col(0).cast<cplx>())(4);
      const cplx b = (R * M.col(1).cast<cplx>())(4);
      Eigen::Matrix2d gm;
      const double ab = (std::conj(a) * b).real();
      gm << std::norm(a), ab, ab, std::norm(b);
      rec.f_circle_max = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(gm).eigenvalues()(1);
      rec.relative_gram = liegroup::relative_gram_residual(M);
      per[j].push_back(rec);
    }
  }
  DominationReport rep;
  for (int j = 0; j < nd; ++j) {
    if (!errs[j].empty()) {
      rep.complete = false;
      if (rep.error.empty()) rep.error = "direction " + std::to_string(j) + ": " + errs[j];
    }
    double last = -kInf;
    for (const auto& r : per[j]) {
      if (!(r.d > last)) rep.increasing = false;
      last = r.d;
      if (r.f_section > r.bound + tol) ++rep.violations;
      if (r.f_circle_max > r.bound + tol) ++rep.circle_exceedances;
      rep.max_bound_ratio = std::max(rep.max_bound_ratio, r.f_section / r.bound);
      rep.max_relative_gram = std::max(rep.max_relative_gram, r.relative_gram);
      rep.records.push_back(r);
    }
  }
  if (!rep.records.empty()) {
    std::vector<double> d, y;
    for (const auto& r : rep.records) {
      d.push_back(r.d);
      y.push_back(r.alpha2);
    }
    d.push_back(0.0);  // zero-length segment: identity, alpha_2 = 0
    y.push_back(0.0);
    rep.fit = envelope_fit(d, y);
  }
  return rep;
}

}  // namespace higgslab::anosov
