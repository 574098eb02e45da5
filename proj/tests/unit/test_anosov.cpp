#include <doctest.h>

#include <cmath>

#include "higgslab/anosov.hpp"
#include "higgslab/errors.hpp"

using namespace higgslab;
using namespace higgslab::anosov;

namespace {
HiggsCoefficients fuchsian_coeffs() {
  HiggsCoefficients k;
  k.b = {1.0, 0};
  return k;
}

// Interpolated solution of the gamma = 0 problem, shared by the cases below.
const MetricField& solved_field() {
  static const std::unique_ptr<MetricField> field = [] {
    const auto mesh = hitchin::make_mesh(ChartKind::disk, 0.02, 0.999, 1024);
    const auto sol = hitchin::solve(fuchsian_coeffs(), mesh, hitchin::fuchsian_dirichlet(1.0, mesh));
    return hitchin::make_field(sol);
  }();
  return *field;
}

Vec5 e1() {
  Vec5 v = Vec5::Zero();
  v(0) = 1.0;
  return v;
}
}  // namespace

TEST_CASE("closed-form hessian") {
  const auto h0 = hessian_closed_form(cplx(1.5, 0.0), 0.0);
  CHECK(h0(0, 0) == doctest::Approx(2 * 2.25));
  CHECK(h0(1, 1) == doctest::Approx(2 * 2.25));
  CHECK(std::abs(h0(0, 1)) < 1e-15);
  CHECK(h0.determinant() == doctest::Approx(4 * 2.25 * 2.25));
  const auto h1 = hessian_closed_form(1.0, 0.5);
  CHECK(h1.determinant() == doctest::Approx(2.25));
  CHECK(hessian_det_formula(1.0, 0.5) == doctest::Approx(2.25));
  // det formula agrees with the matrix for generic complex s, t
  const cplx s(0.7, -0.4), t(0.2, 0.3);
  CHECK(hessian_closed_form(s, t).determinant() == doctest::Approx(hessian_det_formula(s, t)));
}

TEST_CASE("growth fit on synthetic data") {
  std::vector<double> d, f;
  for (int i = 0; i <= 400; ++i) {
    d.push_back(0.05 * i);
    f.push_back(std::expm1(d.back()));
  }
  const auto g = growth_fit(d, f);
  INFO(g.verdict, " decades ", g.decades, " window ", g.window_fraction);
  CHECK(g.conclusive);
  CHECK(g.epsilon == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 0; i < d.size(); ++i) f[i] = d[i] * d[i];
  const auto q = growth_fit(d, f);
  CHECK_FALSE(q.conclusive);
  CHECK(q.verdict.find("inconclusive") != std::string::npos);
  CHECK_THROWS_AS(growth_fit(std::vector<double>{0, 1}, std::vector<double>{0, 1}), InvalidInput);
}

TEST_CASE("section through the base vector vanishes at the base") {
  const auto& field = solved_field();
  const auto k = fuchsian_coeffs();
  const cplx p0(0.3, 0.0);
  const CVec5 w0 = transport::real_frame() * e1().cast<cplx>();
  CHECK(f_value(w0) == 0.0);
  const auto path = transport::segment(p0, cplx(0.6, 0.2), 40);
  TraceOptions opt;
  opt.fd_check = true;
  const auto tr = trace_section(e1(), path, field, k, opt);
  CHECK(tr.f.front() == 0.0);
  CHECK(tr.max_fd_rel_error < 1e-4);
  CHECK(tr.max_conservation_abs < 1e-8);
  for (std::size_t i = 1; i < tr.f.size(); ++i) CHECK(tr.f[i] > 0.0);
  // Flow started at the zero stays there.
  const auto fr = flow_descend(p0, w0, field, k);
  CHECK(fr.steps == 0);
  CHECK(fr.converged);
}

TEST_CASE("flow from nearby starts returns to the unique zero") {
  const auto& field = solved_field();
  const auto k = fuchsian_coeffs();
  const cplx p0(0.3, 0.0);
  std::vector<cplx> starts;
  for (int j = 0; j < 4; ++j) starts.push_back(field.chart().geodesic_point(p0, M_PI / 4 + j * M_PI / 2, 0.6));
  FlowOptions opt;
  const auto u = flow_uniqueness(p0, e1(), starts, field, k, opt);
  CHECK(u.unique);
  for (const auto& r : u.runs) {
    CHECK(r.monotone);
    CHECK(std::abs(r.end - p0) < 2.0 * u.cell);
  }
  opt.normalized = true;
  const auto n = flow_uniqueness(p0, e1(), starts, field, k, opt);
  CHECK(n.unique);
}

TEST_CASE("hessian at the zero matches finite differences") {
  const auto& field = solved_field();
  const auto k = fuchsian_coeffs();
  const cplx p0(0.3, 0.0);
  const CVec5 w0 = transport::real_frame() * e1().cast<cplx>();
  const auto h = hessian_nondegeneracy(p0, w0, field, k);
  CHECK_FALSE(h.gap_violation);
  CHECK(h.det_formula > 0.0);
  CHECK(h.rel_error < 1e-3);
  CVec5 bad = w0;
  bad(4) = 1.0;
  CHECK_THROWS_AS(hessian_nondegeneracy(p0, bad, field, k), PreconditionError);
}

TEST_CASE("ray traces: s-conditions and growth") {
  const auto& field = solved_field();
  const auto k = fuchsian_coeffs();
  RayFamily fam;
  fam.base = 0.3;
  fam.phi_min = -M_PI / 4;
  fam.phi_max = M_PI / 4;
  fam.directions = 6;
  fam.lengths = 60;
  fam.d_max = 6.0;
  fam.chords_per_length = 2;
  const auto par = ray_traces(fam, e1(), field, k, true);
  const auto ser = ray_traces(fam, e1(), field, k, false);
  REQUIRE(par.size() == ser.size());
  for (std::size_t j = 0; j < par.size(); ++j) CHECK(par[j].f == ser[j].f);
  // With gamma = 0 the gap is inf ||tau|| over the traces.
  double gap = 1e300;
  for (const auto& tr : par)
    for (double tn : tr.tau_norm) gap = std::min(gap, tn);
  const auto s = s_conditions_check(par, gap, -1e300, 1e300, field.chart());
  CHECK(s.chain_ok);
  CHECK(s.local_chain_ok);
  CHECK(s.c_consistent);
  CHECK(s.trivial_points == static_cast<int>(par.size()));
  const auto g = growth_fit(par);
  INFO(g.verdict, " decades ", g.decades, " window ", g.window_fraction);
  CHECK(g.conclusive);
  CHECK(g.decades >= 2.0);
  CHECK(g.epsilon > 0.0);
  CHECK_THROWS_AS(s_conditions_check(par, 0.0, 0, 1, field.chart()), PreconditionError);
}

TEST_CASE("domination bound and parallel reference") {
  const auto& field = solved_field();
  const auto k = fuchsian_coeffs();
  RayFamily fam;
  fam.base = 0.3;
  fam.phi_min = -M_PI / 4;
  fam.phi_max = M_PI / 4;
  fam.directions = 5;
  fam.lengths = 20;
  fam.d_max = 3.0;
  fam.chords_per_length = 4;
  const auto rep = domination_verify(fam, field, k);
  const auto ser = domination_verify_serial(fam, field, k);
  CHECK(rep.complete);
  CHECK(rep.increasing);
  CHECK(rep.violations == 0);
  REQUIRE(rep.records.size() == 100);
  REQUIRE(ser.records.size() == rep.records.size());
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    CHECK(rep.records[i].mu2 == ser.records[i].mu2);
    CHECK(rep.records[i].f_section == ser.records[i].f_section);
    CHECK(rep.records[i].mu1 >= rep.records[i].mu2);
    CHECK(rep.records[i].mu2 >= 0.0);
  }
  CHECK(rep.fit.epsilon > 0.0);
  // One short step: transport is close to the identity.
  fam.d_max = 1e-6;
  fam.lengths = 1;
  const auto tiny = domination_verify(fam, field, k);
  for (const auto& r : tiny.records) CHECK(r.mu1 < 1e-5);
}
