#include "higgslab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "higgslab/anosov.hpp"
#include "higgslab/errors.hpp"
#include "higgslab/hypgeom.hpp"
#include "higgslab/liegroup.hpp"
#include "higgslab/modelmetric.hpp"
#include "higgslab/transport.hpp"

namespace higgslab::pipeline {

using nlohmann::json;
using scenario::Scenario;

namespace {

// Non-finite values are written as null so the documents stay valid JSON.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& dir, const std::string& name, const std::vector<std::string>& cols) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    out_.open(std::filesystem::path(dir) / name);
    if (!out_) throw InvalidInput("cannot write " + name + " in " + dir);
    for (size_t k = 0; k < cols.size(); ++k) out_ << (k ? "," : "") << cols[k];
    out_ << '\n';
  }
  void row(const std::vector<double>& vals) {
    if (!out_.is_open()) return;
    for (size_t k = 0; k < vals.size(); ++k) out_ << (k ? "," : "") << fmt_double(vals[k]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const std::string& dir, const std::string& name, const json& doc) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name);
  if (!out) throw InvalidInput("cannot write " + name + " in " + dir);
  out << doc.dump(2) << '\n';
}

void add(std::vector<Check>* checks, std::string group, std::string name, bool pass, double value,
         double threshold, std::string detail = "") {
  if (checks)
    checks->push_back(Check{std::move(group), std::move(name), pass, value, threshold,
                            std::move(detail)});
}

double order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

// Smallest consecutive order along a ladder.
double min_order(const std::vector<double>& e) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k + 1 < e.size(); ++k) {
    const double o = order(e[k], e[k + 1]);
    if (!std::isfinite(o)) return std::numeric_limits<double>::quiet_NaN();
    m = std::min(m, o);
  }
  return m;
}

json orders(const std::vector<double>& e) {
  json a = json::array();
  for (size_t k = 0; k + 1 < e.size(); ++k) a.push_back(jnum(order(e[k], e[k + 1])));
  return a;
}

Vec5 random_q_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  for (;;) {
    Vec5 v;
    for (int i = 0; i < 5; ++i) v(i) = nd(rng);
    const double q = v.transpose() * liegroup::gram23() * v;
    if (q > 0.05 * v.squaredNorm()) return v / std::sqrt(q);
  }
}

bool expects_stable(const Scenario& sc) { return sc.expect_stability == "stable"; }

int production_n(const Scenario& sc, const RunOptions& opt) { return sc.mesh.n * opt.refine; }

double loop_residual(const Scenario& sc, const MetricField& field, int substeps) {
  const auto loop = transport::square_loop(sc.loop->centre, sc.loop->side, sc.loop->per_edge);
  return transport::flatness_residual(loop, field, scenario::coefficients(sc), substeps);
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const scenario::SchemaError*>(&e)) return 2;
  if (dynamic_cast<const InvalidInput*>(&e)) return 2;
  if (dynamic_cast<const PreconditionError*>(&e)) return 3;
  if (dynamic_cast<const Unsupported*>(&e)) return 3;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 4;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  return 1;
}

SolvedScenario solve_scenario(const Scenario& sc, int n) {
  if (!sc.has_solve) throw PreconditionError("scenario " + sc.name + " has no solve blocks");
  for (const auto& p : sc.data.punctures)
    if (p.zeta == 0.0)
      throw PreconditionError("puncture " + std::to_string(p.id) +
                              ": zero weight is not supported together with the solver");
  const auto mesh = scenario::make_mesh(sc, n);
  SolvedScenario s;
  s.solution = hitchin::solve(scenario::coefficients(sc), mesh, scenario::dirichlet(sc, mesh),
                              scenario::solver_options(sc, mesh));
  s.derived = hitchin::derived_fields(s.solution);
  s.field = hitchin::make_field(s.solution);
  return s;
}

json stability_report(const Scenario& sc, std::vector<Check>* checks) {
  const bool gamma_zero = sc.data.gamma.is_zero();
  const auto v = bundle::check_stability(sc.data, gamma_zero);
  const bool mw = bundle::milnor_wood_check(sc.data);
  json j;
  j["scenario"] = sc.name;
  j["gamma_is_zero"] = gamma_zero;
  j["classification"] = bundle::to_string(v.classification);
  j["witnesses"] = v.witnesses;
  j["pardeg_L2"] = v.pardeg_L2;
  j["pardeg_L1_plus_L2"] = v.pardeg_L1_plus_L2;
  j["milnor_wood"] = mw;
  j["expected"] = sc.expect_stability;
  const bool match = bundle::to_string(v.classification) == sc.expect_stability;
  j["matches_expected"] = match;
  add(checks, "stability", "classification matches expectation", match, 0.0, 0.0,
      bundle::to_string(v.classification));
  if (v.classification == bundle::Classification::stable)
    add(checks, "stability", "stable implies Milnor-Wood", mw, 0.0, 0.0);
  return j;
}

json model_metric_report(const Scenario& sc, std::vector<Check>* checks) {
  json j;
  j["scenario"] = sc.name;
  j["punctures"] = json::array();
  for (const auto& p : sc.data.punctures) {
    json pj;
    pj["id"] = p.id;
    pj["zeta"] = p.zeta;
    pj["flag"] = bundle::to_string(p.flag);
    if (p.zeta == 0.0) {
      pj["model"] = "trivial weight, not modelled";
      j["punctures"].push_back(pj);
      continue;
    }
    const auto mm = modelmetric::model_metric_local(sc.data, p.id);
    pj["delta"] = mm.delta;
    json ex = json::array();
    for (int s = 0; s < 5; ++s)
      ex.push_back({{"summand", s - 2},
                    {"z_exponent", mm.exponents[s].z_exponent},
                    {"log_power", mm.exponents[s].log_power}});
    pj["exponents"] = ex;

    // Consistency with the solver's Dirichlet data.
    double boundary_err = 0.0;
    for (double r : {1e-1, 1e-3, 1e-6}) {
      const auto hb = hitchin::boundary_from_model_metric(sc.data, p.id, r);
      boundary_err = std::max({boundary_err, std::abs(mm.coefficient(-2, r) / hb.first - 1.0),
                               std::abs(mm.coefficient(-1, r) / hb.second - 1.0)});
    }
    pj["boundary_consistency"] = boundary_err;
    add(checks, "model", "puncture " + std::to_string(p.id) + " model vs Dirichlet data",
        boundary_err < 1e-12, boundary_err, 1e-12);

    // sl2 completion of each graded block.
    const auto gr = modelmetric::graded_residue_cyclic(sc.data, p.id);
    double worst = 0.0;
    json blocks = json::array();
    for (size_t b = 0; b < gr.blocks.size(); ++b) {
      const auto wf = modelmetric::weight_filtration(gr.blocks[b]);
      json bj;
      bj["weight"] = gr.weights[b];
      bj["dim"] = wf.dim;
      bj["max_weight"] = wf.max_weight;
      json gd = json::object();
      for (const auto& [r, d] : wf.gr_dim) gd[std::to_string(r)] = d;
      bj["graded_dims"] = gd;
      if (wf.max_weight > 0) {
        const auto tr = modelmetric::sl2_complete(wf.H, gr.blocks[b]);
        const double def = modelmetric::sl2_defect(tr);
        bj["sl2_defect"] = def;
        worst = std::max(worst, def);
      }
      blocks.push_back(bj);
    }
    pj["graded_blocks"] = blocks;
    add(checks, "model", "puncture " + std::to_string(p.id) + " sl2 completion", worst < 1e-10,
        worst, 1e-10);
    j["punctures"].push_back(pj);
  }
  return j;
}

json solve_report(const Scenario& sc, const SolvedScenario& s) {
  const auto& sol = s.solution;
  const auto& d = s.derived;
  const auto region = hitchin::interior_region(sol.mesh);
  const auto ck = hitchin::curvature_check(d, sol, region);
  const auto ui = hitchin::u_identity_residual(d, sol, region);
  const auto qi = hitchin::quasi_isometry_check(d);
  json j;
  j["scenario"] = sc.name;
  j["n"] = sol.mesh.n();
  j["h"] = sol.mesh.h;
  j["iterations"] = sol.iterations;
  j["picard_steps"] = sol.picard_steps;
  j["residual_sup"] = sol.residual_sup;
  j["boundary_source"] = sol.boundary_source;
  j["background"] = sol.background ? sol.background->name : "none";
  j["interior"] = {{"t_min", sol.mesh.t[region.first]}, {"t_max", sol.mesh.t[region.second]}};
  j["continuous_residual"] = hitchin::continuous_residual(d, region);
  j["gap"] = hitchin::gap_verify(d, region);
  j["sup_u"] = hitchin::sup_u(d, region);
  j["min_K"] = ck.min_k;
  j["argmin_K_t"] = ck.argmin_t;
  j["K_lower_bound"] = ck.lower_bound;
  j["K_agreement"] = ck.agreement;
  j["u_identity"] = {{"applicable", ui.applicable},
                     {"sup", ui.sup},
                     {"excluded", ui.excluded},
                     {"sign_mismatches", ui.sign_mismatches}};
  j["ratio_bounds"] = {{"sup", qi.sup_ratio},
                       {"inf", qi.inf_ratio},
                       {"constant", qi.constant},
                       {"at_r_min", qi.ratio_at_rmin}};
  if (sc.exact_reference == "fuchsian") {
    double err = 0.0;
    const double b2 = std::norm(sc.data.beta.coeff);
    for (int i = 0; i < sol.mesh.n(); ++i) {
      const auto ex = hitchin::fuchsian_log_metric(b2, sol.mesh.t[i]);
      err = std::max({err, std::abs(sol.x[i] - ex.first), std::abs(sol.y[i] - ex.second)});
    }
    j["exact_sup_error"] = err;
  }
  return j;
}

json transport_report(const Scenario& sc, const SolvedScenario& s, std::uint64_t seed,
                      std::vector<Check>* checks) {
  const auto coeffs = scenario::coefficients(sc);
  const MetricField& field = *s.field;
  json j;
  j["scenario"] = sc.name;
  if (sc.loop) {
    const int n = s.solution.mesh.n();
    const int sub = std::max(1, sc.loop->substeps * n / sc.refinement.base_n);
    const auto loop = transport::square_loop(sc.loop->centre, sc.loop->side, sc.loop->per_edge);
    const auto tr = transport::parallel_transport(loop, field, coeffs, sub);
    j["loop"] = {{"substeps", sub},
                 {"holonomy_residual", loop_residual(sc, field, sub)},
                 {"gram_residual", tr.membership.gram_residual},
                 {"det_residual", tr.membership.det_residual}};
  }
  if (sc.radial) {
    const auto& rs = *sc.radial;
    const double r1 = std::tanh(std::atanh(rs.from_r) + 0.5 * rs.length_hyp);
    if (!(r1 <= sc.mesh.r_max) || !(rs.from_r >= sc.mesh.r_min))
      throw PreconditionError("transport.radial: geodesic leaves the solved annulus");
    const auto path = hypgeom::radial_geodesic(rs.from_r, r1, rs.samples);
    const auto tr = transport::parallel_transport(path, field, coeffs, rs.substeps);
    std::vector<cplx> back(path.rbegin(), path.rend());
    const auto trb = transport::parallel_transport(back, field, coeffs, rs.substeps);

    std::mt19937_64 rng(seed);
    double worst_abs = 0.0, worst_gram = 0.0, worst_rel = 0.0, min_v1 = 1e300, min_gap = 1e300;
    json probes = json::array();
    Mat5 ext_matrix = Mat5::Identity();
    for (int k = 0; k < rs.probes; ++k) {
      const Vec5 v0 = random_q_unit(rng);
      const auto ext = transport::conservation_probe_extended(path, v0, field, coeffs, rs.substeps);
      const auto dbl = transport::conservation_probe(path, v0, field, coeffs, rs.substeps);
      worst_abs = std::max(worst_abs, ext.max_abs_deviation);
      worst_gram = std::max(worst_gram, ext.gram_residual);
      worst_rel = std::max(worst_rel, dbl.max_rel_deviation);
      min_v1 = std::min(min_v1, dbl.min_v1);
      min_gap = std::min(min_gap, dbl.min_v1_minus_v2);
      if (k == 0) ext_matrix = ext.matrix;
      probes.push_back({{"extended_abs_deviation", ext.max_abs_deviation},
                        {"double_abs_deviation", dbl.max_abs_deviation},
                        {"double_rel_deviation", dbl.max_rel_deviation}});
    }
    const auto mu_ext = liegroup::cartan_projection(ext_matrix);
    const double inv_dev = std::max(std::abs(tr.cartan.mu1 - trb.cartan.mu1),
                                    std::abs(tr.cartan.mu2 - trb.cartan.mu2));
    j["radial"] = {{"from_r", rs.from_r},
                   {"to_r", r1},
                   {"length_hyp", hypgeom::hyp_distance(path.front(), path.back())},
                   {"mu1", tr.cartan.mu1},
                   {"mu2", tr.cartan.mu2},
                   {"mu1_extended", mu_ext.mu1},
                   {"mu2_extended", mu_ext.mu2},
                   {"inverse_path_mu_deviation", inv_dev},
                   {"relative_gram_double", tr.relative_gram},
                   {"gram_residual_double", tr.membership.gram_residual},
                   {"gram_residual_extended", worst_gram},
                   {"conservation_extended", worst_abs},
                   {"conservation_relative_double", worst_rel},
                   {"min_v1", min_v1},
                   {"min_v1_minus_v2", min_gap},
                   {"probes", probes}};
    const double tol_sig = sc.tol.signature, tol_q = sc.tol.conservation;
    add(checks, "transport", "signature preserved at length " + fmt_double(rs.length_hyp),
        worst_gram <= tol_sig, worst_gram, tol_sig);
    add(checks, "transport", "conservation along radial geodesics", worst_abs <= tol_q, worst_abs,
        tol_q);
    add(checks, "transport", "||v1|| >= 1/sqrt2 along sections",
        min_v1 >= 1.0 / std::sqrt(2.0) - tol_q, min_v1, 1.0 / std::sqrt(2.0));
    add(checks, "transport", "||v1|| >= ||v2|| along sections", min_gap >= -tol_q, min_gap, 0.0);
    add(checks, "transport", "mu of inverse path", inv_dev <= 1e-8 * std::max(1.0, tr.cartan.mu1),
        inv_dev, 1e-8 * std::max(1.0, tr.cartan.mu1));
  }
  return j;
}

json dominate_report(const Scenario& sc, const SolvedScenario& s, std::vector<Check>* checks,
                     const std::string& out_dir) {
  if (!sc.morse) throw PreconditionError("scenario " + sc.name + " has no morse block");
  const auto& ms = *sc.morse;
  const auto coeffs = scenario::coefficients(sc);
  const MetricField& field = *s.field;
  const Chart& chart = field.chart();
  const auto& mesh = s.solution.mesh;
  const Vec5 v0 = Vec5::Unit(0);  // e1: w_4 = 0 at the base, so the base is the minimum
  json j;
  j["scenario"] = sc.name;

  // Sections along the ray family.
  const auto traces = anosov::ray_traces(ms.rays, v0, field, coeffs);
  const auto angles = anosov::ray_angles(ms.rays);
  double cons_rel = 0.0, t_lo = 1e300, t_hi = -1e300;
  for (const auto& tr : traces) {
    cons_rel = std::max(cons_rel, tr.max_conservation_rel);
    for (const auto& p : tr.path) {
      t_lo = std::min(t_lo, chart.t_of(p));
      t_hi = std::max(t_hi, chart.t_of(p));
    }
  }
  {
    CsvWriter csv(out_dir, "traces.csv", {"direction", "phi", "d", "f", "grad_norm"});
    const int stride = ms.rays.chords_per_length;
    for (size_t a = 0; a < traces.size(); ++a)
      for (size_t k = 0; k < traces[a].f.size(); k += stride)
        csv.row({static_cast<double>(a), angles[a], traces[a].distance[k], traces[a].f[k],
                 traces[a].grad_norm[k]});
  }

  // Gap measured on the node range the rays visit.
  auto lo = std::lower_bound(mesh.t.begin(), mesh.t.end(), t_lo) - mesh.t.begin();
  auto hi = std::upper_bound(mesh.t.begin(), mesh.t.end(), t_hi) - mesh.t.begin();
  const std::pair<int, int> region{std::max<int>(2, static_cast<int>(lo) - 1),
                                   std::min<int>(mesh.n() - 3, static_cast<int>(hi))};
  const double gap = hitchin::gap_verify(s.derived, region);
  const auto sc_rep = anosov::s_conditions_check(traces, gap, mesh.t[region.first],
                                                 mesh.t[region.second], chart);
  j["rays"] = {{"directions", ms.rays.directions},
               {"d_max", ms.rays.d_max},
               {"t_range", {t_lo, t_hi}},
               {"conservation_relative", cons_rel}};
  j["gap_on_rays"] = gap;
  j["s_conditions"] = {{"points", sc_rep.points},
                       {"trivial_points", sc_rep.trivial_points},
                       {"chain_ok", sc_rep.chain_ok},
                       {"chain_points", sc_rep.chain_points},
                       {"min_chain_margin", jnum(sc_rep.min_chain_margin)},
                       {"local_chain_ok", sc_rep.local_chain_ok},
                       {"min_local_margin", jnum(sc_rep.min_local_margin)},
                       {"c", jnum(sc_rep.c)},
                       {"c_prime", jnum(sc_rep.c_prime)},
                       {"inf_v1_over_v2", jnum(sc_rep.inf_v1_over_v2)},
                       {"c_consistent", sc_rep.c_consistent}};
  add(checks, "morse", "gap on the ray region", gap > 0.0, gap, 0.0);
  add(checks, "morse", "chain inequality with the measured gap",
      sc_rep.chain_ok && sc_rep.chain_points > 0, sc_rep.min_chain_margin, 1.0);
  add(checks, "morse", "chain inequality with the local gap", sc_rep.local_chain_ok,
      sc_rep.min_local_margin, 1.0);
  add(checks, "morse", "c > 0 and c' > 0", sc_rep.c > 0.0 && sc_rep.c_prime > 0.0,
      std::min(sc_rep.c, sc_rep.c_prime), 0.0);
  add(checks, "morse", "c consistent with gap * inf ||v1||/||v2||", sc_rep.c_consistent, sc_rep.c,
      std::sqrt(2.0) * gap * sc_rep.inf_v1_over_v2);

  // Gradient closed form against finite differences on three rays.
  double fd_err = 0.0;
  {
    anosov::TraceOptions to;
    to.substeps = ms.rays.substeps;
    to.fd_check = true;
    to.fd_fraction = ms.fd_fraction;
    for (double phi : {angles.front(), angles[angles.size() / 2], angles.back()}) {
      const auto tr = anosov::trace_section(v0, anosov::ray_path(chart, ms.rays, phi), field,
                                            coeffs, to);
      fd_err = std::max(fd_err, tr.max_fd_rel_error);
    }
  }
  j["gradient_fd_rel_error"] = fd_err;
  add(checks, "morse", "gradient closed form vs finite differences",
      fd_err <= sc.tol.fd_gradient_rel, fd_err, sc.tol.fd_gradient_rel);

  // Gradient flow from several starts.
  anosov::FlowOptions fo;
  fo.grad_tol = ms.flow.grad_tol;
  fo.f_tol = ms.flow.f_tol;
  fo.max_hyp_step = ms.flow.max_hyp_step;
  std::vector<cplx> starts;
  for (int k = 0; k < ms.flow.starts; ++k)
    starts.push_back(chart.geodesic_point(
        ms.base, 2.0 * M_PI * k / ms.flow.starts + M_PI / ms.flow.starts, ms.flow.start_distance_hyp));
  const auto uq = anosov::flow_uniqueness(ms.base, v0, starts, field, coeffs, fo);
  bool all_conv = true, monotone = true, spurious = false;
  json runs = json::array();
  for (const auto& r : uq.runs) {
    all_conv = all_conv && r.converged;
    monotone = monotone && r.monotone;
    spurious = spurious || r.spurious_critical;
    runs.push_back({{"end", {r.end.real(), r.end.imag()}},
                    {"steps", r.steps},
                    {"rejected", r.rejected},
                    {"converged", r.converged},
                    {"exited_chart", r.exited_chart},
                    {"final_f", r.final_f},
                    {"final_grad", r.final_grad},
                    {"length", r.length},
                    {"start_distance_to_end", chart.distance(r.trajectory.front(), r.end)}});
  }
  anosov::FlowOptions fn = fo;
  fn.normalized = true;
  const auto rn = anosov::flow_descend(starts.front(),
                                       anosov::section_at(ms.base, v0, starts.front(), field, coeffs),
                                       field, coeffs, fn);
  const double spread_cells = uq.cell > 0.0 ? uq.spread / uq.cell : 0.0;
  j["flow"] = {{"runs", runs},
               {"spread", uq.spread},
               {"cell", uq.cell},
               {"spread_cells", spread_cells},
               {"normalized", {{"converged", rn.converged}, {"steps", rn.steps}, {"final_f", rn.final_f}}}};
  add(checks, "morse", "flow converges from every start", all_conv, uq.runs.size(), 0.0);
  add(checks, "morse", "f non-increasing along the flow", monotone, 0.0, 0.0);
  add(checks, "morse", "critical points only at f = 0", !spurious, 0.0, 0.0);
  add(checks, "morse", "flow endpoints coincide (mesh cells)",
      all_conv && spread_cells <= sc.tol.flow_cells, spread_cells, sc.tol.flow_cells);
  add(checks, "morse", "normalized flow converges", rn.converged, rn.final_f, fo.f_tol);

  // Hessian at the minimum.
  const auto hr = anosov::hessian_nondegeneracy(uq.runs.front().end, uq.runs.front().w_end, field,
                                                coeffs);
  j["hessian"] = {{"s", {hr.s.real(), hr.s.imag()}},
                  {"t", {hr.t.real(), hr.t.imag()}},
                  {"det", hr.det},
                  {"det_formula", hr.det_formula},
                  {"det_fd", hr.det_fd},
                  {"rel_error", hr.rel_error},
                  {"entry_rel_error", hr.entry_rel_error},
                  {"gap_violation", hr.gap_violation}};
  add(checks, "morse", "Hessian determinant positive", hr.det_fd > 0.0 && hr.det > 0.0, hr.det_fd, 0.0);
  add(checks, "morse", "Hessian determinant vs closed form", hr.rel_error <= sc.tol.hessian_rel,
      hr.rel_error, sc.tol.hessian_rel);
  add(checks, "morse", "|s| > |t| at the minimum", !hr.gap_violation, std::abs(hr.s) - std::abs(hr.t), 0.0);

  // Exponential growth.
  const auto gf = anosov::growth_fit(traces);
  j["growth"] = {{"epsilon", gf.epsilon},
                 {"C", gf.C},
                 {"support", gf.support},
                 {"decades", gf.decades},
                 {"window_fraction", gf.window_fraction},
                 {"conclusive", gf.conclusive},
                 {"verdict", gf.verdict},
                 {"method", gf.method}};
  add(checks, "morse", "growth fit conclusive with eps > 0", gf.conclusive && gf.epsilon > 0.0,
      gf.epsilon, 0.0);
  add(checks, "morse", "growth fit spans two decades", gf.decades >= 2.0, gf.decades, 2.0);

  // Domination.
  const auto dr = anosov::domination_verify(ms.rays, field, coeffs, sc.tol.bound);
  {
    CsvWriter csv(out_dir, "domination.csv",
                  {"direction", "phi", "d", "mu1", "mu2", "alpha1", "alpha2", "f_section", "bound",
                   "f_circle_max"});
    for (const auto& r : dr.records)
      csv.row({static_cast<double>(r.direction), r.phi, r.d, r.mu1, r.mu2, r.alpha1, r.alpha2,
               r.f_section, r.bound, r.f_circle_max});
  }
  j["domination"] = {{"records", dr.records.size()},
                     {"violations", dr.violations},
                     {"circle_exceedances", dr.circle_exceedances},
                     {"max_bound_ratio", dr.max_bound_ratio},
                     {"max_relative_gram", dr.max_relative_gram},
                     {"epsilon", dr.fit.epsilon},
                     {"C", dr.fit.C},
                     {"support", dr.fit.support},
                     {"complete", dr.complete},
                     {"increasing", dr.increasing},
                     {"error", dr.error}};
  const int sampled = ms.rays.directions * ms.rays.lengths;
  add(checks, "morse", "domination family complete", dr.complete && dr.increasing,
      static_cast<double>(dr.records.size()), sampled);
  add(checks, "morse", "section bound never violated", dr.complete && dr.violations == 0,
      dr.violations, 0.0, std::to_string(sampled) + " section vectors");
  add(checks, "morse", "domination fit eps > 0", dr.fit.epsilon > 0.0, dr.fit.epsilon, 0.0);
  return j;
}

std::vector<Check> verify_all(const Scenario& sc, const RunOptions& opt, json& report) {
  std::vector<Check> checks;
  report = json::object();
  report["scenario"] = sc.name;
  report["stability"] = stability_report(sc, &checks);
  bool modelled = false;
  for (const auto& p : sc.data.punctures) modelled = modelled || p.zeta != 0.0;
  if (modelled) report["model_metric"] = model_metric_report(sc, &checks);
  if (!sc.has_solve) return checks;

  // Refinement ladder.
  std::vector<double> cres, uid, kag, loops;
  json ladder = json::array();
  int max_iter = 0;
  for (int k = 0; k < sc.refinement.levels; ++k) {
    const int n = sc.refinement.base_n * opt.refine << k;
    const auto s = solve_scenario(sc, n);
    const auto region = hitchin::interior_region(s.solution.mesh);
    const auto ui = hitchin::u_identity_residual(s.derived, s.solution, region);
    const auto ck = hitchin::curvature_check(s.derived, s.solution, region);
    cres.push_back(hitchin::continuous_residual(s.derived, region));
    uid.push_back(ui.sup);
    kag.push_back(ck.agreement);
    max_iter = std::max(max_iter, s.solution.iterations);
    json lj = {{"n", n},
               {"iterations", s.solution.iterations},
               {"continuous_residual", cres.back()},
               {"u_identity", ui.sup},
               {"K_agreement", ck.agreement}};
    if (sc.loop) {
      loops.push_back(loop_residual(sc, *s.field, sc.loop->substeps << k));
      lj["loop_holonomy"] = loops.back();
    }
    ladder.push_back(lj);
  }
  report["ladder"] = ladder;
  report["ladder_orders"] = {{"continuous_residual", orders(cres)},
                             {"u_identity", orders(uid)},
                             {"K_agreement", orders(kag)},
                             {"loop_holonomy", orders(loops)}};
  const double mo = sc.tol.min_order;
  add(&checks, "solver", "continuous residual order", min_order(cres) >= mo, min_order(cres), mo);

  const auto s = solve_scenario(sc, production_n(sc, opt));
  const json sj = solve_report(sc, s);
  report["solve"] = sj;
  max_iter = std::max(max_iter, s.solution.iterations);
  add(&checks, "solver", "Newton iterations", max_iter <= sc.tol.newton_iterations, max_iter,
      sc.tol.newton_iterations);
  add(&checks, "solver", "discrete residual", s.solution.residual_sup <= sc.solver.accept_tol,
      s.solution.residual_sup, sc.solver.accept_tol);
  if (sc.exact_reference == "fuchsian") {
    const double e = sj["exact_sup_error"].get<double>();
    add(&checks, "solver", "exact solution sup error", e < *sc.tol.exact_sup_error, e,
        *sc.tol.exact_sup_error);
  }

  if (expects_stable(sc)) {
    const double su = sj["sup_u"].get<double>(), gap = sj["gap"].get<double>();
    add(&checks, "gap", "interior sup u", su <= 1.0 - sc.tol.u_margin, su, 1.0 - sc.tol.u_margin);
    add(&checks, "gap", "interior gap positive", gap > 0.0, gap, 0.0);
    const double mk = sj["min_K"].get<double>(), lb = sj["K_lower_bound"].get<double>();
    add(&checks, "gap", "curvature lower bound", mk >= lb, mk, lb);
    const bool uid_applicable = sj["u_identity"]["applicable"].get<bool>();
    if (uid_applicable)
      add(&checks, "gap", "u identity order", min_order(uid) >= mo, min_order(uid), mo);
    add(&checks, "gap", "curvature formulas agreement order", min_order(kag) >= mo,
        min_order(kag), mo);
  }

  if (sc.loop)
    add(&checks, "transport", "loop holonomy order", min_order(loops) >= mo, min_order(loops), mo);
  if (sc.loop || sc.radial)
    report["transport"] = transport_report(sc, s, opt.seed.value_or(sc.seed), &checks);
  if (sc.morse) report["dominate"] = dominate_report(sc, s, &checks);
  return checks;
}

namespace {

void write_fields_csv(const std::string& dir, const SolvedScenario& s) {
  CsvWriter csv(dir, "fields.csv", {"r", "H_m2", "H_m1", "u", "tau_norm", "gamma_norm", "K"});
  const auto& sol = s.solution;
  for (int i = 0; i < sol.mesh.n(); ++i)
    csv.row({sol.mesh.r(i), sol.H_m2(i), sol.H_m1(i), s.derived.u[i], s.derived.tau_norm[i],
             s.derived.gamma_norm[i], s.derived.curvature[i]});
}

void write_model_table(const std::string& dir, const Scenario& sc) {
  CsvWriter csv(dir, "model_metric.csv", {"puncture", "r", "H_m2", "H_m1", "H_0", "H_1", "H_2"});
  for (const auto& p : sc.data.punctures) {
    if (p.zeta == 0.0) continue;
    const auto mm = modelmetric::model_metric_local(sc.data, p.id);
    for (int k = 1; k <= 12; ++k) {
      const double r = std::pow(10.0, -k);
      csv.row({static_cast<double>(p.id), r, mm.coefficient(-2, r), mm.coefficient(-1, r),
               mm.coefficient(0, r), mm.coefficient(1, r), mm.coefficient(2, r)});
    }
  }
}

void write_radial_trace(const std::string& dir, const Scenario& sc, const SolvedScenario& s,
                        std::uint64_t seed) {
  if (!sc.radial || dir.empty()) return;
  const auto& rs = *sc.radial;
  const double r1 = std::tanh(std::atanh(rs.from_r) + 0.5 * rs.length_hyp);
  const auto path = hypgeom::radial_geodesic(rs.from_r, r1, rs.samples);
  std::mt19937_64 rng(seed);
  const Vec5 v0 = random_q_unit(rng);
  const auto tr = anosov::trace_section(v0, path, *s.field, scenario::coefficients(sc),
                                        anosov::TraceOptions{rs.substeps, false, 1e-4});
  CsvWriter csv(dir, "radial_trace.csv", {"r", "d", "f", "grad_norm", "Q", "tau_norm", "gamma_norm"});
  for (size_t k = 0; k < path.size(); ++k)
    csv.row({std::abs(path[k]), tr.distance[k], tr.f[k], tr.grad_norm[k], tr.conservation[k],
             tr.tau_norm[k], tr.gamma_norm[k]});
}

int status(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return 1;
  return 0;
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"group", c.group},
                 {"name", c.name},
                 {"pass", c.pass},
                 {"value", jnum(c.value)},
                 {"threshold", jnum(c.threshold)},
                 {"detail", c.detail}});
  return a;
}

void print_checks(std::ostream& out, const std::vector<Check>& checks) {
  for (const auto& c : checks)
    out << (c.pass ? "PASS " : "FAIL ") << c.group << ": " << c.name << " (value "
        << fmt_double(c.value) << ", threshold " << fmt_double(c.threshold) << ")"
        << (c.detail.empty() ? "" : " " + c.detail) << '\n';
}

}  // namespace

int run(const std::string& sub, const Scenario& sc, const RunOptions& opt, std::ostream& out) {
  if (opt.refine < 1) throw InvalidInput("--refine must be a positive integer");
  const std::uint64_t seed = opt.seed.value_or(sc.seed);
  std::vector<Check> checks;
  if (sub == "stability") {
    json j = stability_report(sc, &checks);
    j["checks"] = checks_json(checks);
    write_json(opt.out_dir, "stability.json", j);
    out << j.dump(2) << '\n';
    return status(checks);
  }
  if (sub == "model-metric") {
    json j = model_metric_report(sc, &checks);
    j["checks"] = checks_json(checks);
    write_json(opt.out_dir, "model_metric.json", j);
    write_model_table(opt.out_dir, sc);
    out << j.dump(2) << '\n';
    return status(checks);
  }
  if (sub == "solve") {
    const auto s = solve_scenario(sc, production_n(sc, opt));
    const json j = solve_report(sc, s);
    write_fields_csv(opt.out_dir, s);
    write_json(opt.out_dir, "summary.json", j);
    out << j.dump(2) << '\n';
    return 0;
  }
  if (sub == "transport") {
    if (!sc.loop && !sc.radial) throw PreconditionError("scenario has no transport block");
    const auto s = solve_scenario(sc, production_n(sc, opt));
    json j = transport_report(sc, s, seed, &checks);
    j["checks"] = checks_json(checks);
    write_json(opt.out_dir, "transport.json", j);
    write_radial_trace(opt.out_dir, sc, s, seed);
    out << j.dump(2) << '\n';
    return status(checks);
  }
  if (sub == "dominate") {
    const auto s = solve_scenario(sc, production_n(sc, opt));
    json j = dominate_report(sc, s, &checks, opt.out_dir);
    j["checks"] = checks_json(checks);
    write_json(opt.out_dir, "dominate.json", j);
    out << j.dump(2) << '\n';
    return status(checks);
  }
  if (sub == "verify-all") {
    json report;
    checks = verify_all(sc, opt, report);
    report["checks"] = checks_json(checks);
    report["all_pass"] = status(checks) == 0;
    write_json(opt.out_dir, "verify.json", report);
    print_checks(out, checks);
    return status(checks);
  }
  throw InvalidInput("unknown subcommand '" + sub + "'");
}

}  // namespace higgslab::pipeline
