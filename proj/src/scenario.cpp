#include "higgslab/scenario.hpp"

#include <fstream>
#include <sstream>

#include "higgslab/errors.hpp"

namespace higgslab::scenario {

using nlohmann::json;

namespace {

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + "." + key + ": missing");
  return *it;
}

double num(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw SchemaError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw SchemaError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string str(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw SchemaError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

bool boolean(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_boolean()) throw SchemaError(where + "." + key + ": expected true/false");
  return v.get<bool>();
}

cplx point(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw SchemaError(where + "." + key + ": expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

void positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw SchemaError(what + ": must be positive");
}
void positive(int v, const std::string& what) {
  if (v <= 0) throw SchemaError(what + ": must be positive");
}

bundle::PowerCoefficient coefficient(const json& obj, const std::string& where) {
  bundle::PowerCoefficient pc;
  pc.coeff = {num(obj, "re", where), num(obj, "im", where)};
  pc.power = integer(obj, "power", where);
  return pc;
}

bundle::CyclicHiggsData parse_bundle(const json& b) {
  const std::string w = "bundle";
  bundle::CyclicHiggsData d;
  d.genus = integer(b, "genus", w);
  d.deg_L1 = integer(b, "deg_L1", w);
  d.tau_normalized = boolean(b, "tau_normalized", w);
  const json& ps = field(b, "punctures", w);
  if (!ps.is_array()) throw SchemaError("bundle.punctures: expected an array");
  for (size_t k = 0; k < ps.size(); ++k) {
    const std::string pw = "bundle.punctures[" + std::to_string(k) + "]";
    bundle::PunctureData p;
    p.id = integer(ps[k], "id", pw);
    p.zeta = num(ps[k], "zeta", pw);
    try {
      p.flag = bundle::flag_from_string(str(ps[k], "flag", pw));
    } catch (const InvalidInput& e) {
      throw SchemaError(pw + ".flag: " + e.what());
    }
    for (const auto& q : d.punctures)
      if (q.id == p.id) throw SchemaError(pw + ".id: duplicate puncture id");
    d.punctures.push_back(p);
  }
  d.beta = coefficient(field(b, "beta", w), "bundle.beta");
  d.gamma = coefficient(field(b, "gamma", w), "bundle.gamma");
  const auto a = bundle::check_assumption_A(d);
  if (!a.ok) throw SchemaError("assumption A violated: " + a.clause);
  return d;
}

Tolerances parse_tolerances(const json& t, bool with_morse) {
  const std::string w = "tolerances";
  Tolerances tol;
  tol.min_order = num(t, "min_order", w);
  tol.u_margin = num(t, "u_margin", w);
  tol.newton_iterations = integer(t, "newton_iterations", w);
  tol.signature = num(t, "signature", w);
  tol.conservation = num(t, "conservation", w);
  if (with_morse) {
    tol.fd_gradient_rel = num(t, "fd_gradient_rel", w);
    tol.hessian_rel = num(t, "hessian_rel", w);
    tol.bound = num(t, "bound", w);
    tol.flow_cells = num(t, "flow_cells", w);
  }
  if (t.contains("exact_sup_error")) tol.exact_sup_error = num(t, "exact_sup_error", w);
  return tol;
}

void parse_solve(const json& doc, Scenario& sc) {
  const json& ch = field(doc, "chart", "scenario");
  const std::string kind = str(ch, "kind", "chart");
  if (kind == "disk") {
    sc.chart = ChartKind::disk;
  } else if (kind == "cusp") {
    sc.chart = ChartKind::cusp;
    sc.chart_puncture = integer(ch, "puncture", "chart");
    bool found = false;
    for (const auto& p : sc.data.punctures) found = found || p.id == sc.chart_puncture;
    if (!found) throw SchemaError("chart.puncture: no such puncture");
  } else {
    throw SchemaError("chart.kind: expected \"disk\" or \"cusp\"");
  }

  const json& m = field(doc, "mesh", "scenario");
  sc.mesh.r_min = num(m, "r_min", "mesh");
  sc.mesh.r_max = num(m, "r_max", "mesh");
  sc.mesh.n = integer(m, "n", "mesh");
  if (!(sc.mesh.r_min > 0.0 && sc.mesh.r_min < sc.mesh.r_max && sc.mesh.r_max < 1.0))
    throw SchemaError("mesh: need 0 < r_min < r_max < 1");
  if (sc.mesh.n < 16) throw SchemaError("mesh.n: need at least 16 nodes");

  sc.boundary = str(doc, "boundary", "scenario");
  if (sc.boundary != "fuchsian" && sc.boundary != "model")
    throw SchemaError("boundary: expected \"fuchsian\" or \"model\"");
  if (sc.boundary == "model" && sc.chart != ChartKind::cusp)
    throw SchemaError("boundary: model data needs a cusp chart");
  if (sc.boundary == "fuchsian" && sc.chart != ChartKind::disk)
    throw SchemaError("boundary: fuchsian data needs the disk chart");
  sc.background = str(doc, "background", "scenario");
  if (sc.background != "none" && sc.background != "fuchsian")
    throw SchemaError("background: expected \"none\" or \"fuchsian\"");
  if (sc.background == "fuchsian" && sc.chart != ChartKind::disk)
    throw SchemaError("background: fuchsian background needs the disk chart");

  const json& s = field(doc, "solver", "scenario");
  sc.solver.tol = num(s, "tol", "solver");
  sc.solver.accept_tol = num(s, "accept_tol", "solver");
  sc.solver.max_iter = integer(s, "max_iter", "solver");
  positive(sc.solver.tol, "solver.tol");
  positive(sc.solver.accept_tol, "solver.accept_tol");
  positive(sc.solver.max_iter, "solver.max_iter");

  const json& r = field(doc, "refinement", "scenario");
  sc.refinement.base_n = integer(r, "base_n", "refinement");
  sc.refinement.levels = integer(r, "levels", "refinement");
  if (sc.refinement.base_n < 16) throw SchemaError("refinement.base_n: need at least 16 nodes");
  if (sc.refinement.levels < 3) throw SchemaError("refinement.levels: need at least 3 levels");

  if (doc.contains("transport")) {
    const json& t = doc["transport"];
    if (t.contains("loop")) {
      const json& l = t["loop"];
      LoopSpec ls;
      ls.centre = point(l, "centre", "transport.loop");
      ls.side = num(l, "side", "transport.loop");
      ls.per_edge = integer(l, "per_edge", "transport.loop");
      ls.substeps = integer(l, "substeps", "transport.loop");
      positive(ls.side, "transport.loop.side");
      positive(ls.per_edge, "transport.loop.per_edge");
      positive(ls.substeps, "transport.loop.substeps");
      sc.loop = ls;
    }
    if (t.contains("radial")) {
      const json& l = t["radial"];
      RadialSpec rs;
      rs.from_r = num(l, "from_r", "transport.radial");
      rs.length_hyp = num(l, "length_hyp", "transport.radial");
      rs.samples = integer(l, "samples", "transport.radial");
      rs.substeps = integer(l, "substeps", "transport.radial");
      rs.probes = integer(l, "probes", "transport.radial");
      positive(rs.length_hyp, "transport.radial.length_hyp");
      if (rs.samples < 2) throw SchemaError("transport.radial.samples: need at least 2");
      positive(rs.substeps, "transport.radial.substeps");
      positive(rs.probes, "transport.radial.probes");
      if (sc.chart != ChartKind::disk) throw SchemaError("transport.radial: disk chart only");
      sc.radial = rs;
    }
  }

  if (doc.contains("morse")) {
    const json& mo = doc["morse"];
    MorseSpec ms;
    ms.base = point(mo, "base", "morse");
    const json& ry = field(mo, "rays", "morse");
    const std::string rw = "morse.rays";
    ms.rays.base = ms.base;
    ms.rays.phi_min = num(ry, "phi_min_rad", rw);
    ms.rays.phi_max = num(ry, "phi_max_rad", rw);
    ms.rays.directions = integer(ry, "directions", rw);
    ms.rays.lengths = integer(ry, "lengths", rw);
    ms.rays.d_max = num(ry, "d_max_hyp", rw);
    ms.rays.chords_per_length = integer(ry, "chords_per_length", rw);
    ms.rays.substeps = integer(ry, "substeps", rw);
    positive(ms.rays.directions, rw + ".directions");
    positive(ms.rays.lengths, rw + ".lengths");
    positive(ms.rays.d_max, rw + ".d_max_hyp");
    positive(ms.rays.chords_per_length, rw + ".chords_per_length");
    positive(ms.rays.substeps, rw + ".substeps");
    if (!(ms.rays.phi_max >= ms.rays.phi_min)) throw SchemaError(rw + ": phi_max_rad < phi_min_rad");
    const json& fl = field(mo, "flow", "morse");
    const std::string fw = "morse.flow";
    ms.flow.starts = integer(fl, "starts", fw);
    ms.flow.start_distance_hyp = num(fl, "start_distance_hyp", fw);
    ms.flow.max_hyp_step = num(fl, "max_hyp_step", fw);
    ms.flow.grad_tol = num(fl, "grad_tol", fw);
    ms.flow.f_tol = num(fl, "f_tol", fw);
    positive(ms.flow.starts, fw + ".starts");
    positive(ms.flow.start_distance_hyp, fw + ".start_distance_hyp");
    positive(ms.flow.max_hyp_step, fw + ".max_hyp_step");
    positive(ms.flow.grad_tol, fw + ".grad_tol");
    positive(ms.flow.f_tol, fw + ".f_tol");
    ms.fd_fraction = num(mo, "fd_fraction", "morse");
    positive(ms.fd_fraction, "morse.fd_fraction");
    sc.morse = ms;
  }

  sc.tol = parse_tolerances(field(doc, "tolerances", "scenario"), sc.morse.has_value());
  sc.exact_reference = str(doc, "exact_reference", "scenario");
  if (sc.exact_reference != "none" && sc.exact_reference != "fuchsian")
    throw SchemaError("exact_reference: expected \"none\" or \"fuchsian\"");
  if (sc.exact_reference == "fuchsian") {
    if (sc.chart != ChartKind::disk || !sc.data.gamma.is_zero() || sc.data.beta.power != 0)
      throw SchemaError("exact_reference: fuchsian needs the disk chart, gamma = 0, constant beta");
    if (!sc.tol.exact_sup_error) throw SchemaError("tolerances.exact_sup_error: missing");
  }
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);  // bare strings
  }
}

}  // namespace

void apply_overrides(json& doc, const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) {
    json* node = &doc;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw SchemaError("override: empty key");
    for (const auto& p : parts) {
      if (!node->is_object() || !node->contains(p))
        throw SchemaError("override " + key + ": no such key in the scenario");
      node = &(*node)[p];
    }
    json v = parse_value(value);
    if (node->is_number() != v.is_number() || node->is_string() != v.is_string() ||
        node->is_boolean() != v.is_boolean())
      throw SchemaError("override " + key + ": type differs from the scenario value");
    *node = v;
  }
}

Scenario parse(const json& doc) {
  if (!doc.is_object()) throw SchemaError("scenario: expected a JSON object");
  Scenario sc;
  sc.name = str(doc, "name", "scenario");
  const json& seed = field(doc, "seed", "scenario");
  if (!seed.is_number_unsigned()) throw SchemaError("scenario.seed: expected a non-negative integer");
  sc.seed = seed.get<std::uint64_t>();
  sc.data = parse_bundle(field(doc, "bundle", "scenario"));
  const json& ex = field(doc, "expect", "scenario");
  sc.expect_stability = str(ex, "stability", "expect");
  if (sc.expect_stability != "stable" && sc.expect_stability != "strictly_semistable" &&
      sc.expect_stability != "unstable")
    throw SchemaError("expect.stability: expected stable, strictly_semistable or unstable");
  sc.has_solve = doc.contains("chart");
  if (sc.has_solve) parse_solve(doc, sc);
  return sc;
}

Scenario load(const std::string& path, const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
  }
  apply_overrides(doc, overrides);
  return parse(doc);
}

hitchin::HiggsCoefficients coefficients(const Scenario& sc) {
  hitchin::HiggsCoefficients c;
  c.b = sc.data.beta;
  c.c = sc.data.gamma;
  return c;
}

hitchin::RadialMesh make_mesh(const Scenario& sc, int n) {
  return hitchin::make_mesh(sc.chart, sc.mesh.r_min, sc.mesh.r_max, n, sc.chart_puncture);
}

hitchin::DirichletData dirichlet(const Scenario& sc, const hitchin::RadialMesh& mesh) {
  if (sc.boundary == "fuchsian") return hitchin::fuchsian_dirichlet(std::norm(sc.data.beta.coeff), mesh);
  return hitchin::model_dirichlet(sc.data.puncture(sc.chart_puncture).delta(), mesh);
}

std::optional<hitchin::Background> background(const Scenario& sc, const hitchin::RadialMesh& mesh) {
  if (sc.background != "fuchsian") return std::nullopt;
  return hitchin::fuchsian_background(std::norm(sc.data.beta.coeff), mesh);
}

hitchin::SolverOptions solver_options(const Scenario& sc, const hitchin::RadialMesh& mesh) {
  hitchin::SolverOptions o;
  o.tol = sc.solver.tol;
  o.accept_tol = sc.solver.accept_tol;
  o.max_iter = sc.solver.max_iter;
  o.background = background(sc, mesh);
  return o;
}

}  // namespace higgslab::scenario
