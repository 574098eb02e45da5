#pragma once
// Scenario files: JSON documents with every tolerance stated explicitly.
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "higgslab/anosov.hpp"
#include "higgslab/bundle.hpp"
#include "higgslab/hitchin.hpp"

namespace higgslab::scenario {

// Schema violations (exit status 2 in the CLI).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MeshSpec {
  double r_min = 0.0, r_max = 0.0;
  int n = 0;
};

struct SolverSpec {
  double tol = 0.0, accept_tol = 0.0;
  int max_iter = 0;
};

struct RefinementSpec {
  int base_n = 0;
  int levels = 0;
};

struct LoopSpec {
  cplx centre{0.0, 0.0};
  double side = 0.0;
  int per_edge = 0;
  int substeps = 0;  // at the base refinement level; doubled with n
};

struct RadialSpec {
  double from_r = 0.0;
  double length_hyp = 0.0;
  int samples = 0;
  int substeps = 0;
  int probes = 0;  // random Q-unit start vectors
};

struct FlowSpec {
  int starts = 0;
  double start_distance_hyp = 0.0;
  double max_hyp_step = 0.0;
  double grad_tol = 0.0;
  double f_tol = 0.0;
};

struct MorseSpec {
  cplx base{0.0, 0.0};
  anosov::RayFamily rays;
  FlowSpec flow;
  double fd_fraction = 0.0;
};

// Thresholds used by verify-all.
struct Tolerances {
  double min_order = 0.0;
  double u_margin = 0.0;
  int newton_iterations = 0;
  double signature = 0.0;
  double conservation = 0.0;
  double fd_gradient_rel = 0.0;
  double hessian_rel = 0.0;
  double bound = 0.0;
  double flow_cells = 0.0;
  std::optional<double> exact_sup_error;  // only with an exact reference
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  bundle::CyclicHiggsData data;
  std::string expect_stability;
  // Solve-related blocks; absent for algebra-only scenarios.
  bool has_solve = false;
  ChartKind chart = ChartKind::disk;
  int chart_puncture = -1;
  MeshSpec mesh;
  std::string boundary;    // "fuchsian" | "model"
  std::string background;  // "none" | "fuchsian"
  SolverSpec solver;
  RefinementSpec refinement;
  std::optional<LoopSpec> loop;
  std::optional<RadialSpec> radial;
  std::optional<MorseSpec> morse;
  Tolerances tol;
  std::string exact_reference;  // "fuchsian" or empty
};

// Applies dotted-path overrides ("solver.tol=1e-9") to the raw document.
void apply_overrides(nlohmann::json& doc, const std::map<std::string, std::string>& overrides);

Scenario parse(const nlohmann::json& doc);
Scenario load(const std::string& path, const std::map<std::string, std::string>& overrides = {});

hitchin::HiggsCoefficients coefficients(const Scenario& sc);
hitchin::RadialMesh make_mesh(const Scenario& sc, int n);
hitchin::DirichletData dirichlet(const Scenario& sc, const hitchin::RadialMesh& mesh);
std::optional<hitchin::Background> background(const Scenario& sc, const hitchin::RadialMesh& mesh);
hitchin::SolverOptions solver_options(const Scenario& sc, const hitchin::RadialMesh& mesh);

}  // namespace higgslab::scenario
