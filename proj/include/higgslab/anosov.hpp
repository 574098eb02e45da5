#pragma once
// Morse theory of f = ||v_2||_h^2 along flat sections, exponential growth and the
// alpha_2 lower bound on Cartan projections of transported frames.
#include <string>
#include <vector>

#include "higgslab/field.hpp"
#include "higgslab/hitchin.hpp"
#include "higgslab/liegroup.hpp"
#include "higgslab/transport.hpp"

namespace higgslab::anosov {

using hitchin::HiggsCoefficients;

// Unitary-frame section helpers. w is indexed L-2..L2; f = |w_4|^2.
double f_value(const CVec5& w);
// Holomorphic derivative d f / d xi of the flat section through (xi, w).
cplx df_dxi(const transport::UnitaryConnection& c, const CVec5& w);
// ||df||_{g_hyp} = 2 |df/dxi| / sqrt(lambda).
double grad_norm(cplx xi, const CVec5& w, const MetricField& field, const HiggsCoefficients& coeffs);

// Transports a single vector along a polyline (RK4, `substeps` per chord).
CVec5 transport_vector(const std::vector<cplx>& path, const CVec5& w0, const MetricField& field,
                       const HiggsCoefficients& coeffs, int substeps,
                       std::vector<CVec5>* history = nullptr);
// Section through (p0, v0) evaluated at target, along the straight chord.
CVec5 section_at(cplx p0, const Vec5& v0, cplx target, const MetricField& field,
                 const HiggsCoefficients& coeffs, int chords = 64);

struct FlatSectionTrace {
  std::vector<cplx> path;
  std::vector<double> distance;        // hyperbolic distance from path[0]
  std::vector<CVec5> unitary;          // h-unitary components
  std::vector<CVec5> components;       // holomorphic frame components v_-2..v_2
  std::vector<double> f, grad_norm;
  std::vector<double> grad_fd;         // empty unless requested
  std::vector<double> conservation;    // Q(v, v) along the trace
  std::vector<double> tau_norm, gamma_norm;
  double max_fd_rel_error = 0.0;
  double max_conservation_rel = 0.0;   // |Q - 1| / max(1, ||v||_h^2)
  double max_conservation_abs = 0.0;
};

struct TraceOptions {
  int substeps = 4;
  bool fd_check = false;
  double fd_fraction = 1e-4;  // FD step as a fraction of the local mesh cell
};
FlatSectionTrace trace_section(const Vec5& v0, const std::vector<cplx>& path,
                               const MetricField& field, const HiggsCoefficients& coeffs,
                               const TraceOptions& opt = {});

struct SConditionReport {
  int points = 0;
  int trivial_points = 0;          // f = 0 within roundoff, both sides vanish
  bool chain_ok = true;            // ||df|| >= sqrt2 * gap * ||v1|| ||v2|| at points in the gap region
  int chain_points = 0;
  double min_chain_margin = 0.0;   // min of ||df|| / (sqrt2 gap ||v1|| ||v2||)
  bool local_chain_ok = true;      // same with the local ||tau|| - ||gamma||
  double min_local_margin = 0.0;
  double c = 0.0;                  // inf ||df|| / f
  double c_prime = 0.0;            // inf ||df|| / sqrt f
  double inf_v1_over_v2 = 0.0;
  bool c_consistent = false;       // c >= sqrt2 * gap * inf(||v1|| / ||v2||)
};
// t_lo/t_hi bound the region where `gap` was measured.
SConditionReport s_conditions_check(const std::vector<FlatSectionTrace>& traces, double gap,
                                    double t_lo, double t_hi, const Chart& chart);

struct HessianReport {
  cplx s{0.0, 0.0}, t{0.0, 0.0};
  Eigen::Matrix2d closed_form;
  double det = 0.0;          // det of closed_form
  double det_formula = 0.0;  // [(s+t)^*(s-t) + (s-t)^*(s+t)]^2
  Eigen::Matrix2d fd;
  double det_fd = 0.0;
  double rel_error = 0.0;    // |det_fd - det_formula| / |det_formula|
  double entry_rel_error = 0.0;
  bool gap_violation = false;  // |s| <= |t|
  double f_at_point = 0.0;
};
// Closed-form coordinate Hessian from s, t (as in the printed matrix).
Eigen::Matrix2d hessian_closed_form(cplx s, cplx t);
double hessian_det_formula(cplx s, cplx t);
HessianReport hessian_nondegeneracy(cplx point, const CVec5& w, const MetricField& field,
                                    const HiggsCoefficients& coeffs, double fd_step = 0.0);

struct FlowOptions {
  bool normalized = false;
  int max_steps = 20000;
  double grad_tol = 1e-10;
  double f_tol = 1e-9;
  double max_hyp_step = 0.05;  // hyperbolic length cap per step
};
struct FlowResult {
  cplx end{0.0, 0.0};
  CVec5 w_end;
  std::vector<cplx> trajectory;
  std::vector<double> f_values;
  int steps = 0;
  int rejected = 0;
  bool converged = false;
  bool exited_chart = false;
  bool spurious_critical = false;  // ||df|| < tol with f >= f_tol
  bool monotone = true;
  double length = 0.0;             // hyperbolic length of the trajectory
  double final_grad = 0.0;
  double final_f = 0.0;
};
FlowResult flow_descend(cplx start, const CVec5& w_start, const MetricField& field,
                        const HiggsCoefficients& coeffs, const FlowOptions& opt = {});

struct UniquenessReport {
  std::vector<FlowResult> runs;
  double spread = 0.0;       // max pairwise endpoint distance (chart coordinates)
  double cell = 0.0;         // mesh cell size at the mean endpoint
  bool unique = false;       // all converged and spread <= 2 cells
};
UniquenessReport flow_uniqueness(cplx p0, const Vec5& v0, const std::vector<cplx>& starts,
                                 const MetricField& field, const HiggsCoefficients& coeffs,
                                 const FlowOptions& opt = {});

struct GrowthFit {
  double epsilon = 0.0;
  double C = 0.0;
  int support = 0;
  double decades = 0.0;
  double window_fraction = 0.0;  // fraction of the distance range where the envelope is linear
  bool conclusive = false;
  std::string verdict;
  std::string method = "lower-envelope linear fit of ln(1+f) vs distance";
};
GrowthFit growth_fit(const std::vector<double>& d, const std::vector<double>& f, int bins = 40);
GrowthFit growth_fit(const std::vector<FlatSectionTrace>& traces, int bins = 40);

// Lower-envelope least squares of y >= eps * d - C.
struct EnvelopeFit {
  double epsilon = 0.0;
  double C = 0.0;
  int support = 0;
};
EnvelopeFit envelope_fit(const std::vector<double>& d, const std::vector<double>& y, int bins = 40);

struct RayFamily {
  cplx base{0.0, 0.0};
  double phi_min = 0.0, phi_max = 0.0;
  int directions = 100;
  int lengths = 100;        // records per direction, at d_max * k / lengths
  double d_max = 1.0;
  int chords_per_length = 4;
  int substeps = 4;
};
std::vector<double> ray_angles(const RayFamily& fam);
std::vector<cplx> ray_path(const Chart& chart, const RayFamily& fam, double phi);

std::vector<FlatSectionTrace> ray_traces(const RayFamily& fam, const Vec5& v0,
                                         const MetricField& field, const HiggsCoefficients& coeffs,
                                         bool parallel = true);

struct DominationRecord {
  int direction = 0;
  double phi = 0.0;
  double d = 0.0;
  double mu1 = 0.0, mu2 = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  double f_section = 0.0;  // f at the endpoint for v' = k_+^{-1} e2
  double bound = 0.0;      // exp(2 mu2) / 2 + 1/2
  double f_circle_max = 0.0;  // max over the SO(2) orbit of e2
  double relative_gram = 0.0;
};
struct DominationReport {
  std::vector<DominationRecord> records;
  EnvelopeFit fit;
  int violations = 0;        // f_section > bound + tol
  int circle_exceedances = 0;
  double max_bound_ratio = 0.0;  // max f_section / bound
  double max_relative_gram = 0.0;
  bool complete = true;
  std::string error;         // first transport failure, if any
  bool increasing = true;    // distances strictly increasing per direction
};
DominationReport domination_verify(const RayFamily& fam, const MetricField& field,
                                   const HiggsCoefficients& coeffs, double tol = 1e-4,
                                   bool parallel = true);
inline DominationReport domination_verify_serial(const RayFamily& fam, const MetricField& field,
                                                 const HiggsCoefficients& coeffs,
                                                 double tol = 1e-4) {
  return domination_verify(fam, field, coeffs, tol, false);
}

}  // namespace higgslab::anosov
