#pragma once
// Flat connection D = nabla^h + Phi + Phi^{*h}, transported in the h-unitary frame
// e_i / sqrt(H_i). The real frame (e1, e2, f2, f1, f3) is a constant unitary change
// of basis from that frame.
#include <vector>

#include "higgslab/field.hpp"
#include "higgslab/hitchin.hpp"
#include "higgslab/liegroup.hpp"

namespace higgslab::transport {

CMat5 higgs_matrix(cplx xi, const hitchin::HiggsCoefficients& coeffs, const Chart& chart);

struct ConnectionSample {
  CMat5 A_xi, A_xibar;  // holomorphic frame
  Eigen::Matrix<double, 5, 1> H;  // H_-2 .. H_2
};
ConnectionSample connection_sample(cplx xi, const MetricField& field,
                                   const hitchin::HiggsCoefficients& coeffs);

// Same connection in the unitary frame.
struct UnitaryConnection {
  CMat5 A_xi, A_xibar;
  CMat5 phi;  // S^{-1} Phi S
  FieldSample sample;
};
UnitaryConnection unitary_connection(cplx xi, const MetricField& field,
                                     const hitchin::HiggsCoefficients& coeffs);

// Columns: real frame vectors in unitary coordinates.
const CMat5& real_frame();

// Real-frame generator of parallel transport along velocity dxi: -R^H A R (real, so(2,3)).
Mat5 real_generator(cplx xi, cplx dxi, const MetricField& field,
                    const hitchin::HiggsCoefficients& coeffs, double* imag_part = nullptr);

struct TransportResult {
  Mat5 matrix;       // real frame transport
  CMat5 unitary;     // unitary frame transport
  double imag_residual = 0.0;
  std::vector<cplx> path;
  liegroup::ChamberPoint cartan;
  liegroup::MembershipReport membership;
  double relative_gram = 0.0;
};

// RK4 on each chord of the sampled path with `substeps` steps per chord.
CMat5 transport_unitary(const std::vector<cplx>& path, const MetricField& field,
                        const hitchin::HiggsCoefficients& coeffs, int substeps,
                        std::vector<CMat5>* history = nullptr);
TransportResult parallel_transport(const std::vector<cplx>& path, const MetricField& field,
                                   const hitchin::HiggsCoefficients& coeffs, int substeps = 4,
                                   double membership_tol = 1e-6);

double flatness_residual(const std::vector<cplx>& loop, const MetricField& field,
                         const hitchin::HiggsCoefficients& coeffs, int substeps);

std::vector<cplx> square_loop(cplx centre, double side, int per_edge);
std::vector<cplx> segment(cplx a, cplx b, int n);

// Conserved form 2 H_1 |v_1|^2 - 2 H_2 |v_2|^2 - |v_0|^2 from holomorphic components.
double conserved_value(const CVec5& holo, const Eigen::Matrix<double, 5, 1>& H);
CVec5 unitary_to_holomorphic(const CVec5& w, const FieldSample& s);

struct ConservationReport {
  double max_abs_deviation = 0.0;
  double max_rel_deviation = 0.0;  // |value - 1| / ||v||_h^2
  double min_v1 = 0.0;             // inf ||v_1||_h
  double min_v1_minus_v2 = 0.0;    // inf (||v_1||_h - ||v_2||_h)
  std::vector<double> values;
};
ConservationReport conservation_probe(const std::vector<cplx>& path, const Vec5& v0,
                                      const MetricField& field,
                                      const hitchin::HiggsCoefficients& coeffs, int substeps);

// Same probe with a two-stage Gauss-Legendre integrator carried in binary128. The scheme keeps
// Q exactly for an so(2,3)-valued generator, so the remaining drift is the structural defect of
// the assembled connection plus binary128 roundoff. Vectors grow like e^{2d}; in double the
// absolute Q residual after length 8 is dominated by eps * ||v||^2.
struct ExtendedTransportReport {
  double max_abs_deviation = 0.0;  // sup |Q(v) - 1| along the path (vector probe)
  double gram_residual = 0.0;      // ||T^t I T - I||_inf at the endpoint (matrix transport)
  double max_generator_defect = 0.0;  // sup ||G^t I + I G||_inf over evaluated generators
  Mat5 matrix;                     // endpoint transport rounded to double
};
ExtendedTransportReport conservation_probe_extended(const std::vector<cplx>& path, const Vec5& v0,
                                                    const MetricField& field,
                                                    const hitchin::HiggsCoefficients& coeffs,
                                                    int substeps);

// Curvature of nabla^h alone minus [Phi, Phi^*] at xi, by central differences of the
// Chern form. Returns the max-abs entry of F(nabla^h) + [Phi, Phi^*] (dxi ^ dxibar part).
double chern_curvature_defect(cplx xi, const MetricField& field,
                              const hitchin::HiggsCoefficients& coeffs, double step);

}  // namespace higgslab::transport
