#pragma once
#include <map>
#include <vector>

#include "higgslab/bundle.hpp"

namespace higgslab::modelmetric {

using Eigen::MatrixXcd;

struct GradedResidue {
  std::vector<double> weights;                // ascending distinct flag weights
  std::vector<std::vector<int>> summands;     // summand indices (-2..2) per weight
  std::vector<MatrixXcd> blocks;              // induced map on each graded piece
  CMat5 residue;                              // full residue, frame order -2..2
  CMat5 graded;                               // weight-preserving part of the residue
};

GradedResidue graded_residue_cyclic(const bundle::CyclicHiggsData& data, int puncture_id);

struct WeightFiltration {
  int dim = 0;
  int max_weight = 0;
  std::map<int, MatrixXcd> W;   // orthonormal basis of W_r for r in [-m, m]
  std::map<int, int> gr_dim;    // dim W_r / W_{r-1}
  MatrixXcd basis;              // Jordan-chain basis adapted to the filtration
  std::vector<int> basis_weights;
  MatrixXcd H;                  // grading: multiplication by r on the weight-r basis vectors
};

WeightFiltration weight_filtration(const MatrixXcd& Y, double tol = 1e-10);

struct EigenFiltration {
  cplx eigenvalue;
  MatrixXcd subspace;  // orthonormal basis of the generalized eigenspace
  WeightFiltration filtration;  // of (M - eigenvalue) restricted, in subspace coordinates
};
std::vector<EigenFiltration> weight_filtrations_by_eigenvalue(const MatrixXcd& M,
                                                              double cluster_tol = 1e-8);

struct Sl2Triple {
  MatrixXcd H, X, Y;
};
Sl2Triple sl2_complete(const MatrixXcd& H, const MatrixXcd& Y, double tol = 1e-10);
double sl2_defect(const Sl2Triple& t);

// coefficient(z) = |z|^{2 z_exponent} * |ln|z||^{log_power}
struct SummandExponent {
  double z_exponent = 0.0;
  int log_power = 0;
};
struct ModelMetricLocal {
  int puncture_id = 0;
  double delta = 0.0;
  std::array<SummandExponent, 5> exponents;  // summands -2..2
  double coefficient(int summand, double r) const;
};
ModelMetricLocal model_metric_local(const bundle::CyclicHiggsData& data, int puncture_id);

// Subspace utilities (orthonormal column bases).
MatrixXcd orth(const MatrixXcd& a, double tol);
MatrixXcd null_space(const MatrixXcd& a, double tol);
MatrixXcd intersect(const MatrixXcd& a, const MatrixXcd& b, double tol);
bool contains(const MatrixXcd& big, const MatrixXcd& small, double tol);

}  // namespace higgslab::modelmetric
