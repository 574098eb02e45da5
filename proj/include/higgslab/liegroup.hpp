#pragma once
// SO0(2,3) in the coordinates (e1, e2, f2, f1, f3): signature form diag(1,1,-1,-1,-1).
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "higgslab/types.hpp"

namespace higgslab::liegroup {

constexpr double kDefaultTol = 1e-9;

struct SignatureForm {
  int p = 2;
  int q = 3;
  Eigen::MatrixXd gram;  // diag(1,..,1,-1,..,-1)
};
SignatureForm signature_form(int p, int q);
const Mat5& gram23();

struct ChamberPoint {
  double mu1 = 0.0;
  double mu2 = 0.0;
};

struct MembershipReport {
  bool ok = false;
  double gram_residual = 0.0;  // max-abs of m^T I m - I
  double det_residual = 0.0;   // |det m - 1|
  bool identity_component = false;
  std::string reason;
};

struct KAKTriple {
  Mat5 k_minus;
  ChamberPoint mu;
  Mat5 k_plus;
};

MembershipReport membership_check(const Mat5& m, double tol = kDefaultTol);

// Anti-diagonal generator: mu1 couples (e1,f1), mu2 couples (e2,f2).
Mat5 chamber_matrix(const ChamberPoint& mu);
Mat5 chamber_exp(const ChamberPoint& mu);

ChamberPoint cartan_projection(const Mat5& g);
KAKTriple kak_decompose(const Mat5& g);
Mat5 kak_recompose(const KAKTriple& kak);

std::pair<double, double> simple_roots(const ChamberPoint& mu);

struct WeightBasis {
  std::vector<std::string> labels;  // e1, e2, f2, f1, f3
  Mat5 to_standard;                 // columns = basis vectors in standard coordinates
};
WeightBasis weight_basis();

// Block-diagonal SO(2) x SO(3) helpers.
Mat5 block_k(const Eigen::Matrix2d& upper, const Eigen::Matrix3d& lower);
Mat5 random_k(std::mt19937_64& rng);
Mat5 random_group_element(std::mt19937_64& rng, double mu_max, ChamberPoint* mu_out = nullptr);

// Inverse via the form: g^{-1} = I g^T I.
Mat5 group_inverse(const Mat5& g);

// Normalized form defect ||g^T I g - I||_inf / max(1, ||g||_2^2).
double relative_gram_residual(const Mat5& g);

std::vector<ChamberPoint> cartan_projection_batch(const std::vector<Mat5>& gs);
std::vector<ChamberPoint> cartan_projection_batch_serial(const std::vector<Mat5>& gs);

}  // namespace higgslab::liegroup
