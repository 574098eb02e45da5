#pragma once
// Rotationally symmetric solver for the diagonal Hitchin system in log variables
//   x = ln H_-2, y = ln H_-1, with Delta_xi f = f_tt / (4 rho):
//   Delta x = |c|^2 e^{x+y} - e^{y-x}
//   Delta y = e^{y-x} + |c|^2 e^{x+y} - |b|^2 e^{-y}
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "higgslab/field.hpp"

namespace higgslab::hitchin {

struct RadialMesh {
  Chart chart;
  int chart_id = -1;  // puncture id, or -1 for the disk centre
  std::vector<double> t;
  double h = 0.0;
  int n() const { return static_cast<int>(t.size()); }
  double r(int i) const { return std::exp(t[i]); }
};
RadialMesh make_mesh(ChartKind kind, double r_min, double r_max, int n, int chart_id = -1);

struct HiggsCoefficients {
  bundle::PowerCoefficient b;
  bundle::PowerCoefficient c;
  bool rotational = true;
};

struct DirichletData {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  std::string source;
};

// Known exact solution subtracted before discretizing: the scheme acts on x - x_bg, which
// stays smooth where x itself has a logarithmic boundary singularity.
struct Background {
  std::string name;
  std::vector<double> x, y, xt, yt, xtt, ytt;  // nodal values and t-derivatives
  std::shared_ptr<const MetricField> field;    // analytic evaluation off the nodes
};
Background fuchsian_background(double beta_abs2, const RadialMesh& mesh);

// Right-hand sides F = rho * (...) of 1/4 f_tt = F and their Jacobian.
struct NodeForcing {
  double f1, f2;
  double j11, j12, j21, j22;
};

class DiscreteSystem {
 public:
  DiscreteSystem(HiggsCoefficients coeffs, RadialMesh mesh,
                 std::optional<Background> background = std::nullopt);
  const RadialMesh& mesh() const { return mesh_; }
  const std::optional<Background>& background() const { return bg_; }
  const HiggsCoefficients& coeffs() const { return coeffs_; }

  NodeForcing forcing(int i, double x, double y) const;
  double b_abs2(int i) const { return b2_[i]; }
  double c_abs2(int i) const { return c2_[i]; }
  double rho(int i) const { return rho_[i]; }

  // Compact fourth-order residual on interior nodes, 2 entries per node
  // (boundary entries are zero).
  std::vector<double> residual(const std::vector<double>& x, const std::vector<double>& y) const;
  std::vector<double> residual_serial(const std::vector<double>& x,
                                      const std::vector<double>& y) const;

  // Block-tridiagonal Jacobian, 2x2 blocks per interior node.
  struct Jacobian {
    std::vector<Eigen::Matrix2d> lower, diag, upper;
  };
  Jacobian jacobian(const std::vector<double>& x, const std::vector<double>& y) const;
  Jacobian jacobian_serial(const std::vector<double>& x, const std::vector<double>& y) const;

  // Delta_xi f at interior nodes by the three-point stencil.
  std::vector<double> discrete_laplacian(const std::vector<double>& f) const;

 private:
  HiggsCoefficients coeffs_;
  RadialMesh mesh_;
  std::optional<Background> bg_;
  std::vector<double> b2_, c2_, rho_;
};

DiscreteSystem assemble_system(const HiggsCoefficients& coeffs, const RadialMesh& mesh,
                               std::optional<Background> background = std::nullopt);

// Solves J dx = rhs for a block-tridiagonal J (rhs has 2 entries per node).
std::vector<double> block_thomas(const DiscreteSystem::Jacobian& j, const std::vector<double>& rhs);

struct SolverOptions {
  double tol = 1e-10;        // target sup residual
  double accept_tol = 1e-8;  // residual accepted when the Newton step stalls
  int max_iter = 50;
  bool parallel = true;
  std::optional<std::vector<double>> x0, y0;  // initial guess
  std::optional<Background> background;
};

struct MetricSolution {
  RadialMesh mesh;
  HiggsCoefficients coeffs;
  std::vector<double> x, y;
  double residual_sup = 0.0;
  int iterations = 0;
  int picard_steps = 0;
  std::string boundary_source;
  std::optional<Background> background;
  double H_m2(int i) const { return std::exp(x[i]); }
  double H_m1(int i) const { return std::exp(y[i]); }
};

MetricSolution solve(const HiggsCoefficients& coeffs, const RadialMesh& mesh,
                     const DirichletData& bc, const SolverOptions& opt = {});

// Model diagonal at a puncture: H_-2 = r^{2 delta} |ln r|, H_-1 = r^{2 delta} / |ln r|.
std::pair<double, double> boundary_from_model_metric(const bundle::CyclicHiggsData& data,
                                                     int puncture_id, double r);
// Same in log variables at t = ln r for a signed flag weight.
std::pair<double, double> model_log_metric(double delta, double t);
DirichletData model_dirichlet(double delta, const RadialMesh& mesh);
std::pair<double, double> fuchsian_log_metric(double beta_abs2, double t);
DirichletData fuchsian_dirichlet(double beta_abs2, const RadialMesh& mesh);

struct DerivedFields {
  std::vector<double> t;
  std::vector<double> gh_factor, tau_norm, gamma_norm, u, curvature, curvature_identity;
  std::vector<double> hyp_factor;
  std::vector<double> xtt, ytt;  // five-point second derivatives in t
  std::vector<double> res1, res2;  // continuous residual 1/4 f_tt - F
};
DerivedFields derived_fields(const MetricSolution& sol);

// Inner 60% of the node range.
std::pair<int, int> interior_region(const RadialMesh& mesh, double fraction = 0.6);

double continuous_residual(const DerivedFields& f, std::pair<int, int> region);
double gap_verify(const DerivedFields& f, std::pair<int, int> region);
double sup_u(const DerivedFields& f, std::pair<int, int> region);

struct UIdentityReport {
  bool applicable = false;
  double sup = 0.0;
  int excluded = 0;
  int sign_mismatches = 0;  // u < 1 nodes where Delta_gh ln u is not negative
};
UIdentityReport u_identity_residual(const DerivedFields& f, const MetricSolution& sol,
                                    std::pair<int, int> region);

struct CurvatureReport {
  double min_k = 0.0;
  double argmin_t = 0.0;
  double min_k_identity = 0.0;
  double agreement = 0.0;  // sup |K_direct - K_identity|
  double lower_bound = -2.0;  // -2 - 5 h^2
  bool ok = false;
};
CurvatureReport curvature_check(const DerivedFields& f, const MetricSolution& sol,
                                std::pair<int, int> region);

struct QuasiIsometryReport {
  double sup_ratio = 0.0;
  double inf_ratio = 0.0;
  double constant = 0.0;  // max(sup, 1/inf)
  double ratio_at_rmin = 0.0;
};
// ratio = g_h / (2 g_hyp) = ||tau||^2
QuasiIsometryReport quasi_isometry_check(const DerivedFields& f);

// Interpolating field from fourth-order nodal derivatives (plus the background, if any).
std::unique_ptr<MetricField> make_field(const MetricSolution& sol);

}  // namespace higgslab::hitchin
