#include "higgslab/modelmetric.hpp"

#include <algorithm>
#include <cmath>

#include "higgslab/errors.hpp"

namespace higgslab::modelmetric {

namespace {

MatrixXcd hcat(const MatrixXcd& a, const MatrixXcd& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  MatrixXcd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

MatrixXcd empty_basis(Eigen::Index n) { return MatrixXcd(n, 0); }

MatrixXcd mat_power(const MatrixXcd& y, int k) {
  MatrixXcd p = MatrixXcd::Identity(y.rows(), y.cols());
  for (int i = 0; i < k; ++i) p = p * y;
  return p;
}

cplx coefficient_at_zero(const bundle::PowerCoefficient& pc) {
  if (pc.power < 0) throw InvalidInput("coefficient has a pole beyond the allowed order");
  return pc.power == 0 ? pc.coeff : cplx(0.0);
}

}  // namespace

MatrixXcd orth(const MatrixXcd& a, double tol) {
  if (a.cols() == 0) return empty_basis(a.rows());
  Eigen::JacobiSVD<MatrixXcd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

MatrixXcd null_space(const MatrixXcd& a, double tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return MatrixXcd::Identity(n, n);
  Eigen::JacobiSVD<MatrixXcd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

MatrixXcd intersect(const MatrixXcd& a, const MatrixXcd& b, double tol) {
  if (a.cols() == 0 || b.cols() == 0) return empty_basis(a.rows());
  MatrixXcd stacked = hcat(a, -b);
  MatrixXcd ns = null_space(stacked, tol);
  if (ns.cols() == 0) return empty_basis(a.rows());
  return orth(a * ns.topRows(a.cols()), tol);
}

bool contains(const MatrixXcd& big, const MatrixXcd& small, double tol) {
  if (small.cols() == 0) return true;
  if (big.cols() == 0) return small.norm() <= tol;
  MatrixXcd r = small - big * (big.adjoint() * small);
  return r.norm() <= tol * std::max(1.0, small.norm());
}

GradedResidue graded_residue_cyclic(const bundle::CyclicHiggsData& data, int puncture_id) {
  const auto& p = data.puncture(puncture_id);
  if (p.zeta == 0.0) throw Unsupported("graded residue: zero-weight punctures are out of scope");
  auto a = bundle::check_assumption_A(data);
  if (!a.ok) throw PreconditionError("graded residue: assumption A violated: " + a.clause);

  GradedResidue gr;
  gr.residue = bundle::higgs_pattern(coefficient_at_zero(data.beta),
                                     coefficient_at_zero(data.gamma));
  std::array<double, 5> w{};
  for (int i = -2; i <= 2; ++i) w[i + 2] = bundle::summand_weight(i, p);

  gr.graded = CMat5::Zero();
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const cplx e = gr.residue(i, j);
      if (e == cplx(0.0)) continue;
      if (w[i] > w[j])
        throw InvalidInput("residue does not preserve the flag (coefficient violates the weight rule)");
      if (w[i] == w[j]) gr.graded(i, j) = e;
    }

  std::vector<double> ws(w.begin(), w.end());
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  for (double wt : ws) {
    std::vector<int> idx;
    for (int i = 0; i < 5; ++i)
      if (w[i] == wt) idx.push_back(i);
    MatrixXcd blk(idx.size(), idx.size());
    for (size_t r = 0; r < idx.size(); ++r)
      for (size_t c = 0; c < idx.size(); ++c) blk(r, c) = gr.graded(idx[r], idx[c]);
    std::vector<int> summ;
    for (int i : idx) summ.push_back(i - 2);
    gr.weights.push_back(wt);
    gr.summands.push_back(summ);
    gr.blocks.push_back(blk);
  }
  return gr;
}

WeightFiltration weight_filtration(const MatrixXcd& Y, double tol) {
  if (Y.rows() != Y.cols()) throw InvalidInput("weight_filtration: matrix must be square");
  if (!Y.allFinite()) throw InvalidInput("weight_filtration: non-finite entries");
  const int n = static_cast<int>(Y.rows());
  WeightFiltration wf;
  wf.dim = n;
  const double scale = std::max(1.0, Y.norm());

  std::vector<MatrixXcd> pw(n + 2), ker(n + 2), img(n + 2);
  for (int k = 0; k <= n + 1; ++k) {
    pw[k] = mat_power(Y / scale, k);
    ker[k] = null_space(pw[k], tol);
    img[k] = orth(pw[k], tol);
  }
  if (img[n].cols() != 0) throw InvalidInput("weight_filtration: matrix is not nilpotent");
  int m = 0;
  while (m + 1 <= n && img[m + 1].cols() != 0) ++m;
  wf.max_weight = m;

  // W_r = sum over i >= max(0, r) of ker Y^{i+1} intersected with im Y^{i-r}.
  for (int r = -m; r <= m; ++r) {
    MatrixXcd acc = empty_basis(n);
    for (int i = std::max(0, r); i <= n; ++i) {
      if (i - r > n + 1) break;
      MatrixXcd piece = intersect(ker[std::min(i + 1, n + 1)], img[i - r], tol);
      acc = orth(hcat(acc, piece), tol);
    }
    wf.W[r] = acc;
  }
  int prev = 0;
  for (int r = -m; r <= m; ++r) {
    wf.gr_dim[r] = static_cast<int>(wf.W[r].cols()) - prev;
    prev = static_cast<int>(wf.W[r].cols());
  }

  // Jordan chains, longest first.
  MatrixXcd basis = empty_basis(n);
  std::vector<int> weights;
  struct Chain { Eigen::VectorXcd top; int len; };
  std::vector<Chain> chains;
  for (int k = m + 1; k >= 1; --k) {
    MatrixXcd known = ker[k - 1];
    for (const auto& c : chains) {
      Eigen::VectorXcd v = c.top;
      for (int j = 0; j < c.len; ++j) {
        if (c.len - j <= k) known = hcat(known, v);
        v = (Y / scale) * v;
      }
    }
    MatrixXcd q = orth(known, tol);
    MatrixXcd proj = ker[k] - q * (q.adjoint() * ker[k]);
    MatrixXcd tops = orth(proj, tol);
    for (Eigen::Index t = 0; t < tops.cols(); ++t) chains.push_back({tops.col(t), k});
  }
  for (const auto& c : chains) {
    Eigen::VectorXcd v = c.top;
    for (int j = 0; j < c.len; ++j) {
      basis = hcat(basis, v);
      weights.push_back(c.len - 1 - 2 * j);
      v = Y * v;  // unscaled: keeps Y b_j = b_{j+1}
    }
  }
  if (basis.cols() != n) throw NumericalError("weight_filtration: Jordan basis construction failed");
  wf.basis = basis;
  wf.basis_weights = weights;
  Eigen::VectorXcd d(n);
  for (int i = 0; i < n; ++i) d(i) = static_cast<double>(weights[i]);
  wf.H = basis * d.asDiagonal() * basis.inverse();
  return wf;
}

std::vector<EigenFiltration> weight_filtrations_by_eigenvalue(const MatrixXcd& M,
                                                              double cluster_tol) {
  if (M.rows() != M.cols()) throw InvalidInput("matrix must be square");
  const int n = static_cast<int>(M.rows());
  Eigen::ComplexEigenSolver<MatrixXcd> es(M, false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::vector<std::vector<cplx>> clusters;
  for (cplx l : ev) {
    bool placed = false;
    for (auto& c : clusters)
      if (std::abs(c.front() - l) <= cluster_tol * std::max(1.0, std::abs(l))) {
        c.push_back(l);
        placed = true;
        break;
      }
    if (!placed) clusters.push_back({l});
  }
  std::vector<EigenFiltration> out;
  for (const auto& c : clusters) {
    cplx mean(0.0);
    for (cplx l : c) mean += l;
    mean /= static_cast<double>(c.size());
    MatrixXcd nmat = M - mean * MatrixXcd::Identity(n, n);
    MatrixXcd g = null_space(mat_power(nmat, n), 1e-8);
    EigenFiltration ef;
    ef.eigenvalue = mean;
    ef.subspace = g;
    MatrixXcd restricted = g.adjoint() * nmat * g;
    ef.filtration = weight_filtration(restricted, 1e-8);
    out.push_back(std::move(ef));
  }
  return out;
}

Sl2Triple sl2_complete(const MatrixXcd& H, const MatrixXcd& Y, double tol) {
  const Eigen::Index n = H.rows();
  if (H.cols() != n || Y.rows() != n || Y.cols() != n)
    throw InvalidInput("sl2_complete: dimension mismatch");
  const double scale = std::max({1.0, H.norm(), Y.norm()});
  if ((H * Y - Y * H + 2.0 * Y).norm() > tol * scale * 100)
    throw InvalidInput("sl2_complete: [H,Y] != -2Y");
  const MatrixXcd I = MatrixXcd::Identity(n, n);
  // vec(AXB) = (B^T kron A) vec(X)
  auto kron = [](const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
  };
  const Eigen::Index nn = n * n;
  MatrixXcd sys(2 * nn, nn);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * nn);
  sys.topRows(nn) = kron(I, H) - kron(H.transpose(), I) - 2.0 * MatrixXcd::Identity(nn, nn);
  sys.bottomRows(nn) = kron(Y.transpose(), I) - kron(I, Y);
  rhs.tail(nn) = Eigen::Map<const Eigen::VectorXcd>(H.data(), nn);
  Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(sys);
  Eigen::VectorXcd x = cod.solve(rhs);
  Sl2Triple t{H, Eigen::Map<MatrixXcd>(x.data(), n, n), Y};
  if (sl2_defect(t) > 1e3 * tol * scale)
    throw InvalidInput("sl2_complete: no X satisfies the bracket relations");
  return t;
}

double sl2_defect(const Sl2Triple& t) {
  const auto& H = t.H;
  const auto& X = t.X;
  const auto& Y = t.Y;
  double a = (H * Y - Y * H + 2.0 * Y).cwiseAbs().maxCoeff();
  double b = (H * X - X * H - 2.0 * X).cwiseAbs().maxCoeff();
  double c = (X * Y - Y * X - H).cwiseAbs().maxCoeff();
  return std::max({a, b, c});
}

double ModelMetricLocal::coefficient(int summand, double r) const {
  if (!(r > 0.0 && r < 1.0)) throw InvalidInput("model metric: requires 0 < r < 1");
  const auto& e = exponents.at(summand + 2);
  return std::pow(r, 2.0 * e.z_exponent) * std::pow(std::abs(std::log(r)), e.log_power);
}

ModelMetricLocal model_metric_local(const bundle::CyclicHiggsData& data, int puncture_id) {
  const auto& p = data.puncture(puncture_id);
  if (p.zeta == 0.0) throw Unsupported("model metric: zero-weight punctures are out of scope");
  auto a = bundle::check_assumption_A(data);
  if (!a.ok) throw PreconditionError("model metric: assumption A violated: " + a.clause);
  ModelMetricLocal mm;
  mm.puncture_id = puncture_id;
  mm.delta = p.delta();
  const double d = mm.delta;
  mm.exponents = {SummandExponent{d, 1}, SummandExponent{d, -1}, SummandExponent{0.0, 0},
                  SummandExponent{-d, 1}, SummandExponent{-d, -1}};
  return mm;
}

}  // namespace higgslab::modelmetric
