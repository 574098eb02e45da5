#include "higgslab/liegroup.hpp"

#include <algorithm>
#include <cmath>

#include "higgslab/errors.hpp"

namespace higgslab::liegroup {

namespace {

constexpr double kDegenerate = 1e-8;

bool all_finite(const Mat5& m) { return m.allFinite(); }

// First nonzero entry positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

Eigen::Vector2d rot90(const Eigen::Vector2d& c) { return {-c(1), c(0)}; }

// Unit vector orthogonal to d, chosen deterministically.
Eigen::Vector3d orthogonal_unit(const Eigen::Vector3d& d) {
  Eigen::Vector3d best;
  double best_norm = -1.0;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d e = Eigen::Vector3d::Unit(i);
    Eigen::Vector3d r = e - d.dot(e) * d;
    if (r.norm() > best_norm) {
      best_norm = r.norm();
      best = r;
    }
  }
  return best.normalized();
}

Eigen::Matrix2d nearest_rotation2(const Eigen::Matrix2d& a) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Eigen::Matrix2d u = svd.matrixU();
    u.col(1) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

Eigen::Matrix3d nearest_rotation3(const Eigen::Matrix3d& a) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

Mat5 project_to_k(const Mat5& m) {
  return block_k(nearest_rotation2(m.topLeftCorner<2, 2>()),
                 nearest_rotation3(m.bottomRightCorner<3, 3>()));
}

// Descending log singular values of g and of g^{-1}; the latter avoids
// relative loss in the smallest singular values of g.
ChamberPoint chamber_from_svd(const Mat5& g) {
  Eigen::JacobiSVD<Mat5> a(g);
  Eigen::JacobiSVD<Mat5> b(group_inverse(g));
  const auto& sa = a.singularValues();
  const auto& sb = b.singularValues();
  if (!sa.allFinite() || !sb.allFinite() || sa(4) <= 0.0 || sb(4) <= 0.0)
    throw NumericalError("cartan_projection: singular value computation failed");
  // lambda_i from g, -lambda_{6-i} recovered from g^{-1}: average the pair.
  double mu1 = 0.5 * (std::log(sa(0)) + std::log(sb(0)));
  double mu2 = 0.5 * (std::log(sa(1)) + std::log(sb(1)));
  mu1 = std::max(mu1, 0.0);
  mu2 = std::clamp(mu2, 0.0, mu1);
  return {mu1, mu2};
}

}  // namespace

SignatureForm signature_form(int p, int q) {
  if (p <= 0 || q <= 0) throw InvalidInput("signature_form: p, q must be positive");
  if (p >= q) throw InvalidInput("signature_form: requires p < q");
  SignatureForm s;
  s.p = p;
  s.q = q;
  s.gram = Eigen::MatrixXd::Zero(p + q, p + q);
  for (int i = 0; i < p + q; ++i) s.gram(i, i) = i < p ? 1.0 : -1.0;
  return s;
}

const Mat5& gram23() {
  static const Mat5 g = [] {
    Mat5 m = Mat5::Zero();
    m.diagonal() << 1, 1, -1, -1, -1;
    return m;
  }();
  return g;
}

Mat5 group_inverse(const Mat5& g) { return gram23() * g.transpose() * gram23(); }

double relative_gram_residual(const Mat5& g) {
  Mat5 r = g.transpose() * gram23() * g - gram23();
  Eigen::JacobiSVD<Mat5> svd(g);
  double n2 = svd.singularValues()(0);
  return r.cwiseAbs().maxCoeff() / std::max(1.0, n2 * n2);
}

MembershipReport membership_check(const Mat5& m, double tol) {
  if (!all_finite(m)) throw InvalidInput("membership_check: non-finite entries");
  MembershipReport rep;
  rep.gram_residual = (m.transpose() * gram23() * m - gram23()).cwiseAbs().maxCoeff();
  rep.det_residual = std::abs(m.determinant() - 1.0);
  Eigen::JacobiSVD<Mat5> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat5 o = svd.matrixU() * svd.matrixV().transpose();
  rep.identity_component = o.topLeftCorner<2, 2>().determinant() > 0.0;
  if (rep.gram_residual > tol)
    rep.reason = "form not preserved";
  else if (rep.det_residual > tol)
    rep.reason = "determinant differs from 1";
  else if (!rep.identity_component)
    rep.reason = "not in the identity component";
  rep.ok = rep.reason.empty();
  return rep;
}

Mat5 chamber_matrix(const ChamberPoint& mu) {
  Mat5 a = Mat5::Zero();
  a(0, 3) = a(3, 0) = mu.mu1;
  a(1, 2) = a(2, 1) = mu.mu2;
  return a;
}

Mat5 chamber_exp(const ChamberPoint& mu) {
  Mat5 e = Mat5::Identity();
  e(0, 0) = e(3, 3) = std::cosh(mu.mu1);
  e(0, 3) = e(3, 0) = std::sinh(mu.mu1);
  e(1, 1) = e(2, 2) = std::cosh(mu.mu2);
  e(1, 2) = e(2, 1) = std::sinh(mu.mu2);
  return e;
}

ChamberPoint cartan_projection(const Mat5& g) {
  if (!all_finite(g)) throw InvalidInput("cartan_projection: non-finite entries");
  return chamber_from_svd(g);
}

KAKTriple kak_decompose(const Mat5& g) {
  if (!all_finite(g)) throw InvalidInput("kak_decompose: non-finite entries");
  KAKTriple out;
  out.mu = chamber_from_svd(g);
  const double mu1 = out.mu.mu1, mu2 = out.mu.mu2;

  if (mu1 <= kDegenerate) {
    out.k_plus = Mat5::Identity();
    out.k_minus = project_to_k(g);
    return out;
  }

  Eigen::JacobiSVD<Mat5> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat5 v = svd.matrixV();
  for (int j = 0; j < 5; ++j) fix_sign(v.col(j));
  const double s2 = std::sqrt(2.0);

  Vec5 v1 = v.col(0);
  Eigen::Vector2d c1 = s2 * v1.head<2>();
  Eigen::Vector3d d1 = s2 * v1.tail<3>();
  Eigen::Vector2d c2;
  Eigen::Vector3d d2;
  if (mu2 > kDegenerate) {
    Vec5 v2 = v.col(1);
    c2 = s2 * v2.head<2>();
    d2 = s2 * v2.tail<3>();
    if (c1(0) * c2(1) - c1(1) * c2(0) < 0) {
      c2 = -c2;
      d2 = -d2;
    }
  } else {
    c2 = rot90(c1);
    d2 = orthogonal_unit(d1.normalized());
  }
  Eigen::Vector3d d3 = d2.cross(d1);

  // k_plus^T has columns (c1, c2, d2, d1, d3) embedded in the two blocks.
  Eigen::Matrix2d cu;
  cu << c1, c2;
  Eigen::Matrix3d dl;
  dl << d2, d1, d3;
  Mat5 kpt = block_k(nearest_rotation2(cu), nearest_rotation3(dl));
  out.k_plus = kpt.transpose();

  // k_minus from the images g v_i / sigma_i, which never divide by a small number.
  Mat5 gk = g * kpt;
  Vec5 u1 = gk * (Vec5::Unit(0) + Vec5::Unit(3)) /
                       (s2 * std::exp(mu1));
  Vec5 u2 = gk * (Vec5::Unit(1) + Vec5::Unit(2)) /
                       (s2 * std::exp(mu2));
  Vec5 u3 = gk * Vec5::Unit(4);
  Eigen::Matrix2d au;
  au << s2 * u1.head<2>(), s2 * u2.head<2>();
  Eigen::Matrix3d bl;
  bl << s2 * u2.tail<3>(), s2 * u1.tail<3>(), u3.tail<3>();
  out.k_minus = block_k(nearest_rotation2(au), nearest_rotation3(bl));
  return out;
}

Mat5 kak_recompose(const KAKTriple& kak) {
  return kak.k_minus * chamber_exp(kak.mu) * kak.k_plus;
}

std::pair<double, double> simple_roots(const ChamberPoint& mu) {
  return {mu.mu1 - mu.mu2, mu.mu2};
}

WeightBasis weight_basis() {
  WeightBasis wb;
  wb.labels = {"e1", "e2", "f2", "f1", "f3"};
  wb.to_standard = Mat5::Identity();
  return wb;
}

Mat5 block_k(const Eigen::Matrix2d& upper, const Eigen::Matrix3d& lower) {
  Mat5 k = Mat5::Zero();
  k.topLeftCorner<2, 2>() = upper;
  k.bottomRightCorner<3, 3>() = lower;
  return k;
}

Mat5 random_k(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double a = ang(rng);
  Eigen::Matrix2d r2;
  r2 << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return block_k(r2, q.toRotationMatrix());
}

Mat5 random_group_element(std::mt19937_64& rng, double mu_max, ChamberPoint* mu_out) {
  std::uniform_real_distribution<double> u(0.0, mu_max);
  double a = u(rng), b = u(rng);
  ChamberPoint mu{std::max(a, b), std::min(a, b)};
  if (mu_out) *mu_out = mu;
  Mat5 km = random_k(rng);
  Mat5 kp = random_k(rng);
  return km * chamber_exp(mu) * kp;
}

std::vector<ChamberPoint> cartan_projection_batch(const std::vector<Mat5>& gs) {
  std::vector<ChamberPoint> out(gs.size());
  const long n = static_cast<long>(gs.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[i] = cartan_projection(gs[i]);
  return out;
}

std::vector<ChamberPoint> cartan_projection_batch_serial(const std::vector<Mat5>& gs) {
  std::vector<ChamberPoint> out;
  out.reserve(gs.size());
  for (const auto& g : gs) out.push_back(cartan_projection(g));
  return out;
}

}  // namespace higgslab::liegroup
