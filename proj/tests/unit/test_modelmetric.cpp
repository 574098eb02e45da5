#include <doctest.h>

#include <cmath>
#include <random>

#include "higgslab/errors.hpp"
#include "higgslab/modelmetric.hpp"

using namespace higgslab;
using namespace higgslab::modelmetric;
using bundle::FlagVariant;

namespace {
bundle::CyclicHiggsData cusp_data(double zeta, FlagVariant flag, int b_power, int c_power) {
  bundle::CyclicHiggsData d;
  d.genus = 0;
  d.deg_L1 = 0;
  for (int k = 0; k < 3; ++k) d.punctures.push_back({k, zeta, flag});
  d.beta = {1.0, b_power};
  d.gamma = {0.8, c_power};
  return d;
}

MatrixXcd jordan_nilpotent(const std::vector<int>& sizes) {
  int n = 0;
  for (int s : sizes) n += s;
  MatrixXcd j = MatrixXcd::Zero(n, n);
  int off = 0;
  for (int s : sizes) {
    for (int k = 0; k + 1 < s; ++k) j(off + k + 1, off + k) = 1.0;
    off += s;
  }
  return j;
}

// dim W_r from the block sizes: a block of size s contributes weights s-1, s-3, .., 1-s.
int oracle_dim(const std::vector<int>& sizes, int r) {
  int d = 0;
  for (int s : sizes)
    for (int w = 1 - s; w <= s - 1; w += 2)
      if (w <= r) ++d;
  return d;
}
}  // namespace

TEST_CASE("graded residue weights for a positive flag") {
  const auto d = cusp_data(0.3, FlagVariant::positive, 1, 0);
  const auto gr = graded_residue_cyclic(d, 0);
  REQUIRE(gr.weights.size() == 3);
  CHECK(gr.weights[0] == doctest::Approx(-0.3));
  CHECK(gr.weights[1] == 0.0);
  CHECK(gr.weights[2] == doctest::Approx(0.3));
  REQUIRE(gr.blocks[0].rows() == 2);
  // The outer blocks are the tau chain: one entry equal to 1.
  for (int b : {0, 2}) {
    CHECK(gr.blocks[b].cwiseAbs().sum() == doctest::Approx(1.0));
    CHECK((gr.blocks[b] * gr.blocks[b]).norm() == 0.0);
  }
  CHECK(gr.blocks[1].norm() == 0.0);
}

TEST_CASE("residue must respect the flag") {
  // beta nonvanishing at a positive-flag puncture raises the weight.
  const auto d = cusp_data(0.3, FlagVariant::positive, 0, 0);
  CHECK_THROWS_AS(graded_residue_cyclic(d, 0), InvalidInput);
  const auto neg = cusp_data(0.3, FlagVariant::negative, 0, 1);
  CHECK_NOTHROW(graded_residue_cyclic(neg, 0));
  auto zero = cusp_data(0.0, FlagVariant::trivial, 0, 0);
  CHECK_THROWS_AS(graded_residue_cyclic(zero, 0), Unsupported);
}

TEST_CASE("weight filtration of simple nilpotents") {
  const auto w0 = weight_filtration(MatrixXcd::Zero(3, 3));
  CHECK(w0.max_weight == 0);
  CHECK(w0.W.at(0).cols() == 3);

  MatrixXcd y = jordan_nilpotent({2});
  const auto wf = weight_filtration(y);
  CHECK(wf.max_weight == 1);
  REQUIRE(wf.W.at(-1).cols() == 1);
  CHECK(std::abs(wf.W.at(-1)(0, 0)) < 1e-12);  // spanned by the second vector
  CHECK(std::abs(wf.W.at(-1)(1, 0)) == doctest::Approx(1.0));
  CHECK(wf.W.at(0).cols() == 1);
  CHECK(wf.W.at(1).cols() == 2);
}

TEST_CASE("weight filtration of the cyclic residue block") {
  const auto gr = graded_residue_cyclic(cusp_data(0.25, FlagVariant::negative, 0, 1), 1);
  for (int b : {0, 2}) {
    const auto wf = weight_filtration(gr.blocks[b]);
    CHECK(wf.max_weight == 1);
    CHECK(wf.W.at(-1).cols() == 1);
    CHECK(contains(wf.W.at(-1), orth(gr.blocks[b], 1e-12), 1e-12));
    CHECK(contains(wf.W.at(0), wf.W.at(-1), 1e-12));
    CHECK(wf.W.at(0).cols() == 1);
    CHECK(wf.W.at(1).cols() == 2);
    const auto t = sl2_complete(wf.H, gr.blocks[b]);
    CHECK(sl2_defect(t) < 1e-10);
  }
}

TEST_CASE("random nilpotents: filtration dimensions and Y W_r inside W_{r-2}") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<std::vector<int>> partitions = {{1}, {2}, {3}, {2, 1}, {3, 1}, {2, 2},
                                                    {3, 2}, {4, 1}, {5}, {2, 2, 1}};
  for (const auto& sizes : partitions) {
    for (int trial = 0; trial < 5; ++trial) {
      const MatrixXcd j = jordan_nilpotent(sizes);
      const Eigen::Index n = j.rows();
      MatrixXcd p(n, n);
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) p(a, b) = cplx(g(rng), g(rng));
      p += 3.0 * MatrixXcd::Identity(n, n);
      const MatrixXcd y = p * j * p.inverse();
      const auto wf = weight_filtration(y, 1e-8);
      for (const auto& [r, basis] : wf.W) {
        CHECK(basis.cols() == oracle_dim(sizes, r));
        if (wf.W.count(r - 2)) CHECK(contains(wf.W.at(r - 2), y * basis, 1e-6));
        else CHECK((y * basis).norm() < 1e-8 * std::max(1.0, y.norm()));
        CHECK(wf.gr_dim.at(r) == wf.gr_dim.at(-r));
      }
      const auto t = sl2_complete(wf.H, y, 1e-8);
      CHECK(sl2_defect(t) < 1e-6 * std::max(1.0, y.norm()));
    }
  }
}

TEST_CASE("filtrations by eigenvalue") {
  MatrixXcd m = MatrixXcd::Zero(3, 3);
  m(0, 0) = m(1, 1) = 2.0;
  m(1, 0) = 1.0;
  m(2, 2) = 5.0;
  const auto efs = weight_filtrations_by_eigenvalue(m);
  REQUIRE(efs.size() == 2);
  for (const auto& e : efs) {
    if (std::abs(e.eigenvalue - 2.0) < 1e-8) {
      CHECK(e.subspace.cols() == 2);
      CHECK(e.filtration.max_weight == 1);
    } else {
      CHECK(std::abs(e.eigenvalue - 5.0) < 1e-8);
      CHECK(e.filtration.max_weight == 0);
    }
  }
}

TEST_CASE("sl2 completion") {
  MatrixXcd h = MatrixXcd::Zero(2, 2), y = MatrixXcd::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  y(1, 0) = 1.0;
  const auto t = sl2_complete(h, y);
  CHECK(std::abs(t.X(0, 1) - 1.0) < 1e-12);
  CHECK(t.X.cwiseAbs().sum() == doctest::Approx(1.0));
  CHECK(sl2_defect(t) < 1e-12);

  const auto z = sl2_complete(MatrixXcd::Zero(3, 3), MatrixXcd::Zero(3, 3));
  CHECK(z.X.norm() < 1e-14);
  // [H, Y] = -2Y fails.
  CHECK_THROWS_AS(sl2_complete(-h, y), InvalidInput);
}

TEST_CASE("model metric exponents and duality") {
  for (double zeta : {0.1, 0.25, 0.4}) {
    for (auto flag : {FlagVariant::positive, FlagVariant::negative}) {
      const auto d = cusp_data(zeta, flag, flag == FlagVariant::positive ? 1 : 0, 1);
      const auto mm = model_metric_local(d, 2);
      const double delta = flag == FlagVariant::positive ? zeta : -zeta;
      CHECK(mm.delta == doctest::Approx(delta));
      CHECK(mm.exponents[0].z_exponent == doctest::Approx(delta));
      CHECK(mm.exponents[0].log_power == 1);
      CHECK(mm.exponents[1].log_power == -1);
      CHECK(mm.exponents[2].z_exponent == 0.0);
      CHECK(mm.exponents[2].log_power == 0);
      for (int i = 0; i < 5; ++i) {
        CHECK(mm.exponents[i].z_exponent == doctest::Approx(-mm.exponents[4 - i].z_exponent));
        CHECK(mm.exponents[i].log_power == -mm.exponents[4 - i].log_power);
      }
      for (double r : {1e-6, 0.01, 0.3}) {
        const double l = std::abs(std::log(r));
        CHECK(mm.coefficient(-1, r) / mm.coefficient(-2, r) == doctest::Approx(1.0 / (l * l)));
        CHECK(mm.coefficient(-2, r) * mm.coefficient(2, r) == doctest::Approx(1.0));
        CHECK(mm.coefficient(0, r) == 1.0);
      }
      CHECK_THROWS_AS(mm.coefficient(0, 1.5), InvalidInput);
    }
  }
}

TEST_CASE("subspace helpers") {
  MatrixXcd a(3, 2);
  a << 1, 0, 0, 1, 0, 0;
  MatrixXcd b(3, 2);
  b << 0, 0, 1, 0, 0, 1;
  const auto i = intersect(a, b, 1e-12);
  CHECK(i.cols() == 1);
  CHECK(std::abs(i(1, 0)) == doctest::Approx(1.0));
  CHECK(null_space(a.transpose(), 1e-12).cols() == 1);
  CHECK(contains(a, i, 1e-12));
  CHECK_FALSE(contains(i, a, 1e-12));
}
