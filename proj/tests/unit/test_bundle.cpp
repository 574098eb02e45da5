#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "higgslab/bundle.hpp"
#include "higgslab/errors.hpp"

using namespace higgslab;
using namespace higgslab::bundle;

namespace {
CyclicHiggsData make_data(int genus, int deg_l1, std::vector<PunctureData> p = {}) {
  CyclicHiggsData d;
  d.genus = genus;
  d.deg_L1 = deg_l1;
  d.punctures = std::move(p);
  d.beta.coeff = 1.0;
  return d;
}

// Independent classification: enumerate every isotropic Phi-invariant sub-sum of the line
// summands and take the largest parabolic degree (integer arithmetic, weights are k / 20).
Classification brute_force(int genus, int deg_l1, const std::vector<int>& signed_twentieths) {
  const int n = static_cast<int>(signed_twentieths.size());
  const int deg_k = 2 * genus - 2 + n;
  long long w = 0;
  for (int k : signed_twentieths) w += k;
  // pardeg(L_i) * 20 for i = -2..2; L1 and L2 carry the signed flag weight.
  const long long p1 = 20LL * deg_l1 - w, p2 = 20LL * (deg_l1 - deg_k) - w;
  const long long par[5] = {-p2, -p1, 0, p1, p2};
  const bool beta = p1 >= -20LL * deg_k;  // beta can be nonzero
  // Edges of Phi with gamma = 0: tau dual, tau, and beta dual, beta when present.
  std::vector<std::pair<int, int>> edges = {{-2, -1}, {1, 2}};
  if (beta) {
    edges.push_back({-1, 0});
    edges.push_back({0, 1});
  }
  long long worst = std::numeric_limits<long long>::min();
  for (int mask = 1; mask < 32; ++mask) {
    auto in = [&](int i) { return (mask >> (i + 2)) & 1; };
    if (in(0)) continue;
    bool ok = true;
    for (int i = 1; i <= 2; ++i) ok = ok && !(in(i) && in(-i));
    for (const auto& [a, b] : edges) ok = ok && (!in(a) || in(b));
    if (!ok) continue;
    long long total = 0;
    for (int i = -2; i <= 2; ++i)
      if (in(i)) total += par[i + 2];
    worst = std::max(worst, total);
  }
  if (worst > 0) return Classification::unstable;
  if (worst == 0) return Classification::strictly_semistable;
  return Classification::stable;
}

std::complex<double> poly_eval(const std::array<cplx, 6>& c, cplx x) {
  cplx acc = 0.0;
  for (const auto& a : c) acc = acc * x + a;
  return acc;
}
}  // namespace

TEST_CASE("parabolic degree of a line summand") {
  auto d = make_data(2, -1, {{0, 0.25, FlagVariant::negative}});
  const auto p = parabolic_degree_line_exact(1, d);
  CHECK(p.value == doctest::Approx(-0.75));
  REQUIRE(p.exact);
  CHECK(p.q.num * 4 == -3 * p.q.den);
  CHECK(parabolic_degree_line(0, d) == 0.0);
  CHECK(parabolic_degree_line(-1, d) == doctest::Approx(0.75));
  // The five summands have total parabolic degree zero.
  double total = 0.0;
  for (int i = -2; i <= 2; ++i) total += parabolic_degree_line(i, d);
  CHECK(std::abs(total) < 1e-15);
}

TEST_CASE("assumption A clauses") {
  auto d = make_data(2, 0, {{0, 0.6, FlagVariant::positive}});
  auto r = check_assumption_A(d);
  CHECK_FALSE(r.ok);
  CHECK(r.clause.find("weight outside") != std::string::npos);
  d.punctures[0] = {0, 0.3, FlagVariant::trivial};
  r = check_assumption_A(d);
  CHECK_FALSE(r.ok);
  CHECK(r.clause.find("flag") != std::string::npos);
  d.punctures[0] = {0, 0.0, FlagVariant::positive};
  CHECK_FALSE(check_assumption_A(d).ok);
  CHECK(check_assumption_A(make_data(2, 0)).ok);
  CHECK_FALSE(check_assumption_A(make_data(1, 0)).ok);  // deg K = 0
  CHECK(check_assumption_A(make_data(0, 0, {{0, 0.1, FlagVariant::positive},
                                            {1, 0.2, FlagVariant::negative},
                                            {2, 0.3, FlagVariant::positive}}))
            .ok);
  CHECK_THROWS_AS(check_stability(make_data(1, 0), true), PreconditionError);
}

TEST_CASE("normalizing a negative weight moves the sign to the flag") {
  const auto p = normalize_puncture({3, -0.2, FlagVariant::positive});
  CHECK(p.zeta == doctest::Approx(0.2));
  CHECK(p.flag == FlagVariant::negative);
  CHECK(p.delta() == doctest::Approx(-0.2));
}

TEST_CASE("milnor-wood inequality") {
  CHECK(milnor_wood_check(make_data(2, 2)));
  CHECK(milnor_wood_check(make_data(2, -2)));
  CHECK_FALSE(milnor_wood_check(make_data(2, 3)));
  CHECK_FALSE(milnor_wood_check(make_data(2, -3)));
  // genus 1 with one puncture: deg K = 1, pardeg(L1) = -1 -+ 0.3
  CHECK_FALSE(milnor_wood_check(make_data(1, -1, {{0, 0.3, FlagVariant::positive}})));
  CHECK(milnor_wood_check(make_data(1, -1, {{0, 0.3, FlagVariant::negative}})));
}

TEST_CASE("three quarter-weight punctures on the sphere") {
  const auto d = make_data(0, 0, {{0, 0.25, FlagVariant::positive},
                                 {1, 0.25, FlagVariant::positive},
                                 {2, 0.25, FlagVariant::positive}});
  CHECK(parabolic_degree_line(1, d) == doctest::Approx(-0.75));
  CHECK(parabolic_degree_line(-1, d) == doctest::Approx(0.75));
  CHECK(check_stability(d, true).classification == Classification::stable);
}

TEST_CASE("stability of closed-surface examples") {
  CHECK(check_stability(make_data(2, 1), true).classification ==
        Classification::strictly_semistable);
  CHECK(check_stability(make_data(2, 0), true).classification == Classification::stable);
  CHECK(check_stability(make_data(2, 2), true).classification == Classification::unstable);
  CHECK(check_stability(make_data(2, 2), false).classification == Classification::stable);
  const auto v = check_stability(make_data(2, 2), true);
  CHECK_FALSE(v.witnesses.empty());
  CHECK(to_string(Classification::strictly_semistable).size() > 0);
}

TEST_CASE("stability agrees with brute force over a grid") {
  const std::vector<int> zetas = {2, 5, 8};  // twentieths
  int compared = 0;
  for (int genus = 0; genus <= 3; ++genus) {
    for (int np = 0; np <= 3; ++np) {
      if (2 * genus - 2 + np <= 0) continue;
      for (int deg = -5; deg <= 5; ++deg) {
        const int combos = 1 << np;
        for (int flags = 0; flags < combos; ++flags) {
          for (int zi = 0; zi < (np ? 3 : 1); ++zi) {
            std::vector<PunctureData> ps;
            std::vector<int> tw;
            for (int k = 0; k < np; ++k) {
              const int z = zetas[(zi + k) % 3];
              const bool pos = (flags >> k) & 1;
              ps.push_back({k, z / 20.0, pos ? FlagVariant::positive : FlagVariant::negative});
              tw.push_back(pos ? z : -z);
            }
            const auto d = make_data(genus, deg, ps);
            const auto v = check_stability(d, true);
            CHECK(v.classification == brute_force(genus, deg, tw));
            if (v.classification == Classification::stable) CHECK(milnor_wood_check(d));
            if (milnor_wood_check(d))
              CHECK(check_stability(d, false).classification == Classification::stable);
            else
              CHECK_THROWS_AS(check_stability(d, false), PreconditionError);
            ++compared;
          }
        }
      }
    }
  }
  CHECK(compared > 500);
}

TEST_CASE("characteristic polynomial") {
  auto c = char_poly_at_point(1.0, 1.0);
  const std::array<cplx, 6> want1 = {1.0, 0.0, 0.0, 0.0, -2.0, 0.0};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(c[i] - want1[i]) < 1e-14);
  c = char_poly_at_point(1.0, -0.5);
  const std::array<cplx, 6> want2 = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(c[i] - want2[i]) < 1e-14);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const cplx b(g(rng), g(rng)), cc(g(rng), g(rng)), lam(g(rng), g(rng));
    const CMat5 phi = higgs_pattern(b, cc);
    const cplx det = (lam * CMat5::Identity() - phi).determinant();
    const auto poly = char_poly_at_point(b, cc);
    CHECK(std::abs(poly_eval(poly, lam) - det) < 1e-10 * (1.0 + std::abs(det)));
  }
}

TEST_CASE("higgs field is skew for the orthogonal pairing") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  const Mat5& q = orthogonal_pairing();
  for (int k = 0; k < 20; ++k) {
    const CMat5 phi = higgs_pattern({g(rng), g(rng)}, {g(rng), g(rng)});
    const CMat5 s = phi.transpose() * q.cast<cplx>() + q.cast<cplx>() * phi;
    CHECK(s.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("eigenvector isotropy at a generic point") {
  const auto r = eigenvector_isotropy_check(1.0, 1.0);
  REQUIRE(r.q_values.size() == 5);
  for (double res : r.residuals) CHECK(res < 1e-10);
  CHECK_FALSE(r.all_non_isotropic);
  CHECK_THROWS_AS(eigenvector_isotropy_check(1.0, 0.0), PreconditionError);
}

TEST_CASE("beta forced to vanish makes the bundle unstable") {
  // genus 0, three punctures: deg K = 1, and deg L1 = -3 leaves no room for beta.
  const auto d = make_data(0, -3, {{0, 0.25, FlagVariant::positive},
                                  {1, 0.25, FlagVariant::positive},
                                  {2, 0.25, FlagVariant::positive}});
  CHECK_FALSE(milnor_wood_check(d));
  const auto v = check_stability(d, true);
  CHECK(v.classification == Classification::unstable);
  REQUIRE(v.witnesses.size() == 1);
  CHECK(v.witnesses[0].find("L-1+L-2") == 0);
  CHECK_THROWS_AS(check_stability(d, false), PreconditionError);
}
