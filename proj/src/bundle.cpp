#include "higgslab/bundle.hpp"

#include <cmath>
#include <numeric>

#include "higgslab/errors.hpp"

namespace higgslab::bundle {

std::string to_string(FlagVariant f) {
  switch (f) {
    case FlagVariant::positive: return "positive";
    case FlagVariant::negative: return "negative";
    case FlagVariant::trivial: return "trivial";
  }
  return "?";
}

FlagVariant flag_from_string(const std::string& s) {
  if (s == "positive" || s == "positive_flag") return FlagVariant::positive;
  if (s == "negative" || s == "negative_flag") return FlagVariant::negative;
  if (s == "trivial" || s == "trivial_flag") return FlagVariant::trivial;
  throw InvalidInput("unknown flag variant '" + s + "'");
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::stable: return "stable";
    case Classification::strictly_semistable: return "strictly_semistable";
    case Classification::unstable: return "unstable";
  }
  return "?";
}

double PunctureData::delta() const {
  switch (flag) {
    case FlagVariant::positive: return zeta;
    case FlagVariant::negative: return -zeta;
    case FlagVariant::trivial: return 0.0;
  }
  return 0.0;
}

int CyclicHiggsData::deg_K() const {
  return 2 * genus - 2 + static_cast<int>(punctures.size());
}
int CyclicHiggsData::deg_L2() const { return deg_L1 - deg_K(); }

const PunctureData& CyclicHiggsData::puncture(int id) const {
  for (const auto& p : punctures)
    if (p.id == id) return p;
  throw InvalidInput("no puncture with id " + std::to_string(id));
}

PunctureData normalize_puncture(PunctureData p) {
  if (p.zeta < 0.0) {
    p.zeta = -p.zeta;
    if (p.flag == FlagVariant::positive)
      p.flag = FlagVariant::negative;
    else if (p.flag == FlagVariant::negative)
      p.flag = FlagVariant::positive;
  }
  return p;
}

std::optional<Rational> exact_rational(double x, long long max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  // Continued-fraction convergents; accept the first one that round-trips exactly.
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(r);
    if (std::abs(a) > 9e15) break;
    long long ai = static_cast<long long>(a);
    long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    if (static_cast<double>(h1) / static_cast<double>(k1) == x) return Rational{h1, k1};
    double frac = r - a;
    if (frac == 0.0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

namespace {
Rational normalize(__int128 n, __int128 d) {
  if (d < 0) { n = -n; d = -d; }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) { __int128 t = a % b; a = b; b = t; }
  if (a == 0) a = 1;
  return Rational{static_cast<long long>(n / a), static_cast<long long>(d / a)};
}
}  // namespace

ParDeg from_int(long long k) {
  ParDeg p;
  p.value = static_cast<double>(k);
  p.exact = true;
  p.q = Rational{k, 1};
  return p;
}

ParDeg operator+(const ParDeg& a, const ParDeg& b) {
  ParDeg out;
  out.value = a.value + b.value;
  out.exact = a.exact && b.exact;
  if (out.exact) {
    out.q = normalize(static_cast<__int128>(a.q.num) * b.q.den +
                          static_cast<__int128>(b.q.num) * a.q.den,
                      static_cast<__int128>(a.q.den) * b.q.den);
    out.value = static_cast<double>(out.q.num) / static_cast<double>(out.q.den);
  }
  return out;
}

ParDeg scaled(const ParDeg& a, long long k) {
  ParDeg out = a;
  out.value = a.value * static_cast<double>(k);
  if (a.exact) out.q = normalize(static_cast<__int128>(a.q.num) * k, a.q.den);
  return out;
}

int compare(const ParDeg& a, const ParDeg& b) {
  if (a.exact && b.exact) {
    __int128 l = static_cast<__int128>(a.q.num) * b.q.den;
    __int128 r = static_cast<__int128>(b.q.num) * a.q.den;
    return l < r ? -1 : (l > r ? 1 : 0);
  }
  const double tol = 1e-12 * std::max({1.0, std::abs(a.value), std::abs(b.value)});
  if (std::abs(a.value - b.value) <= tol) return 0;
  return a.value < b.value ? -1 : 1;
}

double summand_weight(int i, const PunctureData& p) {
  const double d = p.delta();
  if (i > 0) return d;
  if (i < 0) return -d;
  return 0.0;
}

int summand_degree(int i, const CyclicHiggsData& data) {
  switch (i) {
    case 2: return data.deg_L2();
    case 1: return data.deg_L1;
    case 0: return 0;
    case -1: return -data.deg_L1;
    case -2: return -data.deg_L2();
  }
  throw InvalidInput("summand index must lie in -2..2");
}

ParDeg parabolic_degree_line_exact(int i, const CyclicHiggsData& data) {
  ParDeg total = from_int(summand_degree(i, data));
  if (i == 0) return total;
  for (const auto& p : data.punctures) {
    const double w = summand_weight(i, p);
    ParDeg term;
    term.value = -w;
    if (auto q = exact_rational(w)) {
      term.exact = true;
      term.q = Rational{-q->num, q->den};
    }
    total = total + term;
  }
  return total;
}

double parabolic_degree_line(int i, const CyclicHiggsData& data) {
  return parabolic_degree_line_exact(i, data).value;
}

AssumptionReport check_assumption_A(const CyclicHiggsData& data) {
  AssumptionReport rep;
  auto fail = [&](std::string clause) {
    rep.ok = false;
    rep.clause = std::move(clause);
    return rep;
  };
  if (data.genus < 0) return fail("genus must be non-negative");
  if (data.deg_K() <= 0) return fail("deg K(D) must be positive (negative Euler characteristic)");
  for (const auto& p : data.punctures) {
    const std::string tag = "puncture " + std::to_string(p.id) + ": ";
    if (!std::isfinite(p.zeta) || !(std::abs(p.zeta) < 0.5))
      return fail(tag + "weight outside (-1/2, 1/2)");
    if (p.zeta < 0.0) return fail(tag + "weight not normalized to [0, 1/2)");
    if (p.zeta != 0.0 && p.flag == FlagVariant::trivial)
      return fail(tag + "nonzero weight requires positive or negative isotropic flag");
    if (p.zeta == 0.0 && p.flag != FlagVariant::trivial)
      return fail(tag + "zero weight requires the trivial flag");
  }
  if (!data.tau_normalized) return fail("tau is not a global isomorphism");
  return rep;
}

bool milnor_wood_check(const CyclicHiggsData& data) {
  ParDeg p1 = parabolic_degree_line_exact(1, data);
  ParDeg k = from_int(data.deg_K());
  ParDeg neg = scaled(p1, -1);
  return compare(p1, k) <= 0 && compare(neg, k) <= 0;
}

StabilityVerdict check_stability(const CyclicHiggsData& data, bool gamma_is_zero) {
  auto a = check_assumption_A(data);
  if (!a.ok) throw PreconditionError("check_stability: assumption A violated: " + a.clause);
  StabilityVerdict v;
  ParDeg p1 = parabolic_degree_line_exact(1, data);
  ParDeg p2 = parabolic_degree_line_exact(2, data);
  ParDeg p12 = p1 + p2;
  v.pardeg_L2 = p2.value;
  v.pardeg_L1_plus_L2 = p12.value;
  // A nonzero beta needs pardeg(L1) >= -deg K(D); a nonzero gamma needs pardeg(L1) <= deg K(D).
  const ParDeg k = from_int(data.deg_K());
  const bool beta_vanishes = compare(p1, scaled(k, -1)) < 0;
  if (!gamma_is_zero) {
    if (beta_vanishes)
      throw PreconditionError("check_stability: beta must vanish since pardeg(L1) < -deg K(D)");
    if (compare(p1, k) > 0)
      throw PreconditionError("check_stability: gamma must vanish since pardeg(L1) > deg K(D)");
    return v;
  }
  if (beta_vanishes) {
    // Phi = tau only: L-1 + L-2 is invariant, isotropic and has pardeg = -pardeg(L1+L2) > 0.
    v.classification = Classification::unstable;
    v.witnesses = {"L-1+L-2 (pardeg > 0, beta vanishes)"};
    return v;
  }
  // pardeg(L1) against deg K / 2, compared as 2 pardeg(L1) against deg K.
  int cmp = compare(scaled(p1, 2), k);
  if (cmp < 0) {
    v.classification = Classification::stable;
  } else if (cmp == 0) {
    v.classification = Classification::strictly_semistable;
    v.witnesses = {"L1+L2 (pardeg = 0)"};
    if (compare(p2, from_int(0)) == 0) v.witnesses.insert(v.witnesses.begin(), "L2 (pardeg = 0)");
  } else {
    v.classification = Classification::unstable;
    v.witnesses = {"L1+L2 (pardeg > 0)"};
    int c2 = compare(p2, from_int(0));
    if (c2 > 0) v.witnesses.insert(v.witnesses.begin(), "L2 (pardeg > 0)");
    else if (c2 == 0) v.witnesses.insert(v.witnesses.begin(), "L2 (pardeg = 0)");
  }
  return v;
}

CMat5 higgs_pattern(cplx b, cplx c) {
  CMat5 phi = CMat5::Zero();
  phi(0, 3) = c;    // gamma dual: L1 -> L-2
  phi(1, 0) = 1.0;  // tau dual: L-2 -> L-1
  phi(1, 4) = c;    // gamma: L2 -> L-1
  phi(2, 1) = b;    // beta dual: L-1 -> L0
  phi(3, 2) = b;    // beta: L0 -> L1
  phi(4, 3) = 1.0;  // tau: L1 -> L2
  return phi;
}

const Mat5& orthogonal_pairing() {
  static const Mat5 q = [] {
    Mat5 m = Mat5::Zero();
    m(0, 4) = m(4, 0) = -1.0;
    m(1, 3) = m(3, 1) = 1.0;
    m(2, 2) = -1.0;
    return m;
  }();
  return q;
}

std::array<cplx, 6> char_poly_at_point(cplx b, cplx c) {
  return {cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0), -2.0 * b * b * c, cplx(0.0)};
}

IsotropyReport eigenvector_isotropy_check(cplx b, cplx c) {
  if (b == cplx(0.0) || c == cplx(0.0))
    throw PreconditionError("eigenvector_isotropy_check: b and c must be nonzero");
  IsotropyReport rep;
  const CMat5 phi = higgs_pattern(b, c);
  const Mat5& q = orthogonal_pairing();
  auto qform = [&](const CVec5& v) { return (v.transpose() * q.cast<cplx>() * v)(0, 0); };
  const double scale = std::max({1.0, std::norm(b * b * c), std::norm(b * b), std::norm(c)});

  CVec5 v0;
  v0 << -c, 0.0, 0.0, 0.0, 1.0;
  rep.q_values.push_back(qform(v0));
  rep.residuals.push_back((phi * v0).norm());

  const cplx base = std::pow(2.0 * b * b * c, 0.25);
  for (int k = 0; k < 4; ++k) {
    const cplx w = base * std::pow(cplx(0.0, 1.0), k);
    CVec5 v;
    v << b * b * c, w * w * w, w * w * b, w * b * b, b * b;
    rep.q_values.push_back(qform(v));
    rep.residuals.push_back((phi * v - w * v).norm());
  }
  rep.all_non_isotropic = true;
  for (const auto& qv : rep.q_values)
    if (std::abs(qv) <= 1e-10 * scale) rep.all_non_isotropic = false;
  return rep;
}

}  // namespace higgslab::bundle
