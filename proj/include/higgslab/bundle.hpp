#pragma once
// Cyclic parabolic SO0(2,3) data. Summands are indexed -2..2; arrays use index i+2.
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "higgslab/types.hpp"

namespace higgslab::bundle {

enum class FlagVariant { positive, negative, trivial };
std::string to_string(FlagVariant f);
FlagVariant flag_from_string(const std::string& s);

struct PunctureData {
  int id = 0;
  double zeta = 0.0;
  FlagVariant flag = FlagVariant::trivial;
  // Signed flag weight: +zeta or -zeta.
  double delta() const;
};

// Coefficient of the form coeff * z^power in a chart coordinate.
struct PowerCoefficient {
  cplx coeff{0.0, 0.0};
  int power = 0;
  bool is_zero() const { return coeff == cplx(0.0, 0.0); }
};

struct CyclicHiggsData {
  int genus = 0;
  int deg_L1 = 0;
  std::vector<PunctureData> punctures;
  PowerCoefficient beta;
  PowerCoefficient gamma;
  bool tau_normalized = true;

  int deg_K() const;  // 2g - 2 + #punctures
  int deg_L2() const;
  const PunctureData& puncture(int id) const;
};

// Moves a negative zeta into the flag sign.
PunctureData normalize_puncture(PunctureData p);

struct Rational {
  long long num = 0;
  long long den = 1;
};
std::optional<Rational> exact_rational(double x, long long max_den = 1000000);

struct ParDeg {
  double value = 0.0;
  bool exact = false;
  Rational q;  // valid when exact
};
int compare(const ParDeg& a, const ParDeg& b);  // -1, 0, +1
ParDeg operator+(const ParDeg& a, const ParDeg& b);
ParDeg scaled(const ParDeg& a, long long k);
ParDeg from_int(long long k);

double summand_weight(int i, const PunctureData& p);
int summand_degree(int i, const CyclicHiggsData& data);
ParDeg parabolic_degree_line_exact(int i, const CyclicHiggsData& data);
double parabolic_degree_line(int i, const CyclicHiggsData& data);

struct AssumptionReport {
  bool ok = true;
  std::string clause;  // first violated clause
};
AssumptionReport check_assumption_A(const CyclicHiggsData& data);

bool milnor_wood_check(const CyclicHiggsData& data);

enum class Classification { stable, strictly_semistable, unstable };
std::string to_string(Classification c);

struct StabilityVerdict {
  Classification classification = Classification::stable;
  std::vector<std::string> witnesses;
  double pardeg_L2 = 0.0;
  double pardeg_L1_plus_L2 = 0.0;
};
StabilityVerdict check_stability(const CyclicHiggsData& data, bool gamma_is_zero);

// Frame order (e_-2, e_-1, e_0, e_1, e_2); tau coefficient 1.
CMat5 higgs_pattern(cplx b, cplx c);
const Mat5& orthogonal_pairing();

// Coefficients of det(lambda - Phi), highest degree first (6 entries).
std::array<cplx, 6> char_poly_at_point(cplx b, cplx c);

struct IsotropyReport {
  bool all_non_isotropic = false;
  std::vector<cplx> q_values;  // lambda=0 vector first, then the four omega-vectors
  std::vector<double> residuals;  // ||Phi v - lambda v||
};
IsotropyReport eigenvector_isotropy_check(cplx b, cplx c);

}  // namespace higgslab::bundle
