#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "concentrate/spectrum.hpp"

namespace concentrate {

// The function s -> psi(s) (nats per copy) with first and second
// derivatives, differentiable away from s = 1. h_inf_exact is set when the
// s -> infinity slope is known in closed form (spectra: -log v_max);
// s_limit caps evaluation for tabulated sources.
struct RenyiProfile {
  std::function<double(double)> psi;
  std::function<double(double)> dpsi;
  std::function<double(double)> d2psi;
  std::optional<double> h_inf_exact;
  double s_limit = 1e300;

  double h_minus() const;   // -psi'(1+0), probed at 1e-6
  double h_plus() const;    // -psi'(1-0)
  double h_inf() const;     // lim -psi'(s)
  double neg_dpsi0() const; // -psi'(+0)
};

// Analytic profile of an i.i.d. source (psi' and psi'' via the tilted
// weights of the spectrum).
RenyiProfile profile_from_spectrum(const WeightedSpectrum& base);

// Numerically differentiated profile around an arbitrary psi (central
// differences, step 1e-5).
RenyiProfile profile_from_function(std::function<double(double)> psi,
                                   double s_limit = 1e300);

// zeta(a): 0 for a <= -psi'(1-0), else the Legendre value
// sup_{0<=s<=1} (1-s)a - psi(s). The formula represents the tail exponent
// only for a < -psi'(+0); beyond that the supremum saturates at s = 0 and
// in_domain flips off.
struct DomainValue {
  double value;
  bool in_domain;
};

DomainValue zeta_asymptotic(const RenyiProfile& profile, double a);

// zeta_c(a): 0 for a >= -psi'(1+0), +inf for a < H_inf, else
// sup_{s>=1} (1-s)a - psi(s).
double zeta_c_asymptotic(const RenyiProfile& profile, double a);

// (lower, upper) = (-psi'(1+delta), -psi'(1-delta)), delta = 1e-6. The two
// coincide for differentiable profiles and then equal the entropy rate; when
// they differ the pair is the honest bracket on the constant-constraint
// rate.
std::pair<double, double> rate_constant(const RenyiProfile& profile);

// sup_{s>=1} (r + psi(s))/(1-s); equals H_inf once r >= H_inf.
double rate_failure_exponent(const RenyiProfile& profile, double r);

// min_{0<=s<=1} (s r + psi(s))/(1-s); equals psi(0) once
// r >= -psi'(+0) - psi(0).
double rate_success_exponent_pflec(const RenyiProfile& profile, double r);

// PFLEC branch up to r* = -psi'(1/2)/2 - psi(1/2), then 2 psi(1/2) + r.
double rate_success_exponent_dflec(const RenyiProfile& profile, double r);
double dflec_regime_boundary(const RenyiProfile& profile);  // r*

enum class CurveLabel { K, zeta, zeta_c, eta, zeta_half, zeta_c_half };

// Sampled rate curve a -> value; +inf entries are allowed for exponent
// curves.
struct RateCurve {
  std::vector<double> a;
  std::vector<double> value;
  CurveLabel label = CurveLabel::zeta;
};

RateCurve sample_zeta_curve(const RenyiProfile& profile, int points,
                            double a_lo, double a_hi);
RateCurve sample_zeta_c_curve(const RenyiProfile& profile, int points,
                              double a_lo, double a_hi);
// Step curve jumping 0 -> 1 at the entropy rate; the i.i.d. K(a).
RateCurve step_K_curve(double H, int points, double a_lo, double a_hi);

enum class RateFormula { constant, failure, success_pflec, success_dflec };

RateFormula rate_formula_from_name(const std::string& name);

// Grid evaluation of the information-spectrum formulas with linear
// interpolation between samples:
//   constant:      sup{R | K(R) <= eps}
//   failure:       sup{R | zeta_c(R) >= r}
//   success_pflec: sup{a - zeta(a) | zeta(a) <= r}
//   success_dflec: sup{a/2 - g(a) | g(a) + a/2 <= r},
//                  g = running inf of zeta(a') - a'/2.
double rate_from_curves(const RateCurve& curve_K, const RateCurve& curve_zeta,
                      const RateCurve& curve_zeta_c, double eps_or_r,
                      RateFormula which);

}  // namespace concentrate
