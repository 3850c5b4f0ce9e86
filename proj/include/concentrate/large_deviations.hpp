#pragma once

#include <functional>

#include "concentrate/spectrum.hpp"

namespace concentrate {

// A possibly infinite exponent; infinity is a tagged state, never a sentinel
// double.
class TailValue {
 public:
  static TailValue finite(double v) { return TailValue(v, false); }
  static TailValue infinite(double sign = 1.0) {
    return TailValue(sign, true);
  }
  bool is_infinite() const { return infinite_; }
  double value() const;      // throws when infinite
  double as_double() const;  // signed infinity when infinite

 private:
  TailValue(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

// Limit logarithmic moment function Lambda(t) with derivative; convex,
// Lambda(0) = 0.
struct LogMgf {
  std::function<double(double)> lambda;
  std::function<double(double)> dlambda;
  double t_min = -1e300;
  double t_max = 1e300;
};

LogMgf mgf_bernoulli(double q);
LogMgf mgf_gaussian();  // Lambda(t) = t^2 / 2
// Lambda(t) = psi(1 - t) of the spectrum: the moment function of the
// eigenvalue surprisal -log p under p.
LogMgf mgf_from_spectrum(const WeightedSpectrum& sp);
LogMgf mgf_from_function(std::function<double(double)> lambda,
                         double t_min = -1e300, double t_max = 1e300);

// Legendre transform Lambda*(R) = sup_t tR - Lambda(t); infinite when the
// supremum diverges (search bounds grow geometrically to 1e6).
TailValue rate_function(const LogMgf& mgf, double R);

// Slopes of Lambda at +inf, +0, -0, -inf; ordered R4 <= R3 <= R2 <= R1 or a
// validation error (non-convex input).
struct SlopeConstants {
  TailValue R1;
  double R2;
  double R3;
  TailValue R4;  // value() is the (negative) slope; tagged when unbounded
};

SlopeConstants slope_constants(const LogMgf& mgf);

// Upper/lower tail exponents of X_n/n at level a; the >= / > and <= / <
// variants coincide.
struct TailExponents {
  TailValue upper_ge;
  TailValue upper_gt;
  TailValue lower_le;
  TailValue lower_lt;
};

TailExponents tail_exponents(const LogMgf& mgf, double a);

}  // namespace concentrate
