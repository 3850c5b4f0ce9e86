#include "concentrate/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "concentrate/numeric.hpp"

namespace concentrate {

namespace {

// Evaluation is excluded this close to the removable singularity at s = 1
// and replaced by the one-sided limit.
constexpr double kSingularGap = 1e-7;
constexpr double kEdgeS = 1e-9;
constexpr double kGrowthCap = 1e6;

// Root of the shared stationarity numerator
//   N(s) = psi'(s)(1-s) + r + psi(s),
// monotone on each side of s = 1 because N'(s) = psi''(s)(1-s).
double stationary_numerator(const RenyiProfile& p, double s, double r) {
  return p.dpsi(s) * (1.0 - s) + r + p.psi(s);
}

}  // namespace

double RenyiProfile::h_minus() const { return -dpsi(1.0 + 1e-6); }
double RenyiProfile::h_plus() const { return -dpsi(1.0 - 1e-6); }
double RenyiProfile::neg_dpsi0() const { return -dpsi(kEdgeS); }

double RenyiProfile::h_inf() const {
  if (h_inf_exact) return *h_inf_exact;
  const double probe = std::min(s_limit * (1.0 - 1e-9), kGrowthCap);
  return -dpsi(probe);
}

RenyiProfile profile_from_spectrum(const WeightedSpectrum& base) {
  RenyiProfile profile;
  profile.psi = [base](double s) { return renyi_psi(base, s); };
  profile.dpsi = [base](double s) {
    LogSumExp lse;
    for (const auto& e : base.entries()) lse.add(e.log_count + s * e.log_value);
    const double log_z = lse.value();
    CompensatedSum mean;
    for (const auto& e : base.entries()) {
      mean.add(std::exp(e.log_count + s * e.log_value - log_z) * e.log_value);
    }
    return mean.value();
  };
  profile.d2psi = [base](double s) {
    LogSumExp lse;
    for (const auto& e : base.entries()) lse.add(e.log_count + s * e.log_value);
    const double log_z = lse.value();
    CompensatedSum mean, second;
    for (const auto& e : base.entries()) {
      const double w = std::exp(e.log_count + s * e.log_value - log_z);
      mean.add(w * e.log_value);
      second.add(w * e.log_value * e.log_value);
    }
    const double m = mean.value();
    return std::max(second.value() - m * m, 0.0);
  };
  profile.h_inf_exact = -base.log_max_value();
  return profile;
}

RenyiProfile profile_from_function(std::function<double(double)> psi,
                                   double s_limit) {
  RenyiProfile profile;
  const double h = 1e-5;
  profile.psi = psi;
  profile.dpsi = [psi, h](double s) {
    const double lo = std::max(s - h, 0.0);
    return (psi(s + h) - psi(lo)) / (s + h - lo);
  };
  profile.d2psi = [psi, h](double s) {
    if (s < h) s = h;
    return (psi(s + h) - 2.0 * psi(s) + psi(s - h)) / (h * h);
  };
  profile.s_limit = s_limit;
  return profile;
}

DomainValue zeta_asymptotic(const RenyiProfile& profile, double a) {
  const double h_plus = -profile.dpsi(1.0 - kSingularGap);
  if (a <= h_plus) return DomainValue{0.0, true};

  const double upper_slope = profile.neg_dpsi0();
  if (a >= upper_slope) {
    // Supremum saturates at s = 0; the Legendre formula no longer
    // represents the tail exponent here.
    return DomainValue{a - profile.psi(0.0), false};
  }
  const double s_star = bisect_root(
      [&](double s) { return profile.dpsi(s) + a; }, kEdgeS,
      1.0 - kSingularGap);
  const double value = (1.0 - s_star) * a - profile.psi(s_star);
  return DomainValue{std::max(value, 0.0), true};
}

double zeta_c_asymptotic(const RenyiProfile& profile, double a) {
  const double h_minus = -profile.dpsi(1.0 + kSingularGap);
  if (a >= h_minus) return 0.0;
  if (a < profile.h_inf()) return kInf;

  double hi = 2.0;
  const double cap = std::min(profile.s_limit * (1.0 - 1e-9), kGrowthCap);
  while (hi < cap && profile.dpsi(hi) + a < 0.0) hi *= 2.0;
  hi = std::min(hi, cap);
  if (profile.dpsi(hi) + a < 0.0) {
    // No stationary point below the cap: a sits at the H_inf edge.
    return (1.0 - hi) * a - profile.psi(hi);
  }
  const double s_star = bisect_root(
      [&](double s) { return profile.dpsi(s) + a; }, 1.0 + kSingularGap, hi);
  return std::max((1.0 - s_star) * a - profile.psi(s_star), 0.0);
}

std::pair<double, double> rate_constant(const RenyiProfile& profile) {
  return {-profile.dpsi(1.0 + 1e-6), -profile.dpsi(1.0 - 1e-6)};
}

double rate_failure_exponent(const RenyiProfile& profile, double r) {
  if (!(r >= 0.0)) throw validation_error("exponent r must be >= 0");
  const double h_inf = profile.h_inf();
  if (r >= h_inf) return h_inf;
  if (r == 0.0) return -profile.dpsi(1.0 + kSingularGap);

  // N(s) decreases from r at s = 1+ and crosses 0 before the objective
  // flattens toward H_inf.
  double hi = 2.0;
  const double cap = std::min(profile.s_limit * (1.0 - 1e-9), kGrowthCap);
  while (hi < cap && stationary_numerator(profile, hi, r) > 0.0) hi *= 2.0;
  hi = std::min(hi, cap);
  if (stationary_numerator(profile, hi, r) > 0.0) return h_inf;
  const double s_star = bisect_root(
      [&](double s) { return stationary_numerator(profile, s, r); },
      1.0 + kSingularGap, hi);
  if (s_star - 1.0 <= kSingularGap * 1.5) {
    return -profile.dpsi(1.0 + kSingularGap);
  }
  return (r + profile.psi(s_star)) / (1.0 - s_star);
}

double rate_success_exponent_pflec(const RenyiProfile& profile, double r) {
  if (!(r >= 0.0)) throw validation_error("exponent r must be >= 0");
  const double threshold = profile.neg_dpsi0() - profile.psi(0.0);
  if (r >= threshold) return profile.psi(0.0);
  if (r == 0.0) return -profile.dpsi(1.0 - kSingularGap);

  const double s_star = bisect_root(
      [&](double s) { return stationary_numerator(profile, s, r); }, kEdgeS,
      1.0 - kSingularGap);
  if (1.0 - s_star <= kSingularGap * 1.5) {
    return -profile.dpsi(1.0 - kSingularGap);
  }
  return (s_star * r + profile.psi(s_star)) / (1.0 - s_star);
}

double dflec_regime_boundary(const RenyiProfile& profile) {
  return -0.5 * profile.dpsi(0.5) - profile.psi(0.5);
}

double rate_success_exponent_dflec(const RenyiProfile& profile, double r) {
  if (!(r >= 0.0)) throw validation_error("exponent r must be >= 0");
  if (r <= dflec_regime_boundary(profile)) {
    return rate_success_exponent_pflec(profile, r);
  }
  return 2.0 * profile.psi(0.5) + r;
}

RateCurve sample_zeta_curve(const RenyiProfile& profile, int points,
                            double a_lo, double a_hi) {
  if (points < 2) throw validation_error("curve needs at least 2 points");
  RateCurve curve;
  curve.label = CurveLabel::zeta;
  for (int i = 0; i < points; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / (points - 1);
    curve.a.push_back(a);
    curve.value.push_back(zeta_asymptotic(profile, a).value);
  }
  return curve;
}

RateCurve sample_zeta_c_curve(const RenyiProfile& profile, int points,
                              double a_lo, double a_hi) {
  if (points < 2) throw validation_error("curve needs at least 2 points");
  RateCurve curve;
  curve.label = CurveLabel::zeta_c;
  for (int i = 0; i < points; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / (points - 1);
    curve.a.push_back(a);
    curve.value.push_back(zeta_c_asymptotic(profile, a));
  }
  return curve;
}

RateCurve step_K_curve(double H, int points, double a_lo, double a_hi) {
  if (points < 2) throw validation_error("curve needs at least 2 points");
  RateCurve curve;
  curve.label = CurveLabel::K;
  for (int i = 0; i < points; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / (points - 1);
    curve.a.push_back(a);
    curve.value.push_back(a < H ? 0.0 : 1.0);
  }
  return curve;
}

RateFormula rate_formula_from_name(const std::string& name) {
  if (name == "const") return RateFormula::constant;
  if (name == "fail") return RateFormula::failure;
  if (name == "succ-p") return RateFormula::success_pflec;
  if (name == "succ-d") return RateFormula::success_dflec;
  throw validation_error("unknown formula: " + name);
}

namespace {

void require_curve(const RateCurve& c, const char* what) {
  if (c.a.size() < 2 || c.a.size() != c.value.size()) {
    throw validation_error(std::string("formula needs a sampled ") + what +
                           " curve");
  }
  for (std::size_t i = 1; i < c.a.size(); ++i) {
    if (!(c.a[i] > c.a[i - 1])) {
      throw validation_error("curve grid must be strictly increasing");
    }
  }
}

// sup{R | K(R) <= eps} for a nondecreasing sampled K.
double grid_constant(const RateCurve& K, double eps) {
  require_curve(K, "K");
  if (K.value.front() > eps) {
    throw numeric_domain_error("feasible set empty on the grid");
  }
  for (std::size_t i = 1; i < K.a.size(); ++i) {
    if (K.value[i] > eps) {
      const double t = (eps - K.value[i - 1]) / (K.value[i] - K.value[i - 1]);
      return K.a[i - 1] + t * (K.a[i] - K.a[i - 1]);
    }
  }
  return K.a.back();
}

// sup{R | zeta_c(R) >= r} for a nonincreasing curve with possible +inf head.
double grid_failure(const RateCurve& zc, double r) {
  require_curve(zc, "zeta_c");
  if (!(zc.value.front() >= r)) {
    throw numeric_domain_error("feasible set empty on the grid");
  }
  for (std::size_t i = 1; i < zc.a.size(); ++i) {
    if (zc.value[i] < r) {
      if (std::isinf(zc.value[i - 1])) return zc.a[i - 1];
      const double t = (r - zc.value[i - 1]) / (zc.value[i] - zc.value[i - 1]);
      return zc.a[i - 1] + t * (zc.a[i] - zc.a[i - 1]);
    }
  }
  return zc.a.back();
}

// sup{a - zeta(a) | zeta(a) <= r}; the objective is linear on every grid
// segment, so only feasible grid points and the crossing point matter.
double grid_success_pflec(const RateCurve& z, double r) {
  require_curve(z, "zeta");
  double best = -kInf;
  for (std::size_t i = 0; i < z.a.size(); ++i) {
    if (z.value[i] <= r) best = std::max(best, z.a[i] - z.value[i]);
    if (i > 0 && z.value[i - 1] <= r && z.value[i] > r) {
      const double t = (r - z.value[i - 1]) / (z.value[i] - z.value[i - 1]);
      const double a_cross = z.a[i - 1] + t * (z.a[i] - z.a[i - 1]);
      best = std::max(best, a_cross - r);
    }
  }
  if (best == -kInf) {
    throw numeric_domain_error("feasible set empty on the grid");
  }
  return best;
}

// sup{a/2 - g(a) | g(a) + a/2 <= r} with g the running infimum of
// zeta(a') - a'/2.
double grid_success_dflec(const RateCurve& z, double r) {
  require_curve(z, "zeta");
  const std::size_t n = z.a.size();
  std::vector<double> g(n);
  double running = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    running = std::min(running, z.value[i] - 0.5 * z.a[i]);
    g[i] = running;
  }
  double best = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = g[i] + 0.5 * z.a[i];
    if (m <= r) best = std::max(best, 0.5 * z.a[i] - g[i]);
    if (i > 0) {
      const double m_prev = g[i - 1] + 0.5 * z.a[i - 1];
      if (m_prev <= r && m > r) {
        // m is piecewise linear between samples; interpolate the crossing.
        const double t = (r - m_prev) / (m - m_prev);
        const double a_cross = z.a[i - 1] + t * (z.a[i] - z.a[i - 1]);
        const double g_cross = g[i - 1] + t * (g[i] - g[i - 1]);
        best = std::max(best, 0.5 * a_cross - g_cross);
      }
    }
  }
  if (best == -kInf) {
    throw numeric_domain_error("feasible set empty on the grid");
  }
  return best;
}

}  // namespace

double rate_from_curves(const RateCurve& curve_K, const RateCurve& curve_zeta,
                      const RateCurve& curve_zeta_c, double eps_or_r,
                      RateFormula which) {
  switch (which) {
    case RateFormula::constant:
      return grid_constant(curve_K, eps_or_r);
    case RateFormula::failure:
      return grid_failure(curve_zeta_c, eps_or_r);
    case RateFormula::success_pflec:
      return grid_success_pflec(curve_zeta, eps_or_r);
    case RateFormula::success_dflec:
      return grid_success_dflec(curve_zeta, eps_or_r);
  }
  throw validation_error("unknown formula selector");
}

}  // namespace concentrate
