#include "concentrate/large_deviations.hpp"

#include <algorithm>
#include <cmath>

#include "concentrate/numeric.hpp"

namespace concentrate {

namespace {

constexpr double kTinyT = 1e-9;
constexpr double kGrowthCap = 1e6;
constexpr double kFlatSlope = 1e-9;

void check_origin(const LogMgf& mgf) {
  if (std::abs(mgf.lambda(0.0)) > 1e-9) {
    throw validation_error("log moment function must vanish at t = 0");
  }
}

// sup_{t in (lo_sign side)} t a - Lambda(t) over a one-sided range, by
// stationarity bisection with geometric bracket growth. Returns infinity
// when the objective keeps a bounded-away slope at the cap.
TailValue one_sided_sup(const LogMgf& mgf, double a, bool positive_side) {
  const double cap =
      positive_side ? std::min(mgf.t_max, kGrowthCap)
                    : std::min(-mgf.t_min, kGrowthCap);
  const double sgn = positive_side ? 1.0 : -1.0;
  auto objective = [&](double t) { return t * a - mgf.lambda(t); };
  // Stationarity: dlambda(t) = a; the slope approaches a from the correct
  // side near t = 0, so grow the bracket until it crosses.
  double hi = 1.0;
  auto gap = [&](double t) { return sgn * (a - mgf.dlambda(sgn * t)); };
  if (gap(kTinyT) <= 0.0) {
    // Stationary point at the inner edge: the supremum is flat at 0.
    return TailValue::finite(std::max(objective(sgn * kTinyT), 0.0));
  }
  while (hi < cap && gap(hi) > 0.0) hi *= 2.0;
  hi = std::min(hi, cap);
  if (gap(hi) > 0.0) {
    if (gap(hi) > kFlatSlope) return TailValue::infinite();
    return TailValue::finite(std::max(objective(sgn * hi), 0.0));
  }
  const double t_star =
      sgn * bisect_root([&](double t) { return gap(t); }, kTinyT, hi);
  return TailValue::finite(std::max(objective(t_star), 0.0));
}

}  // namespace

double TailValue::value() const {
  if (infinite_) throw numeric_domain_error("exponent is infinite");
  return value_;
}

double TailValue::as_double() const {
  if (infinite_) return value_ >= 0.0 ? kInf : -kInf;
  return value_;
}

LogMgf mgf_bernoulli(double q) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw validation_error("bernoulli parameter must be in (0,1)");
  }
  LogMgf mgf;
  mgf.lambda = [q](double t) {
    // log(q e^t + 1 - q), stable on both tails.
    if (t > 0.0) return t + std::log(q + (1.0 - q) * std::exp(-t));
    return std::log(q * std::exp(t) + 1.0 - q);
  };
  mgf.dlambda = [q](double t) {
    if (t > 0.0) {
      const double w = (1.0 - q) * std::exp(-t);
      return q / (q + w);
    }
    const double w = q * std::exp(t);
    return w / (w + 1.0 - q);
  };
  return mgf;
}

LogMgf mgf_gaussian() {
  LogMgf mgf;
  mgf.lambda = [](double t) { return 0.5 * t * t; };
  mgf.dlambda = [](double t) { return t; };
  return mgf;
}

LogMgf mgf_from_spectrum(const WeightedSpectrum& sp) {
  // Moment function of the surprisal -log p under p; evaluable at every t.
  LogMgf mgf;
  mgf.lambda = [sp](double t) {
    LogSumExp lse;
    for (const auto& e : sp.entries()) {
      lse.add(e.log_count + (1.0 - t) * e.log_value);
    }
    return lse.value();
  };
  mgf.dlambda = [sp](double t) {
    const double s = 1.0 - t;
    LogSumExp lse;
    for (const auto& e : sp.entries()) lse.add(e.log_count + s * e.log_value);
    const double log_z = lse.value();
    CompensatedSum mean;
    for (const auto& e : sp.entries()) {
      mean.add(std::exp(e.log_count + s * e.log_value - log_z) *
               (-e.log_value));
    }
    return mean.value();
  };
  return mgf;
}

LogMgf mgf_from_function(std::function<double(double)> lambda, double t_min,
                         double t_max) {
  LogMgf mgf;
  mgf.lambda = lambda;
  mgf.dlambda = [lambda](double t) {
    const double h = 1e-6 * std::max(1.0, std::abs(t));
    return (lambda(t + h) - lambda(t - h)) / (2.0 * h);
  };
  mgf.t_min = t_min;
  mgf.t_max = t_max;
  return mgf;
}

TailValue rate_function(const LogMgf& mgf, double R) {
  check_origin(mgf);
  const double slope0 = mgf.dlambda(0.0);
  if (R == slope0) return TailValue::finite(0.0);
  return one_sided_sup(mgf, R, /*positive_side=*/R > slope0);
}

SlopeConstants slope_constants(const LogMgf& mgf) {
  check_origin(mgf);
  // Richardson step for the one-sided slopes at 0.
  const double t0 = 1e-6;
  const double r2 =
      2.0 * mgf.dlambda(0.5 * t0) - mgf.dlambda(t0);
  const double r3 =
      2.0 * mgf.dlambda(-0.5 * t0) - mgf.dlambda(-t0);

  auto edge_slope = [&](bool positive) -> TailValue {
    const double cap =
        positive ? std::min(mgf.t_max, kGrowthCap)
                 : std::min(-mgf.t_min, kGrowthCap);
    const double sgn = positive ? 1.0 : -1.0;
    const double s1 = mgf.dlambda(sgn * 0.5 * cap);
    const double s2 = mgf.dlambda(sgn * cap);
    // Unbounded only when the slope keeps moving outward; an inward drift
    // is left for the ordering check to flag as non-convex.
    if (sgn * (s2 - s1) > 1e-6 * std::max(1.0, std::abs(s2))) {
      return TailValue::infinite(sgn);
    }
    return TailValue::finite(s2);
  };
  SlopeConstants out{edge_slope(true), r2, r3, edge_slope(false)};

  const double r1 = out.R1.is_infinite() ? kInf : out.R1.value();
  const double r4 = out.R4.is_infinite() ? -kInf : out.R4.value();
  if (!(r4 <= out.R3 + 1e-9) || !(out.R3 <= out.R2 + 1e-9) ||
      !(out.R2 <= r1 + 1e-9)) {
    throw validation_error("slope ordering violated: non-convex input");
  }
  return out;
}

TailExponents tail_exponents(const LogMgf& mgf, double a) {
  const SlopeConstants slopes = slope_constants(mgf);

  TailValue upper = TailValue::finite(0.0);
  if (a > slopes.R2 + 1e-12) {
    if (slopes.R1.is_infinite() || a <= slopes.R1.value()) {
      upper = one_sided_sup(mgf, a, /*positive_side=*/true);
    } else {
      upper = TailValue::infinite();
    }
  }

  TailValue lower = TailValue::finite(0.0);
  if (a < slopes.R3 - 1e-12) {
    if (slopes.R4.is_infinite() || a >= slopes.R4.value()) {
      lower = one_sided_sup(mgf, a, /*positive_side=*/false);
    } else {
      lower = TailValue::infinite();
    }
  }

  return TailExponents{upper, upper, lower, lower};
}

}  // namespace concentrate
