#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "concentrate/asymptotics.hpp"
#include "concentrate/numeric.hpp"
#include "concentrate/sampling.hpp"

using namespace concentrate;

namespace {

WeightedSpectrum sp_from(std::initializer_list<double> values) {
  std::vector<double> v(values);
  return WeightedSpectrum::from_values(v);
}

// Dense-grid oracles: plain extremization over s with two zoom rounds, no
// derivative machinery.
template <typename F>
double zoomed_grid_max(F&& f, double lo, double hi, int points = 20001,
                       int rounds = 3) {
  double best = -kInf;
  double best_s = lo;
  for (int round = 0; round < rounds; ++round) {
    const double step = (hi - lo) / points;
    for (int i = 0; i <= points; ++i) {
      const double s = lo + step * i;
      const double v = f(s);
      if (v > best) {
        best = v;
        best_s = s;
      }
    }
    lo = std::max(lo, best_s - 2.0 * step);
    hi = std::min(hi, best_s + 2.0 * step);
  }
  return best;
}

double grid_zeta(const RenyiProfile& pr, double a) {
  const double best = zoomed_grid_max(
      [&](double s) { return (1.0 - s) * a - pr.psi(s); }, 0.0, 1.0);
  return std::max(best, 0.0);
}

double grid_zeta_c(const RenyiProfile& pr, double a, double s_max = 400.0) {
  const double best = zoomed_grid_max(
      [&](double s) { return (1.0 - s) * a - pr.psi(s); }, 1.0, s_max);
  return std::max(best, 0.0);
}

double grid_f1(const RenyiProfile& pr, double r, double s_max = 200.0) {
  return zoomed_grid_max(
      [&](double s) { return (r + pr.psi(s)) / (1.0 - s); }, 1.0 + 1e-6,
      s_max);
}

double grid_f2(const RenyiProfile& pr, double r) {
  return -zoomed_grid_max(
      [&](double s) { return -(s * r + pr.psi(s)) / (1.0 - s); }, 1e-6,
      1.0 - 1e-6);
}

const WeightedSpectrum kBase = sp_from({0.75, 0.25});

}  // namespace

TEST_CASE("profile closed forms") {
  const auto uniform = profile_from_spectrum(
      sp_from({0.2, 0.2, 0.2, 0.2, 0.2}));
  for (double s : {0.1, 0.5, 2.0, 10.0}) {
    CHECK(uniform.psi(s) ==
          doctest::Approx((1.0 - s) * std::log(5.0)).epsilon(1e-12));
    CHECK(uniform.dpsi(s) == doctest::Approx(-std::log(5.0)).epsilon(1e-12));
    CHECK(uniform.d2psi(s) == doctest::Approx(0.0).epsilon(1e-12));
  }
  const auto point = profile_from_spectrum(sp_from({1.0}));
  CHECK(point.psi(0.3) == 0.0);
  CHECK(point.psi(3.0) == 0.0);

  const auto pr = profile_from_spectrum(kBase);
  CHECK(pr.psi(0.5) ==
        doctest::Approx(std::log(std::sqrt(0.75) + std::sqrt(0.25)))
            .epsilon(1e-14));
  CHECK(std::abs(pr.psi(1.0)) <= 1e-12);
}

TEST_CASE("profile derivative consistency and convexity") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 30; ++i) {
    const auto sp = random_spectrum(rng, 6, 3);
    const auto pr = profile_from_spectrum(sp);
    for (double s : {0.2, 0.7, 1.3, 2.4, 5.0}) {
      const double h = 1e-5;
      const double fd = (pr.psi(s + h) - pr.psi(s - h)) / (2.0 * h);
      CHECK(pr.dpsi(s) == doctest::Approx(fd).epsilon(1e-6));
      CHECK(pr.d2psi(s) >= -1e-8);
    }
    // H_inf <= H_- <= H_+ <= -psi'(0+)
    CHECK(pr.h_inf() <= pr.h_minus() + 1e-9);
    CHECK(pr.h_minus() <= pr.h_plus() + 1e-9);
    CHECK(pr.h_plus() <= pr.neg_dpsi0() + 1e-9);
  }
}

TEST_CASE("zeta branches and grid oracle") {
  const auto pr = profile_from_spectrum(kBase);
  CHECK(zeta_asymptotic(pr, pr.h_plus() - 0.01).value == 0.0);
  CHECK(zeta_asymptotic(pr, 0.1).value == 0.0);

  for (double a : {0.6, 0.65, 0.7, 0.75, 0.8}) {
    const auto z = zeta_asymptotic(pr, a);
    CHECK(z.in_domain);
    CHECK(z.value == doctest::Approx(grid_zeta(pr, a)).epsilon(1e-8));
    CHECK(z.value > 0.0);
  }

  // Beyond -psi'(0) the supremum saturates at s = 0 and the domain flag
  // drops; the value continues as a - psi(0).
  const double edge = pr.neg_dpsi0();
  const auto beyond = zeta_asymptotic(pr, edge + 0.1);
  CHECK_FALSE(beyond.in_domain);
  CHECK(beyond.value ==
        doctest::Approx(edge + 0.1 - pr.psi(0.0)).epsilon(1e-9));
  CHECK(beyond.value == doctest::Approx(grid_zeta(pr, edge + 0.1)).epsilon(1e-8));

  // Boundary identity: zeta(-psi'(0+) - 0) = -psi'(0+) - psi(0).
  const auto at_edge = zeta_asymptotic(pr, edge - 1e-9);
  CHECK(at_edge.value == doctest::Approx(edge - pr.psi(0.0)).epsilon(1e-6));
}

TEST_CASE("zeta_c branches and grid oracle") {
  const auto pr = profile_from_spectrum(kBase);
  CHECK(zeta_c_asymptotic(pr, pr.h_minus() + 0.01) == 0.0);
  CHECK(zeta_c_asymptotic(pr, 5.0) == 0.0);
  CHECK(std::isinf(zeta_c_asymptotic(pr, pr.h_inf() - 0.01)));

  for (double a : {0.30, 0.35, 0.40, 0.45, 0.50}) {
    const double z = zeta_c_asymptotic(pr, a);
    CHECK(z == doctest::Approx(grid_zeta_c(pr, a)).epsilon(1e-8));
    CHECK(z > 0.0);
  }
}

TEST_CASE("uniform profile steps") {
  const auto pr = profile_from_spectrum(sp_from({0.25, 0.25, 0.25, 0.25}));
  const double logd = std::log(4.0);
  CHECK(zeta_asymptotic(pr, logd - 0.05).value == 0.0);
  CHECK(zeta_c_asymptotic(pr, logd + 0.05) == 0.0);
  CHECK(std::isinf(zeta_c_asymptotic(pr, logd - 0.05)));
  const auto [lo, hi] = rate_constant(pr);
  CHECK(lo == doctest::Approx(logd).epsilon(1e-9));
  CHECK(hi == doctest::Approx(logd).epsilon(1e-9));
}

TEST_CASE("rate_constant equals entropy for i.i.d. profiles") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 25; ++i) {
    const auto sp = random_spectrum(rng, 6, 3);
    const auto [lo, hi] = rate_constant(profile_from_spectrum(sp));
    CHECK(std::abs(hi - lo) <= 1e-5);
    CHECK(lo == doctest::Approx(entropy(sp)).epsilon(1e-5));
  }
  const auto [plo, phi] = rate_constant(profile_from_spectrum(sp_from({1.0})));
  CHECK(plo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(phi == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("failure exponent against the grid oracle") {
  const auto pr = profile_from_spectrum(kBase);
  const double H = entropy(kBase);
  // Continuity with the constant rate as r -> 0+.
  CHECK(rate_failure_exponent(pr, 1e-6) == doctest::Approx(H).epsilon(1e-3));
  CHECK(rate_failure_exponent(pr, 0.05) ==
        doctest::Approx(grid_f1(pr, 0.05)).epsilon(1e-7));
  CHECK(rate_failure_exponent(pr, 0.15) ==
        doctest::Approx(grid_f1(pr, 0.15)).epsilon(1e-7));

  // Uniform: H_inf = log d regardless of r.
  const auto upr = profile_from_spectrum(sp_from({0.25, 0.25, 0.25, 0.25}));
  for (double r : {0.0, 0.05, 0.5, 2.0}) {
    CHECK(rate_failure_exponent(upr, r) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-9));
  }
  CHECK(rate_failure_exponent(pr, 5.0) ==
        doctest::Approx(pr.h_inf()).epsilon(1e-12));
  CHECK_THROWS_AS(rate_failure_exponent(pr, -0.1), validation_error);
}

TEST_CASE("pflec success exponent against the grid oracle") {
  const auto pr = profile_from_spectrum(kBase);
  const double H = entropy(kBase);
  CHECK(rate_success_exponent_pflec(pr, 1e-6) ==
        doctest::Approx(H).epsilon(1e-3));
  for (double r : {0.02, 0.05, 0.1}) {
    CHECK(rate_success_exponent_pflec(pr, r) ==
          doctest::Approx(grid_f2(pr, r)).epsilon(1e-7));
  }
  // Threshold branch: psi(0) = log 2 once r >= -psi'(0) - psi(0).
  const double thr = pr.neg_dpsi0() - pr.psi(0.0);
  CHECK(rate_success_exponent_pflec(pr, thr + 0.01) ==
        doctest::Approx(pr.psi(0.0)).epsilon(1e-12));

  const auto upr = profile_from_spectrum(sp_from({0.25, 0.25, 0.25, 0.25}));
  for (double r : {0.0, 0.1, 1.0}) {
    CHECK(rate_success_exponent_pflec(upr, r) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-9));
  }
}

TEST_CASE("dflec success exponent and the regime boundary") {
  const auto pr = profile_from_spectrum(kBase);
  const double r_star = dflec_regime_boundary(pr);
  CHECK(r_star == doctest::Approx(-0.5 * pr.dpsi(0.5) - pr.psi(0.5))
                      .epsilon(1e-12));
  // Continuity at r*.
  const double left = rate_success_exponent_pflec(pr, r_star);
  const double right = 2.0 * pr.psi(0.5) + r_star;
  CHECK(left == doctest::Approx(right).epsilon(1e-9));
  // Beyond r* the branch is linear and strictly above PFLEC.
  const double r = r_star + 0.1;
  CHECK(rate_success_exponent_dflec(pr, r) ==
        doctest::Approx(2.0 * pr.psi(0.5) + r).epsilon(1e-12));
  CHECK(rate_success_exponent_dflec(pr, r) >
        rate_success_exponent_pflec(pr, r));

  // Uniform: r* = 0 and the DFLEC exponent is log d + r.
  const auto upr = profile_from_spectrum(sp_from({0.25, 0.25, 0.25, 0.25}));
  CHECK(dflec_regime_boundary(upr) == doctest::Approx(0.0).epsilon(1e-12));
  for (double r : {0.05, 0.3, 1.0}) {
    CHECK(rate_success_exponent_dflec(upr, r) ==
          doctest::Approx(std::log(4.0) + r).epsilon(1e-9));
  }
}

TEST_CASE("exponent monotonicity in r") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> r_dist(1e-4, 0.5);
  for (int i = 0; i < 30; ++i) {
    const auto pr = profile_from_spectrum(random_spectrum(rng, 5, 2));
    double r1 = r_dist(rng), r2 = r_dist(rng);
    if (r1 > r2) std::swap(r1, r2);
    CHECK(rate_failure_exponent(pr, r1) >=
          rate_failure_exponent(pr, r2) - 1e-9);
    CHECK(rate_success_exponent_pflec(pr, r1) <=
          rate_success_exponent_pflec(pr, r2) + 1e-9);
    CHECK(rate_success_exponent_dflec(pr, r1) <=
          rate_success_exponent_dflec(pr, r2) + 1e-9);
    CHECK(rate_success_exponent_dflec(pr, r2) >=
          rate_success_exponent_pflec(pr, r2) - 1e-9);
  }
}

TEST_CASE("zeta(a) - a/2 is convex with minimum at -psi'(1/2)") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    const auto sp = random_spectrum(rng, 5, 2);
    if (sp.distinct_count() < 2) continue;
    const auto pr = profile_from_spectrum(sp);
    const double a_lo = pr.h_plus() + 1e-6;
    const double a_hi = pr.neg_dpsi0() - 1e-6;
    if (a_hi - a_lo < 1e-3) continue;
    double best_a = a_lo;
    double best_v = kInf;
    double prev = kInf;
    const int grid = 40000;
    bool convex = true;
    std::vector<double> vals;
    for (int i = 0; i <= grid; ++i) {
      const double a = a_lo + (a_hi - a_lo) * i / grid;
      const double v = zeta_asymptotic(pr, a).value - 0.5 * a;
      vals.push_back(v);
      if (v < best_v) {
        best_v = v;
        best_a = a;
      }
      prev = v;
    }
    (void)prev;
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
      if (vals[i] > 0.5 * (vals[i - 1] + vals[i + 1]) + 1e-9) convex = false;
    }
    CHECK(convex);
    const double a_half = -pr.dpsi(0.5);
    if (a_half > a_lo && a_half < a_hi) {
      CHECK(best_a == doctest::Approx(a_half).epsilon(1e-3));
      CHECK(std::abs(best_a - a_half) <= 1e-4 + 2.0 * (a_hi - a_lo) / grid);
    }
  }
}

TEST_CASE("curve-based rate formulas reproduce the closed forms") {
  const auto pr = profile_from_spectrum(kBase);
  const double a_hi = pr.neg_dpsi0();
  const auto curve_z = sample_zeta_curve(pr, 2000, 0.0, a_hi);
  const auto curve_zc =
      sample_zeta_c_curve(pr, 2000, pr.h_inf() + 1e-6, pr.h_minus() + 0.1);
  const auto curve_K = step_K_curve(entropy(kBase), 2000, 0.0, 1.5);
  const RateCurve empty;

  // Constant constraint: the K step sits at H.
  for (double eps : {0.1, 0.5, 0.9}) {
    CHECK(rate_from_curves(curve_K, empty, empty, eps,
                         RateFormula::constant) ==
          doctest::Approx(entropy(kBase)).epsilon(1e-3));
  }
  for (double r : {0.02, 0.05, 0.1}) {
    CHECK(rate_from_curves(empty, empty, curve_zc, r,
                         RateFormula::failure) ==
          doctest::Approx(rate_failure_exponent(pr, r)).epsilon(1e-4));
    CHECK(rate_from_curves(empty, curve_z, empty, r,
                         RateFormula::success_pflec) ==
          doctest::Approx(rate_success_exponent_pflec(pr, r)).epsilon(1e-4));
    CHECK(rate_from_curves(empty, curve_z, empty, r,
                         RateFormula::success_dflec) ==
          doctest::Approx(rate_success_exponent_dflec(pr, r)).epsilon(1e-4));
  }
  // Beyond the regime boundary the double formula follows the linear branch.
  const double r_star = dflec_regime_boundary(pr);
  for (double r : {r_star + 0.02, r_star + 0.05}) {
    CHECK(rate_from_curves(empty, curve_z, empty, r,
                         RateFormula::success_dflec) ==
          doctest::Approx(rate_success_exponent_dflec(pr, r)).epsilon(1e-4));
  }
  // Past the PFLEC threshold the grid formula still saturates at psi(0).
  const double thr = pr.neg_dpsi0() - pr.psi(0.0);
  CHECK(rate_from_curves(empty, curve_z, empty, thr + 0.05,
                       RateFormula::success_pflec) ==
        doctest::Approx(pr.psi(0.0)).epsilon(1e-4));

  CHECK_THROWS_AS(rate_from_curves(empty, curve_z, empty, -1.0,
                                 RateFormula::success_pflec),
                  numeric_domain_error);
}
