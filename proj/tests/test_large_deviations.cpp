#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "concentrate/asymptotics.hpp"
#include "concentrate/large_deviations.hpp"
#include "concentrate/numeric.hpp"

using namespace concentrate;

namespace {

WeightedSpectrum sp_from(std::initializer_list<double> values) {
  std::vector<double> v(values);
  return WeightedSpectrum::from_values(v);
}

double bernoulli_kl(double R, double q) {
  return R * std::log(R / q) + (1.0 - R) * std::log((1.0 - R) / (1.0 - q));
}

}  // namespace

TEST_CASE("gaussian self-duality") {
  const auto mgf = mgf_gaussian();
  for (double R : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
    CHECK(rate_function(mgf, R).value() ==
          doctest::Approx(0.5 * R * R).epsilon(1e-9));
  }
}

TEST_CASE("bernoulli rate function is the KL divergence") {
  const auto mgf = mgf_bernoulli(0.5);
  CHECK(rate_function(mgf, 0.5).value() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rate_function(mgf, 0.9).value() ==
        doctest::Approx(bernoulli_kl(0.9, 0.5)).epsilon(1e-9));
  for (double q : {0.2, 0.35, 0.7}) {
    const auto m = mgf_bernoulli(q);
    for (double R : {0.05, 0.3, 0.6, 0.95}) {
      CHECK(rate_function(m, R).value() ==
            doctest::Approx(bernoulli_kl(R, q)).epsilon(1e-8));
    }
  }
  // Outside [0, 1] the supremum diverges.
  CHECK(rate_function(mgf, 1.2).is_infinite());
  CHECK(rate_function(mgf, -0.2).is_infinite());
  // At the boundary the rate is -log q, still finite.
  CHECK(rate_function(mgf, 1.0).value() ==
        doctest::Approx(-std::log(0.5)).epsilon(1e-6));
}

TEST_CASE("slope constants") {
  const auto bern = slope_constants(mgf_bernoulli(0.3));
  CHECK(bern.R1.value() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(bern.R4.value() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(bern.R2 == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(bern.R3 == doctest::Approx(0.3).epsilon(1e-6));

  const auto lin = slope_constants(
      mgf_from_function([](double t) { return 0.7 * t; }));
  CHECK(lin.R1.value() == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(lin.R2 == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(lin.R3 == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(lin.R4.value() == doctest::Approx(0.7).epsilon(1e-6));

  const auto gauss = slope_constants(mgf_gaussian());
  CHECK(gauss.R1.is_infinite());
  CHECK(gauss.R1.as_double() == kInf);
  CHECK(gauss.R4.is_infinite());
  CHECK(gauss.R4.as_double() == -kInf);
  CHECK(gauss.R2 == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(gauss.R3 == doctest::Approx(0.0).epsilon(1e-6));
  CHECK_THROWS_AS(gauss.R1.value(), numeric_domain_error);

  CHECK_THROWS_AS(
      slope_constants(mgf_from_function([](double t) { return -t * t; })),
      validation_error);
}

TEST_CASE("tail exponents branch correctly") {
  const auto mgf = mgf_bernoulli(0.5);
  // At or below the mean the upper tail has zero exponent.
  CHECK(tail_exponents(mgf, 0.3).upper_ge.value() == 0.0);
  CHECK(tail_exponents(mgf, 0.5).upper_ge.value() == 0.0);
  const auto at9 = tail_exponents(mgf, 0.9);
  CHECK(at9.upper_ge.value() ==
        doctest::Approx(bernoulli_kl(0.9, 0.5)).epsilon(1e-8));
  CHECK(at9.upper_gt.value() == at9.upper_ge.value());
  CHECK(at9.lower_le.value() == 0.0);
  CHECK(tail_exponents(mgf, 1.5).upper_ge.is_infinite());
  const auto at1 = tail_exponents(mgf, 0.1);
  CHECK(at1.lower_le.value() ==
        doctest::Approx(bernoulli_kl(0.1, 0.5)).epsilon(1e-8));
  CHECK(tail_exponents(mgf, -0.5).lower_le.is_infinite());
}

TEST_CASE("double Legendre transform restores Lambda") {
  const auto mgf = mgf_bernoulli(0.35);
  // Lambda**(t) = sup_R tR - Lambda*(R) over the slope range.
  for (double t : {-2.0, -0.7, 0.0, 0.4, 1.5}) {
    double best = -kInf;
    const int grid = 4000;
    for (int i = 1; i < grid; ++i) {
      const double R = static_cast<double>(i) / grid;
      const auto rate = rate_function(mgf, R);
      best = std::max(best, t * R - rate.value());
    }
    CHECK(best == doctest::Approx(mgf.lambda(t)).epsilon(1e-6));
  }
}

TEST_CASE("substitution bridge to the zeta formulas") {
  const auto base = sp_from({0.75, 0.25});
  const auto pr = profile_from_spectrum(base);
  const auto mgf = mgf_from_spectrum(base);

  // Lambda(t) = psi(1-t) for t <= 1.
  for (double t : {0.05, 0.3, 0.8, 1.0}) {
    CHECK(mgf.lambda(t) == doctest::Approx(pr.psi(1.0 - t)).epsilon(1e-12));
  }

  // zeta(a) = upper tail exponent of the surprisal at level a.
  for (double a : {0.60, 0.68, 0.75, 0.82}) {
    const auto tails = tail_exponents(mgf, a);
    CHECK(zeta_asymptotic(pr, a).value ==
          doctest::Approx(tails.upper_ge.value()).epsilon(1e-8));
  }
  // zeta_c(a) = lower tail exponent.
  for (double a : {0.32, 0.40, 0.48}) {
    const auto tails = tail_exponents(mgf, a);
    CHECK(zeta_c_asymptotic(pr, a) ==
          doctest::Approx(tails.lower_le.value()).epsilon(1e-8));
  }
  // Flat and infinite branches agree too.
  CHECK(tail_exponents(mgf, entropy(base) - 0.02).upper_ge.value() == 0.0);
  CHECK(zeta_asymptotic(pr, entropy(base) - 0.02).value == 0.0);
  CHECK(tail_exponents(mgf, pr.h_inf() - 0.02).lower_le.is_infinite());
  CHECK(std::isinf(zeta_c_asymptotic(pr, pr.h_inf() - 0.02)));
}
