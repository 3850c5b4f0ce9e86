#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "concentrate/numeric.hpp"
#include "concentrate/protocols.hpp"
#include "concentrate/randomness.hpp"
#include "concentrate/sampling.hpp"

using namespace concentrate;

namespace {

WeightedSpectrum sp_from(std::initializer_list<double> values) {
  std::vector<double> v(values);
  return WeightedSpectrum::from_values(v);
}

PartitionMap singleton_map(int dim) {
  PartitionMap pm;
  pm.M = dim;
  for (int i = 0; i < dim; ++i) pm.assignment.push_back(i);
  return pm;
}

PartitionMap random_map(std::mt19937_64& rng, int dim, int M) {
  PartitionMap pm;
  pm.M = M;
  pm.assignment.resize(dim);
  // Cover every bucket, then assign the rest uniformly.
  for (int b = 0; b < M; ++b) pm.assignment[b] = b;
  std::uniform_int_distribution<int> pick(0, M - 1);
  for (int i = M; i < dim; ++i) pm.assignment[i] = pick(rng);
  std::shuffle(pm.assignment.begin(), pm.assignment.end(), rng);
  pm.validate();
  return pm;
}

}  // namespace

TEST_CASE("hellinger epsilon closed forms") {
  const auto uniform4 = sp_from({0.25, 0.25, 0.25, 0.25});
  CHECK(hellinger_epsilon(uniform4, singleton_map(4)) ==
        doctest::Approx(0.0).epsilon(1e-14));

  const auto pair = sp_from({0.7, 0.3});
  const double expect = 1.0 - (std::sqrt(0.35) + std::sqrt(0.15));
  CHECK(hellinger_epsilon(pair, singleton_map(2)) ==
        doctest::Approx(expect).epsilon(1e-14));

  PartitionMap one;
  one.M = 1;
  one.assignment = {0, 0};
  CHECK(hellinger_epsilon(pair, one) == doctest::Approx(0.0).epsilon(1e-14));

  PartitionMap short_map;
  short_map.M = 2;
  short_map.assignment = {0, 1, 0};
  CHECK_THROWS_AS(hellinger_epsilon(pair, short_map), validation_error);
}

TEST_CASE("kl deficit is the nonnegative divergence from uniform") {
  const auto uniform4 = sp_from({0.25, 0.25, 0.25, 0.25});
  CHECK(kl_deficit(uniform4, singleton_map(4)) ==
        doctest::Approx(0.0).epsilon(1e-14));

  const auto pair = sp_from({0.7, 0.3});
  const double expect = -std::log(2.0) - 0.5 * (std::log(0.7) + std::log(0.3));
  CHECK(expect > 0.0);
  CHECK(kl_deficit(pair, singleton_map(2)) ==
        doctest::Approx(expect).epsilon(1e-12));

  PartitionMap one;
  one.M = 1;
  one.assignment = {0, 0};
  CHECK(kl_deficit(pair, one) == doctest::Approx(0.0).epsilon(1e-14));

  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const auto sp = random_spectrum(rng, 6, 2);
    const int dim = static_cast<int>(sp.total_dimension());
    const int M = 1 + static_cast<int>(rng() % static_cast<unsigned>(dim));
    const auto pm = random_map(rng, dim, M);
    CHECK(kl_deficit(sp, pm) >= 0.0);
  }
}

TEST_CASE("greedy partition balances deterministically") {
  const auto uniform4 = sp_from({0.25, 0.25, 0.25, 0.25});
  const auto split = greedy_partition(uniform4, 2);
  const auto masses = bucket_masses(uniform4, split);
  CHECK(masses[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(masses[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(hellinger_epsilon(uniform4, split) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const auto trio = sp_from({0.5, 0.25, 0.25});
  const auto pm = greedy_partition(trio, 2);
  const auto tm = bucket_masses(trio, pm);
  CHECK(tm[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tm[1] == doctest::Approx(0.5).epsilon(1e-14));

  const auto pair = sp_from({0.7, 0.3});
  const auto forced = greedy_partition(pair, 2);
  CHECK(hellinger_epsilon(pair, forced) ==
        doctest::Approx(1.0 - std::sqrt(0.35) - std::sqrt(0.15))
            .epsilon(1e-12));

  CHECK_THROWS_AS(greedy_partition(pair, 3), validation_error);

  // Determinism: same input, same assignment.
  const auto again = greedy_partition(trio, 2);
  CHECK(again.assignment == pm.assignment);
}

TEST_CASE("duality identities are algebraic") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const auto sp = random_spectrum(rng, 7, 2);
    const int dim = static_cast<int>(sp.total_dimension());
    const int M = 1 + static_cast<int>(rng() % static_cast<unsigned>(dim));
    const auto pm = random_map(rng, dim, M);
    const auto rec = duality_check(sp, pm);
    CHECK(rec.identity_one_residual <= 1e-12);
    CHECK(rec.identity_two_residual <= 1e-12);
    CHECK(rec.sandwich_holds);
  }
}

TEST_CASE("singleton fidelity matches the deterministic protocol") {
  const auto pair = sp_from({0.7, 0.3});
  const auto rec = duality_check(pair, singleton_map(2));
  CHECK(rec.fidelity ==
        doctest::Approx(dflec_max_fidelity(pair, 2).fidelity).epsilon(1e-12));
}

TEST_CASE("greedy merge comparison against direct greedy") {
  // Merging the two lightest greedy buckets never beats running the greedy
  // at the smaller count directly.
  std::mt19937_64 rng(43);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const auto sp = random_spectrum(rng, 8, 2);
    const int dim = static_cast<int>(sp.total_dimension());
    if (dim < 3) continue;
    const int M = 3 + static_cast<int>(rng() % static_cast<unsigned>(dim - 2));
    if (M > dim) continue;
    const auto pm = greedy_partition(sp, M);
    const auto masses = bucket_masses(sp, pm);
    // Locate the two lightest buckets.
    int b1 = 0, b2 = 1;
    if (masses[1] < masses[0]) std::swap(b1, b2);
    for (int b = 2; b < M; ++b) {
      if (masses[static_cast<std::size_t>(b)] <
          masses[static_cast<std::size_t>(b1)]) {
        b2 = b1;
        b1 = b;
      } else if (masses[static_cast<std::size_t>(b)] <
                 masses[static_cast<std::size_t>(b2)]) {
        b2 = b;
      }
    }
    PartitionMap merged;
    merged.M = M - 1;
    for (int a : pm.assignment) {
      int nb = a;
      if (a == b1) nb = b2;
      if (nb > b1) --nb;
      merged.assignment.push_back(nb);
    }
    merged.validate();
    const double direct = hellinger_epsilon(sp, greedy_partition(sp, M - 1));
    const double via_merge = hellinger_epsilon(sp, merged);
    CHECK(direct <= via_merge + 1e-12);
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("b_kl on sampled curves") {
  // Uniform source: zeta steps from 0 to a - log d at log d, so B_KL is
  // log d for every positive eps.
  RateCurve step;
  step.label = CurveLabel::zeta;
  const double logd = std::log(4.0);
  for (int i = 0; i <= 2000; ++i) {
    const double a = 2.0 * logd * i / 2000;
    step.a.push_back(a);
    step.value.push_back(a <= logd ? 0.0 : a - logd);
  }
  for (double eps : {0.01, 0.1, 0.4}) {
    CHECK(b_kl(step, eps) == doctest::Approx(logd).epsilon(1e-3));
  }

  // eps = 0 has an empty strict feasible set.
  CHECK_THROWS_AS(b_kl(step, 0.0), numeric_domain_error);

  // Monotone in eps.
  std::vector<double> values;
  for (double eps : {0.01, 0.05, 0.1, 0.2}) values.push_back(b_kl(step, eps));
  for (std::size_t i = 1; i < values.size(); ++i) {
    CHECK(values[i] >= values[i - 1] - 1e-12);
  }
}
