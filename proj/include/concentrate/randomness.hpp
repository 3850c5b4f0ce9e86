#pragma once

#include <vector>

#include "concentrate/asymptotics.hpp"
#include "concentrate/spectrum.hpp"

namespace concentrate {

// Surjection from spectrum atoms (entries expanded by multiplicity, in
// descending-value order) onto buckets {0..M-1}; every bucket nonempty.
struct PartitionMap {
  std::vector<int> assignment;
  int M = 1;

  void validate() const;
};

// Bucket masses P_i of the pushforward distribution.
std::vector<double> bucket_masses(const WeightedSpectrum& p,
                                  const PartitionMap& pm);

// Half squared Hellinger distance to uniform-M:
// eps = 1 - sum_i sqrt(P_i / M); zero exactly when all buckets carry 1/M.
double hellinger_epsilon(const WeightedSpectrum& p, const PartitionMap& pm);

// KL divergence D(uniform_M || pushforward) = -log M - (1/M) sum log P_i;
// nonnegative, zero only for the exact uniform pushforward.
double kl_deficit(const WeightedSpectrum& p, const PartitionMap& pm);

// Longest-processing-time assignment of atoms to the currently lightest
// bucket; deterministic (descending atoms, lowest-index tie break).
PartitionMap greedy_partition(const WeightedSpectrum& p, int M);

// The duality identities between randomness extraction and concentration:
// (1 - eps)^2 equals the concentration fidelity (sum_i sqrt(P_i/M))^2 and
// 2 eps - eps^2 equals one minus it, with eps <= 1 - fidelity <= 2 eps.
struct DualityRecord {
  double epsilon;
  double fidelity;
  double identity_one_residual;  // |(1-eps)^2 - fidelity|
  double identity_two_residual;  // |(2 eps - eps^2) - (1 - fidelity)|
  bool sandwich_holds;
};

DualityRecord duality_check(const WeightedSpectrum& p, const PartitionMap& pm);

// B_KL(eps) = sup{a - zeta(a) | zeta(a) < eps} on a sampled zeta curve; the
// strict inequality is honored by left-open interpolation.
double b_kl(const RateCurve& curve_zeta, double eps);

}  // namespace concentrate
