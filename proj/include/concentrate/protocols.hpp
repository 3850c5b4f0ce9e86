#pragma once

#include <cstdint>
#include <optional>

#include "concentrate/spectrum.hpp"

namespace concentrate {

// One protocol evaluation: MES size, failure probability and fidelity.
// PFLEC reports carry fidelity = 1 - failure; DFLEC reports carry the
// deterministic fidelity and failure = 1 - fidelity.
struct ProtocolReport {
  long long size = 1;
  double failure = 0.0;
  double fidelity = 1.0;
  std::optional<double> threshold_x;
};

// h(x) = Tr (rho - x){rho - x >= 0}: the exact optimal PFLEC failure at
// threshold x. Convex, piecewise linear, breakpoints at the distinct values.
double failure_function(const WeightedSpectrum& sp, double x);

// Independent cross-check of h(x) through the diagonal convex program:
// min{1 - Tr sigma | x - sigma >= 0, rho >= sigma} = 1 - sum_i min(s_i, x).
double pflec_failure_oracle(const WeightedSpectrum& sp, double x);

// Optimal PFLEC at threshold x: size floor((1 - h(x))/x), failure h(x).
ProtocolReport optimal_pflec(const WeightedSpectrum& sp, double x);

// Smallest failure achievable at size >= L, solved exactly on the
// piecewise-linear segment where (1 - h(x))/x crosses L.
ProtocolReport min_failure_for_size(const WeightedSpectrum& sp, long long L);

// Optimal deterministic concentration onto an MES of size L. The optimizer
// keeps the top atoms of p and flattens the remaining mass over the rest of
// the L slots; it majorizes p and reproduces the reported fidelity.
struct DflecSolution {
  ProtocolReport report;
  WeightedSpectrum optimizer;
  long long kept = 0;   // leading atoms of p kept unchanged
  double fill = 0.0;    // flat level on the remaining L - kept slots
};

DflecSolution dflec_solve(const WeightedSpectrum& sp, long long L);
ProtocolReport dflec_max_fidelity(const WeightedSpectrum& sp, long long L);

// Validation oracle for the DFLEC optimizer: exhaustive sweep of the
// keep-l/flatten family plus `samples` random majorizing spectra (random
// directions projected onto the majorization cone). Requires <= 8 distinct
// values.
double dflec_fidelity_oracle(const WeightedSpectrum& sp, long long L,
                             int samples, std::uint64_t seed = 42);

// Upper bound on Tr sqrt(rho') T for any rho' majorizing rho, with
// projection rank trT >= M.
double majorized_root_sum_bound(const WeightedSpectrum& sp, long long trT, long long M);

}  // namespace concentrate
