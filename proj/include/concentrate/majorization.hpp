#pragma once

#include <optional>

#include "concentrate/spectrum.hpp"

namespace concentrate {

struct MajorizationVerdict {
  bool holds;
  // First prefix length k (1-based) whose dominance check fails; absent when
  // the relation holds.
  std::optional<double> violated_prefix;
};

// Descending prefix-sum dominance of p over q, tolerance 1e-12 per
// comparison, shorter spectrum padded with zeros. Prefix sums are piecewise
// linear in the atom index, so dominance is checked at the union of run
// boundaries.
MajorizationVerdict majorization_verdict(const WeightedSpectrum& p,
                                         const WeightedSpectrum& q);

bool majorizes(const WeightedSpectrum& p, const WeightedSpectrum& q);

// Nielsen criterion: the source state converts to the target by LOCC exactly
// when the target spectrum majorizes the source spectrum.
bool locc_transformable(const WeightedSpectrum& source,
                        const WeightedSpectrum& target);

}  // namespace concentrate
