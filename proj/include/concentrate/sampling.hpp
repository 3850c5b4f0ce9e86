#pragma once

#include <cstdint>
#include <random>

#include "concentrate/spectrum.hpp"

namespace concentrate {

// Random spectrum with up to max_distinct distinct values and multiplicities
// in [1, max_mult]; deterministic given the engine state.
WeightedSpectrum random_spectrum(std::mt19937_64& rng, int max_distinct,
                                 int max_mult = 1);

}  // namespace concentrate
