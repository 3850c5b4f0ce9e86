#include "concentrate/sampling.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "concentrate/numeric.hpp"

namespace concentrate {

WeightedSpectrum random_spectrum(std::mt19937_64& rng, int max_distinct,
                                 int max_mult) {
  if (max_distinct < 1 || max_mult < 1) {
    throw validation_error("random_spectrum needs positive bounds");
  }
  std::uniform_int_distribution<int> d_dist(1, max_distinct);
  std::uniform_int_distribution<int> m_dist(1, max_mult);
  std::exponential_distribution<double> mass(1.0);

  const int d = d_dist(rng);
  std::vector<std::pair<double, double>> entries;
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    const double v = mass(rng) + 1e-6;
    const double m = max_mult == 1 ? 1.0 : static_cast<double>(m_dist(rng));
    entries.emplace_back(v, m);
    total += v * m;
  }
  for (auto& [v, m] : entries) v /= total;
  return WeightedSpectrum::from_entries(entries);
}

}  // namespace concentrate
