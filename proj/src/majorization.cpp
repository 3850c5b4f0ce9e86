#include "concentrate/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "concentrate/numeric.hpp"

namespace concentrate {

namespace {

constexpr double kPrefixTol = 1e-12;

struct PrefixProfile {
  std::vector<double> boundary;  // cumulative atom counts at run ends
  std::vector<double> mass;      // compensated prefix mass at those counts
  std::vector<double> value;     // run value (slope) per segment

  // Prefix mass at a (possibly fractional) atom count k >= 0.
  double at(double k) const {
    if (k <= 0.0) return 0.0;
    if (k >= boundary.back()) return mass.back();
    std::size_t seg = 0;
    while (boundary[seg] < k) ++seg;
    const double seg_start = seg == 0 ? 0.0 : boundary[seg - 1];
    const double base = seg == 0 ? 0.0 : mass[seg - 1];
    return base + (k - seg_start) * value[seg];
  }
};

PrefixProfile build_profile(const WeightedSpectrum& sp) {
  PrefixProfile prof;
  CompensatedSum count_acc;
  CompensatedSum mass_acc;
  for (const auto& e : sp.entries()) {
    count_acc.add(e.count);
    mass_acc.add(std::exp(e.log_value + e.log_count));
    prof.boundary.push_back(count_acc.value());
    prof.mass.push_back(mass_acc.value());
    prof.value.push_back(e.value);
  }
  return prof;
}

}  // namespace

MajorizationVerdict majorization_verdict(const WeightedSpectrum& p,
                                         const WeightedSpectrum& q) {
  const PrefixProfile pp = build_profile(p);
  const PrefixProfile pq = build_profile(q);

  // The difference P_p(k) - P_q(k) is piecewise linear in k, so its minimum
  // over every prefix length is attained at a run boundary of either side.
  std::vector<double> checkpoints;
  checkpoints.reserve(pp.boundary.size() + pq.boundary.size());
  checkpoints.insert(checkpoints.end(), pp.boundary.begin(), pp.boundary.end());
  checkpoints.insert(checkpoints.end(), pq.boundary.begin(), pq.boundary.end());
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());

  for (double k : checkpoints) {
    if (pp.at(k) < pq.at(k) - kPrefixTol) {
      return MajorizationVerdict{false, k};
    }
  }
  return MajorizationVerdict{true, std::nullopt};
}

bool majorizes(const WeightedSpectrum& p, const WeightedSpectrum& q) {
  return majorization_verdict(p, q).holds;
}

bool locc_transformable(const WeightedSpectrum& source,
                        const WeightedSpectrum& target) {
  return majorizes(target, source);
}

}  // namespace concentrate
