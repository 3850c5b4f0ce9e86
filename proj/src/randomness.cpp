#include "concentrate/randomness.hpp"

#include <algorithm>
#include <cmath>

#include "concentrate/numeric.hpp"

namespace concentrate {

namespace {

constexpr double kAtomCap = 1e6;

std::vector<double> atoms_of(const WeightedSpectrum& p) {
  if (!(p.total_dimension() <= kAtomCap)) {
    throw validation_error("spectrum dimension too large for partition maps");
  }
  std::vector<double> atoms;
  for (const auto& e : p.entries()) {
    atoms.insert(atoms.end(), static_cast<std::size_t>(e.count), e.value);
  }
  return atoms;
}

}  // namespace

void PartitionMap::validate() const {
  if (M < 1) throw validation_error("bucket count must be >= 1");
  std::vector<bool> seen(static_cast<std::size_t>(M), false);
  for (int b : assignment) {
    if (b < 0 || b >= M) {
      throw validation_error("bucket index out of range");
    }
    seen[static_cast<std::size_t>(b)] = true;
  }
  for (bool s : seen) {
    if (!s) throw validation_error("every bucket must be nonempty");
  }
}

std::vector<double> bucket_masses(const WeightedSpectrum& p,
                                  const PartitionMap& pm) {
  pm.validate();
  const std::vector<double> atoms = atoms_of(p);
  if (atoms.size() != pm.assignment.size()) {
    throw validation_error("assignment does not cover the spectrum atoms");
  }
  std::vector<CompensatedSum> masses(static_cast<std::size_t>(pm.M));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    masses[static_cast<std::size_t>(pm.assignment[i])].add(atoms[i]);
  }
  std::vector<double> out;
  out.reserve(masses.size());
  for (const auto& m : masses) out.push_back(m.value());
  return out;
}

double hellinger_epsilon(const WeightedSpectrum& p, const PartitionMap& pm) {
  const std::vector<double> masses = bucket_masses(p, pm);
  CompensatedSum root;
  for (double m : masses) root.add(std::sqrt(m / static_cast<double>(pm.M)));
  return std::clamp(1.0 - root.value(), 0.0, 1.0);
}

double kl_deficit(const WeightedSpectrum& p, const PartitionMap& pm) {
  const std::vector<double> masses = bucket_masses(p, pm);
  CompensatedSum log_sum;
  for (double m : masses) {
    if (!(m > 0.0)) throw validation_error("empty bucket in KL criterion");
    log_sum.add(std::log(m));
  }
  const double M = static_cast<double>(pm.M);
  return std::max(-std::log(M) - log_sum.value() / M, 0.0);
}

PartitionMap greedy_partition(const WeightedSpectrum& p, int M) {
  if (M < 1) throw validation_error("bucket count must be >= 1");
  const std::vector<double> atoms = atoms_of(p);
  if (atoms.size() < static_cast<std::size_t>(M)) {
    throw validation_error("spectrum dimension smaller than bucket count");
  }
  PartitionMap pm;
  pm.M = M;
  pm.assignment.resize(atoms.size());
  std::vector<double> load(static_cast<std::size_t>(M), 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    std::size_t lightest = 0;
    for (std::size_t b = 1; b < load.size(); ++b) {
      if (load[b] < load[lightest]) lightest = b;
    }
    pm.assignment[i] = static_cast<int>(lightest);
    load[lightest] += atoms[i];
  }
  return pm;
}

DualityRecord duality_check(const WeightedSpectrum& p,
                            const PartitionMap& pm) {
  const std::vector<double> masses = bucket_masses(p, pm);
  const double M = static_cast<double>(pm.M);

  CompensatedSum root_scaled;
  for (double m : masses) root_scaled.add(std::sqrt(m / M));
  const double eps = 1.0 - root_scaled.value();

  // Fidelity through the unscaled route, dividing by M after squaring.
  CompensatedSum root;
  for (double m : masses) root.add(std::sqrt(m));
  const double fidelity = root.value() * root.value() / M;

  DualityRecord rec;
  rec.epsilon = eps;
  rec.fidelity = fidelity;
  rec.identity_one_residual = std::abs((1.0 - eps) * (1.0 - eps) - fidelity);
  rec.identity_two_residual =
      std::abs((2.0 * eps - eps * eps) - (1.0 - fidelity));
  rec.sandwich_holds = eps <= 1.0 - fidelity + 1e-12 &&
                       1.0 - fidelity <= 2.0 * eps + 1e-12;
  return rec;
}

double b_kl(const RateCurve& curve_zeta, double eps) {
  const auto& a = curve_zeta.a;
  const auto& z = curve_zeta.value;
  if (a.size() < 2 || a.size() != z.size()) {
    throw validation_error("b_kl needs a sampled zeta curve");
  }
  double best = -kInf;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (z[i] < eps) best = std::max(best, a[i] - z[i]);
    if (i > 0 && z[i - 1] < eps && z[i] >= eps) {
      // Left-open crossing: the strict feasible set ends where zeta reaches
      // eps, and a - zeta approaches a_cross - eps from below.
      const double t = (eps - z[i - 1]) / (z[i] - z[i - 1]);
      const double a_cross = a[i - 1] + t * (a[i] - a[i - 1]);
      best = std::max(best, a_cross - eps);
    }
  }
  if (best == -kInf) {
    throw numeric_domain_error("empty feasible set: zeta(a) < eps never holds");
  }
  return best;
}

}  // namespace concentrate
