#pragma once

#include <utility>
#include <vector>

#include "concentrate/asymptotics.hpp"

namespace concentrate {

// Per-site partition function Xi(beta) = log Tr exp(beta H), following the
// exp(+beta H) convention of the rate formulas; physical Gibbs weights
// correspond to negated energies. Either closed form from per-site levels or
// tabulated samples with monotone cubic interpolation (no extrapolation).
class PartitionFunction {
 public:
  static PartitionFunction from_levels(
      std::vector<std::pair<double, double>> energy_degeneracy);
  static PartitionFunction from_table(
      std::vector<std::pair<double, double>> beta_xi);

  double xi(double beta) const;
  double dxi(double beta) const;
  double d2xi(double beta) const;
  std::pair<double, double> beta_range() const;
  bool tabulated() const { return !table_beta_.empty(); }

 private:
  PartitionFunction() = default;
  // closed form
  std::vector<std::pair<double, double>> levels_;
  // tabulated (monotone cubic)
  std::vector<double> table_beta_;
  std::vector<double> table_xi_;
  std::vector<double> table_slope_;
  std::size_t segment_of(double beta) const;
};

// psi(s) = Xi(s beta0) - s Xi(beta0).
RenyiProfile profile_from_partition(const PartitionFunction& pf, double beta0);

struct ThermalRates {
  double b_const;
  double b_fail;
  double b_succ_p;
  double b_succ_d;
  double r_half;
};

ThermalRates thermal_rates(const PartitionFunction& pf, double beta0,
                           double r);

}  // namespace concentrate
