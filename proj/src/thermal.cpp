#include "concentrate/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "concentrate/numeric.hpp"

namespace concentrate {

PartitionFunction PartitionFunction::from_levels(
    std::vector<std::pair<double, double>> energy_degeneracy) {
  if (energy_degeneracy.empty()) {
    throw validation_error("at least one energy level required");
  }
  for (const auto& [energy, degeneracy] : energy_degeneracy) {
    (void)energy;
    if (!(degeneracy > 0.0)) {
      throw validation_error("degeneracies must be positive");
    }
  }
  PartitionFunction pf;
  pf.levels_ = std::move(energy_degeneracy);
  return pf;
}

PartitionFunction PartitionFunction::from_table(
    std::vector<std::pair<double, double>> beta_xi) {
  if (beta_xi.size() < 4) {
    throw validation_error("tabulated Xi needs at least 4 samples");
  }
  std::sort(beta_xi.begin(), beta_xi.end());
  PartitionFunction pf;
  for (std::size_t i = 0; i < beta_xi.size(); ++i) {
    if (i > 0 && !(beta_xi[i].first > beta_xi[i - 1].first)) {
      throw validation_error("table beta values must be strictly increasing");
    }
    pf.table_beta_.push_back(beta_xi[i].first);
    pf.table_xi_.push_back(beta_xi[i].second);
  }

  const std::size_t n = pf.table_beta_.size();
  // Convexity of the sampled data (second differences).
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dl = (pf.table_xi_[i] - pf.table_xi_[i - 1]) /
                      (pf.table_beta_[i] - pf.table_beta_[i - 1]);
    const double dr = (pf.table_xi_[i + 1] - pf.table_xi_[i]) /
                      (pf.table_beta_[i + 1] - pf.table_beta_[i]);
    if (dr - dl < -1e-8) {
      throw validation_error("tabulated Xi is not convex");
    }
  }

  // Fritsch-Carlson monotone cubic slopes.
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    d[i] = (pf.table_xi_[i + 1] - pf.table_xi_[i]) /
           (pf.table_beta_[i + 1] - pf.table_beta_[i]);
  }
  pf.table_slope_.assign(n, 0.0);
  pf.table_slope_[0] = d[0];
  pf.table_slope_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      pf.table_slope_[i] = 0.0;
    } else {
      const double w1 = 2.0 * (pf.table_beta_[i + 1] - pf.table_beta_[i]) +
                        (pf.table_beta_[i] - pf.table_beta_[i - 1]);
      const double w2 = (pf.table_beta_[i + 1] - pf.table_beta_[i]) +
                        2.0 * (pf.table_beta_[i] - pf.table_beta_[i - 1]);
      pf.table_slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  return pf;
}

std::size_t PartitionFunction::segment_of(double beta) const {
  const auto& bs = table_beta_;
  if (beta < bs.front() - 1e-12 || beta > bs.back() + 1e-12) {
    throw numeric_domain_error("beta outside the tabulated range");
  }
  const auto it = std::upper_bound(bs.begin(), bs.end(), beta);
  const std::size_t hi = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(it - bs.begin(), 1), bs.size() - 1);
  return hi - 1;
}

double PartitionFunction::xi(double beta) const {
  if (!tabulated()) {
    LogSumExp lse;
    for (const auto& [energy, degeneracy] : levels_) {
      lse.add(std::log(degeneracy) + beta * energy);
    }
    return lse.value();
  }
  const std::size_t i = segment_of(beta);
  const double h = table_beta_[i + 1] - table_beta_[i];
  const double t = (beta - table_beta_[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * table_xi_[i] + h10 * h * table_slope_[i] +
         h01 * table_xi_[i + 1] + h11 * h * table_slope_[i + 1];
}

double PartitionFunction::dxi(double beta) const {
  if (!tabulated()) {
    LogSumExp lse;
    for (const auto& [energy, degeneracy] : levels_) {
      lse.add(std::log(degeneracy) + beta * energy);
    }
    const double log_z = lse.value();
    CompensatedSum mean;
    for (const auto& [energy, degeneracy] : levels_) {
      mean.add(std::exp(std::log(degeneracy) + beta * energy - log_z) * energy);
    }
    return mean.value();
  }
  const std::size_t i = segment_of(beta);
  const double h = table_beta_[i + 1] - table_beta_[i];
  const double t = (beta - table_beta_[i]) / h;
  const double dh00 = 6 * t * t - 6 * t;
  const double dh10 = 3 * t * t - 4 * t + 1;
  const double dh01 = -6 * t * t + 6 * t;
  const double dh11 = 3 * t * t - 2 * t;
  return (dh00 * table_xi_[i] + dh01 * table_xi_[i + 1]) / h +
         dh10 * table_slope_[i] + dh11 * table_slope_[i + 1];
}

double PartitionFunction::d2xi(double beta) const {
  if (!tabulated()) {
    LogSumExp lse;
    for (const auto& [energy, degeneracy] : levels_) {
      lse.add(std::log(degeneracy) + beta * energy);
    }
    const double log_z = lse.value();
    CompensatedSum mean, second;
    for (const auto& [energy, degeneracy] : levels_) {
      const double w = std::exp(std::log(degeneracy) + beta * energy - log_z);
      mean.add(w * energy);
      second.add(w * energy * energy);
    }
    const double m = mean.value();
    return std::max(second.value() - m * m, 0.0);
  }
  const std::size_t i = segment_of(beta);
  const double h = table_beta_[i + 1] - table_beta_[i];
  const double t = (beta - table_beta_[i]) / h;
  const double dd00 = 12 * t - 6;
  const double dd10 = 6 * t - 4;
  const double dd01 = -12 * t + 6;
  const double dd11 = 6 * t - 2;
  return (dd00 * table_xi_[i] + dd01 * table_xi_[i + 1]) / (h * h) +
         (dd10 * table_slope_[i] + dd11 * table_slope_[i + 1]) / h;
}

std::pair<double, double> PartitionFunction::beta_range() const {
  if (!tabulated()) {
    return {-std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }
  return {table_beta_.front(), table_beta_.back()};
}

RenyiProfile profile_from_partition(const PartitionFunction& pf, double beta0) {
  RenyiProfile profile;
  const double xi0 = pf.xi(beta0);
  profile.psi = [pf, beta0, xi0](double s) {
    return pf.xi(s * beta0) - s * xi0;
  };
  profile.dpsi = [pf, beta0, xi0](double s) {
    return beta0 * pf.dxi(s * beta0) - xi0;
  };
  profile.d2psi = [pf, beta0](double s) {
    return beta0 * beta0 * pf.d2xi(s * beta0);
  };
  if (pf.tabulated() && beta0 != 0.0) {
    const auto [lo, hi] = pf.beta_range();
    profile.s_limit = beta0 > 0.0 ? hi / beta0 : lo / beta0;
  }
  return profile;
}

ThermalRates thermal_rates(const PartitionFunction& pf, double beta0,
                           double r) {
  const RenyiProfile profile = profile_from_partition(pf, beta0);
  ThermalRates rates;
  rates.b_const = -beta0 * pf.dxi(beta0) + pf.xi(beta0);
  rates.b_fail = rate_failure_exponent(profile, r);
  rates.b_succ_p = rate_success_exponent_pflec(profile, r);
  rates.b_succ_d = rate_success_exponent_dflec(profile, r);
  rates.r_half = -0.5 * beta0 * pf.dxi(0.5 * beta0) + pf.xi(beta0) -
                 pf.xi(0.5 * beta0);
  return rates;
}

}  // namespace concentrate
