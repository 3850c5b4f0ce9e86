#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "concentrate/spectrum.hpp"

namespace concentrate {

// Quantities on the threshold projection S_n(a) = {rho_n < e^{-na}}; all
// comparisons run on log values (n*a against -log v) so nothing underflows.
// Empty traces give +inf.
struct FiniteQuantities {
  double zeta;         // -(1/n) log Tr rho S_n(a)
  double zeta_c;       // -(1/n) log Tr rho (I - S_n(a))
  double eta;          // -(1/n) log Tr (I - S_n(a))
  double zeta_half;    // -(1/n) log Tr sqrt(rho) S_n(a)
  double zeta_c_half;  // -(1/n) log Tr sqrt(rho) (I - S_n(a))
};

enum class SpectralQuantity { zeta, zeta_c, eta, zeta_half, zeta_c_half };

const char* quantity_name(SpectralQuantity q);
SpectralQuantity quantity_from_name(const std::string& name);

// K_n(a) = Tr rho_n {rho_n >= e^{-na}}: mass of eigenvalues at or above the
// threshold.
double K_n(const WeightedSpectrum& sp, long n, double a);

FiniteQuantities finite_quantities(const WeightedSpectrum& sp, long n,
                                   double a);
double finite_quantity(const WeightedSpectrum& sp, long n, double a,
                       SpectralQuantity q);

// Exact finite-n optima over the threshold parameter. Both are suprema of
// step functions and land on an eigenvalue jump point.
//   sup{R : K_n(R) <= eps}     (constant constraint)
//   sup{R : zeta_c_n(R) >= r}  (failure-exponent constraint)
double finite_rate_constant(const WeightedSpectrum& sp, long n, double eps);
double finite_rate_failure(const WeightedSpectrum& sp, long n, double r);

struct SpectrumSequence {
  std::function<WeightedSpectrum(long)> generator;
  std::vector<long> n_range;

  static SpectrumSequence iid(WeightedSpectrum base, std::vector<long> ns,
                              std::size_t class_cap = kDefaultClassCap);
};

// Least-squares slope of n * quantity_n against n as the exponent estimate;
// residual is the worst per-n deviation from the fit divided by n.
struct EmpiricalRate {
  double slope;
  double residual;
};

EmpiricalRate empirical_rate(const SpectrumSequence& seq, SpectralQuantity q,
                             double a);

// Simultaneously diagonal pair (rho_n, sigma_n): per index both log
// eigenvalues plus a log multiplicity. The general threshold inequalities
// need this carrier; two separately sorted spectra do not determine the
// joint projection {rho - e^{-na} sigma > 0}.
struct PairedAtom {
  double log_rho;
  double log_sigma;
  double log_weight;
};

struct PairedSpectrum {
  std::vector<PairedAtom> atoms;

  static PairedSpectrum from_bases(std::span<const double> rho,
                                   std::span<const double> sigma);
  static PairedSpectrum with_uniform_sigma(const WeightedSpectrum& rho);
  static PairedSpectrum with_sqrt_sigma(const WeightedSpectrum& rho);
};

// Joint type-class product of a paired base.
PairedSpectrum paired_iid_product(const PairedSpectrum& base, long copies,
                                  std::size_t class_cap = kDefaultClassCap);

// Threshold set is the strict {rho - e^{-na} sigma > 0}.
struct PairedQuantities {
  double zeta;    // -(1/n) log Tr rho {<= 0}
  double zeta_c;  // -(1/n) log Tr rho {> 0}
  double eta;     // -(1/n) log Tr sigma {> 0}
};

PairedQuantities paired_quantities(const PairedSpectrum& sp, long n, double a);

struct PairedSequence {
  std::function<PairedSpectrum(long)> generator;
  std::vector<long> n_range;

  static PairedSequence iid(PairedSpectrum base, std::vector<long> ns,
                            std::size_t class_cap = kDefaultClassCap);
};

struct InequalityCheck {
  std::string name;
  double a;
  double b;       // NaN when the check involves a single grid point
  double margin;  // >= 0 means the inequality held with that slack to spare
  bool pass;
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  int failures = 0;
  bool all_pass() const { return failures == 0; }
};

// Finite-sequence inequality suite:
//  - zeta_c_n(a) <= eta_n(a) + a at every n with zero slack (operator fact),
//  - the min{zeta, a + eta} comparison across (a, b) pairs at the
//    empirical-limit level within `slack`,
//  - the sup/inf comparison between a - zeta and -eta at the same level.
InequalityReport spectral_inequality_suite(const PairedSequence& seq,
                                std::span<const double> a_grid,
                                std::span<const double> b_grid,
                                double slack = 0.02);

}  // namespace concentrate
