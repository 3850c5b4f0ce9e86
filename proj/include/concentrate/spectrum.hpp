#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace concentrate {

// Descending Schmidt-coefficient distribution stored as (value, multiplicity)
// runs. Values and multiplicities are kept in both plain and log form: the
// plain fields are exact for small spectra, while the log fields stay valid
// for product spectra whose values underflow double precision (n*log v can
// pass -745) or whose multiplicities exceed 2^53.
class WeightedSpectrum {
 public:
  struct Entry {
    double value;      // exp(log_value); 0.0 when underflowed
    double log_value;  // canonical
    double count;      // exact integer while representable, +inf past that
    double log_count;  // canonical
  };

  // Normalizes (rescale allowed only when |sum-1| <= 1e-9), sorts descending
  // and merges exactly equal values into multiplicities.
  static WeightedSpectrum from_values(std::span<const double> values);

  // (value, multiplicity) pairs with integer multiplicities >= 1.
  static WeightedSpectrum from_entries(
      std::span<const std::pair<double, double>> entries);

  // Entries already in log form; sorted, merged (relative value collisions
  // within 1e-12) and, when renormalize is set, rescaled to unit mass.
  static WeightedSpectrum from_log_entries(std::vector<Entry> entries,
                                           bool renormalize);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t distinct_count() const { return entries_.size(); }
  double total_dimension() const;      // sum of counts, +inf when overflowed
  double log_total_dimension() const;  // always finite
  double max_value() const { return entries_.front().value; }
  double min_value() const { return entries_.back().value; }
  double log_max_value() const { return entries_.front().log_value; }
  double log_min_value() const { return entries_.back().log_value; }

  // Total mass as actually stored; 1 within rounding by construction.
  double mass() const;

 private:
  WeightedSpectrum() = default;
  void validate() const;
  std::vector<Entry> entries_;
};

inline constexpr std::size_t kDefaultClassCap = 10'000'000;

// Exact spectrum of the n-fold product via type-class enumeration: one entry
// per distinct product value over compositions of n, multiplicities
// multinomial(n; n_1..n_d) * prod m_i^{n_i}. Throws when the composition
// count C(n+d-1, d-1) exceeds class_cap.
WeightedSpectrum iid_product(const WeightedSpectrum& base, long copies,
                             std::size_t class_cap = kDefaultClassCap);

// All pairwise products with multiplied multiplicities, merged.
WeightedSpectrum tensor_product(const WeightedSpectrum& a,
                                const WeightedSpectrum& b);

// -Tr rho log rho in nats.
double entropy(const WeightedSpectrum& sp);

// psi(s) = log Tr rho^s; psi(1) = 0 and psi(0) = log(dimension) exactly.
double renyi_psi(const WeightedSpectrum& sp, double s);

// The i.i.d. source (base p, n copies); thin carrier for CLI input.
struct IIDSource {
  WeightedSpectrum base;
  long copies = 1;
  WeightedSpectrum product(std::size_t class_cap = kDefaultClassCap) const;
};

}  // namespace concentrate
