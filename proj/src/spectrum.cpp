#include "concentrate/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "concentrate/numeric.hpp"

namespace concentrate {

namespace {

constexpr double kExactCountLimit = 9007199254740992.0;  // 2^53

// C(n, k) exactly in __int128, or -1 on overflow of the exact path.
__int128 exact_binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 result = 1;
  const __int128 limit = static_cast<__int128>(4) * 1000000000000000000LL;
  for (long i = 1; i <= k; ++i) {
    if (result > limit) return -1;
    result = result * (n - k + i) / i;  // exact: intermediate is C(n-k+i, i)
  }
  return result;
}

// multinomial(n; parts) exactly while < 2^53, else NaN.
double exact_multinomial(long n, std::span<const long> parts) {
  __int128 result = 1;
  long remaining = n;
  for (long p : parts) {
    const __int128 b = exact_binomial(remaining, p);
    if (b < 0) return std::nan("");
    result *= b;
    if (result < 0 || static_cast<double>(result) > kExactCountLimit) {
      return std::nan("");
    }
    remaining -= p;
  }
  return static_cast<double>(result);
}

double log_multinomial(long n, std::span<const long> parts) {
  double lg = std::lgamma(static_cast<double>(n) + 1.0);
  for (long p : parts) lg -= std::lgamma(static_cast<double>(p) + 1.0);
  return lg;
}

struct RawEntry {
  double log_value;
  double count;      // NaN when the exact path overflowed
  double log_count;
};

// Sort descending by log value, merge collisions (relative 1e-12 on the
// value, i.e. absolute on the log), then optionally renormalize so the mass
// is exactly the computed total.
std::vector<WeightedSpectrum::Entry> consolidate(std::vector<RawEntry> raw,
                                                 bool renormalize) {
  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawEntry& a, const RawEntry& b) {
                     return a.log_value > b.log_value;
                   });
  std::vector<RawEntry> merged;
  merged.reserve(raw.size());
  for (const RawEntry& e : raw) {
    if (!merged.empty()) {
      RawEntry& last = merged.back();
      const double tol = 1e-12 + 1e-14 * std::abs(last.log_value);
      if (last.log_value - e.log_value <= tol) {
        last.count = last.count + e.count;  // NaN propagates
        if (last.count > kExactCountLimit) last.count = std::nan("");
        last.log_count = log_add_exp(last.log_count, e.log_count);
        continue;
      }
    }
    merged.push_back(e);
  }

  double log_total = 0.0;
  if (renormalize) {
    LogSumExp lse;
    for (const RawEntry& e : merged) lse.add(e.log_value + e.log_count);
    log_total = lse.value();
  }

  std::vector<WeightedSpectrum::Entry> out;
  out.reserve(merged.size());
  for (const RawEntry& e : merged) {
    WeightedSpectrum::Entry entry;
    entry.log_value = e.log_value - log_total;
    entry.value = std::exp(entry.log_value);
    entry.log_count = e.log_count;
    entry.count = std::isnan(e.count) ? std::exp(e.log_count) : e.count;
    out.push_back(entry);
  }
  return out;
}

}  // namespace

void WeightedSpectrum::validate() const {
  if (entries_.empty()) {
    throw validation_error("spectrum must have at least one entry");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (!(e.log_value <= 1e-12)) {
      throw validation_error("spectrum value exceeds 1");
    }
    if (!std::isfinite(e.log_value)) {
      throw validation_error("spectrum value must be positive");
    }
    if (!(e.count >= 1.0 - 1e-9)) {
      throw validation_error("spectrum multiplicity must be >= 1");
    }
    if (i > 0 && !(entries_[i - 1].log_value > e.log_value)) {
      throw validation_error("spectrum values must be strictly decreasing");
    }
  }
  if (std::abs(mass() - 1.0) > 1e-12) {
    throw validation_error("spectrum mass deviates from 1 beyond 1e-12");
  }
}

double WeightedSpectrum::mass() const {
  LogSumExp lse;
  for (const Entry& e : entries_) lse.add(e.log_value + e.log_count);
  return std::exp(lse.value());
}

double WeightedSpectrum::total_dimension() const {
  CompensatedSum acc;
  for (const Entry& e : entries_) acc.add(e.count);
  return acc.value();
}

double WeightedSpectrum::log_total_dimension() const {
  LogSumExp lse;
  for (const Entry& e : entries_) lse.add(e.log_count);
  return lse.value();
}

WeightedSpectrum WeightedSpectrum::from_values(std::span<const double> values) {
  if (values.empty()) throw validation_error("empty value list");
  for (double v : values) {
    if (!(v > 0.0)) throw validation_error("spectrum values must be positive");
  }
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double total = sum.value();
  if (std::abs(total - 1.0) > 1e-9) {
    throw validation_error("values sum to " + std::to_string(total) +
                           ", more than 1e-9 away from 1");
  }
  std::vector<double> scaled(values.begin(), values.end());
  for (double& v : scaled) v /= total;
  std::sort(scaled.begin(), scaled.end(), std::greater<double>());

  WeightedSpectrum sp;
  for (double v : scaled) {
    if (!sp.entries_.empty() && sp.entries_.back().value == v) {
      Entry& last = sp.entries_.back();
      last.count += 1.0;
      last.log_count = std::log(last.count);
    } else {
      sp.entries_.push_back(Entry{v, std::log(v), 1.0, 0.0});
    }
  }
  sp.validate();
  return sp;
}

WeightedSpectrum WeightedSpectrum::from_entries(
    std::span<const std::pair<double, double>> entries) {
  if (entries.empty()) throw validation_error("empty entry list");
  std::vector<Entry> raw;
  raw.reserve(entries.size());
  CompensatedSum sum;
  for (const auto& [value, count] : entries) {
    if (!(value > 0.0)) {
      throw validation_error("spectrum values must be positive");
    }
    if (!(count >= 1.0) || count != std::floor(count)) {
      throw validation_error("multiplicities must be positive integers");
    }
    sum.add(value * count);
    raw.push_back(Entry{value, std::log(value), count, std::log(count)});
  }
  const double total = sum.value();
  if (std::abs(total - 1.0) > 1e-9) {
    throw validation_error("entry mass sums to " + std::to_string(total) +
                           ", more than 1e-9 away from 1");
  }
  for (Entry& e : raw) {
    e.value /= total;
    e.log_value = std::log(e.value);
  }
  std::stable_sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) {
    return a.value > b.value;
  });
  WeightedSpectrum sp;
  for (const Entry& e : raw) {
    if (!sp.entries_.empty() && sp.entries_.back().value == e.value) {
      Entry& last = sp.entries_.back();
      last.count += e.count;
      last.log_count = std::log(last.count);
    } else {
      sp.entries_.push_back(e);
    }
  }
  sp.validate();
  return sp;
}

WeightedSpectrum WeightedSpectrum::from_log_entries(std::vector<Entry> entries,
                                                    bool renormalize) {
  if (entries.empty()) throw validation_error("empty entry list");
  std::vector<RawEntry> raw;
  raw.reserve(entries.size());
  for (const Entry& e : entries) {
    raw.push_back(RawEntry{
        e.log_value, e.count > kExactCountLimit ? std::nan("") : e.count,
        e.log_count});
  }
  WeightedSpectrum sp;
  sp.entries_ = consolidate(std::move(raw), renormalize);
  sp.validate();
  return sp;
}

WeightedSpectrum iid_product(const WeightedSpectrum& base, long copies,
                             std::size_t class_cap) {
  if (copies < 1) throw validation_error("copy count must be >= 1");
  if (copies == 1) return base;

  const auto& be = base.entries();
  const long d = static_cast<long>(be.size());

  // Composition count C(copies + d - 1, d - 1), checked before enumerating.
  double log_classes = std::lgamma(static_cast<double>(copies + d)) -
                       std::lgamma(static_cast<double>(copies + 1)) -
                       std::lgamma(static_cast<double>(d));
  if (log_classes > std::log(static_cast<double>(class_cap)) + 1e-9) {
    throw validation_error(
        "type-class count exceeds the enumeration cap; reduce n or the "
        "number of distinct values");
  }

  std::vector<RawEntry> raw;
  std::vector<long> parts(static_cast<std::size_t>(d), 0);

  // Recursive composition walk; log value and log count accumulate along the
  // prefix, the exact count is recomputed per leaf.
  auto walk = [&](auto&& self, long index, long remaining, double log_value,
                  double log_mult_base) -> void {
    if (index == d - 1) {
      parts[static_cast<std::size_t>(index)] = remaining;
      const double lv =
          log_value + remaining * be[static_cast<std::size_t>(index)].log_value;
      const double lmb =
          log_mult_base +
          remaining * be[static_cast<std::size_t>(index)].log_count;
      const double lc = log_multinomial(copies, parts) + lmb;
      double count = exact_multinomial(copies, parts);
      if (!std::isnan(count)) {
        for (long i = 0; i < d; ++i) {
          for (long r = 0; r < parts[static_cast<std::size_t>(i)]; ++r) {
            count *= be[static_cast<std::size_t>(i)].count;
            if (count > kExactCountLimit) {
              count = std::nan("");
              break;
            }
          }
          if (std::isnan(count)) break;
        }
      }
      raw.push_back(RawEntry{lv, count, lc});
      return;
    }
    for (long k = 0; k <= remaining; ++k) {
      parts[static_cast<std::size_t>(index)] = k;
      self(self, index + 1, remaining - k,
           log_value + k * be[static_cast<std::size_t>(index)].log_value,
           log_mult_base +
               k * be[static_cast<std::size_t>(index)].log_count);
    }
  };
  walk(walk, 0, copies, 0.0, 0.0);

  // Enumeration completeness: the unnormalized mass must already be 1.
  LogSumExp lse;
  for (const RawEntry& e : raw) lse.add(e.log_value + e.log_count);
  if (std::abs(lse.value()) > 1e-10) {
    throw numeric_domain_error("type-class enumeration lost mass");
  }

  std::vector<WeightedSpectrum::Entry> typed;
  typed.reserve(raw.size());
  for (const RawEntry& e : raw) {
    typed.push_back(WeightedSpectrum::Entry{
        std::exp(e.log_value), e.log_value,
        std::isnan(e.count) ? std::exp(e.log_count) : e.count, e.log_count});
  }
  return WeightedSpectrum::from_log_entries(std::move(typed), true);
}

WeightedSpectrum tensor_product(const WeightedSpectrum& a,
                                const WeightedSpectrum& b) {
  std::vector<WeightedSpectrum::Entry> out;
  out.reserve(a.distinct_count() * b.distinct_count());
  for (const auto& ea : a.entries()) {
    for (const auto& eb : b.entries()) {
      WeightedSpectrum::Entry e;
      e.log_value = ea.log_value + eb.log_value;
      e.value = std::exp(e.log_value);
      e.log_count = ea.log_count + eb.log_count;
      e.count = ea.count * eb.count;
      out.push_back(e);
    }
  }
  return WeightedSpectrum::from_log_entries(std::move(out), true);
}

double entropy(const WeightedSpectrum& sp) {
  CompensatedSum acc;
  for (const auto& e : sp.entries()) {
    acc.add(std::exp(e.log_value + e.log_count) * (-e.log_value));
  }
  return acc.value();
}

double renyi_psi(const WeightedSpectrum& sp, double s) {
  if (!(s >= 0.0)) throw validation_error("renyi_psi requires s >= 0");
  if (s == 1.0) return 0.0;
  if (s == 0.0) return sp.log_total_dimension();
  LogSumExp lse;
  for (const auto& e : sp.entries()) lse.add(e.log_count + s * e.log_value);
  return lse.value();
}

WeightedSpectrum IIDSource::product(std::size_t class_cap) const {
  return iid_product(base, copies, class_cap);
}

}  // namespace concentrate
