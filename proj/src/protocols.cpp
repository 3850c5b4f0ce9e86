#include "concentrate/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "concentrate/majorization.hpp"
#include "concentrate/numeric.hpp"

namespace concentrate {

namespace {

constexpr double kAtomCap = 1e7;

// Top-k atom values of a spectrum, expanding multiplicity runs.
std::vector<double> leading_atoms(const WeightedSpectrum& sp, long long k) {
  std::vector<double> atoms;
  atoms.reserve(static_cast<std::size_t>(k));
  for (const auto& e : sp.entries()) {
    const long long run = static_cast<long long>(e.count);
    for (long long i = 0; i < run && static_cast<long long>(atoms.size()) < k;
         ++i) {
      atoms.push_back(e.value);
    }
    if (static_cast<long long>(atoms.size()) >= k) break;
  }
  return atoms;
}

std::vector<double> all_atoms(const WeightedSpectrum& sp) {
  const double dim = sp.total_dimension();
  if (!(dim <= kAtomCap)) {
    throw validation_error("spectrum dimension too large to expand");
  }
  return leading_atoms(sp, static_cast<long long>(std::llround(dim)));
}

void check_size(const WeightedSpectrum& sp, long long L) {
  if (L < 1) throw validation_error("MES size must be >= 1");
  const double dim = sp.total_dimension();
  if (static_cast<double>(L) > dim + 1e-9) {
    throw validation_error("MES size exceeds the spectrum dimension");
  }
}

// Direct objective for a candidate optimizer: (sum of top-L sqrt)^2 / L.
double mes_overlap(std::vector<double> q, long long L) {
  std::sort(q.begin(), q.end(), std::greater<double>());
  CompensatedSum s;
  for (long long i = 0; i < L && i < static_cast<long long>(q.size()); ++i) {
    s.add(std::sqrt(std::max(q[static_cast<std::size_t>(i)], 0.0)));
  }
  const double root = s.value();
  return std::min(root * root / static_cast<double>(L), 1.0);
}

bool prefix_dominates(const std::vector<double>& q,
                      const std::vector<double>& p) {
  CompensatedSum qs, ps;
  const std::size_t n = std::max(q.size(), p.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i < q.size()) qs.add(q[i]);
    if (i < p.size()) ps.add(p[i]);
    if (qs.value() < ps.value() - 1e-12) return false;
  }
  return true;
}

// Pool-adjacent-violators fit to a nonincreasing sequence. Pooling a block
// replaces it by its mean, which never lowers any prefix sum, so the result
// still majorizes whatever the input prefix profile dominated.
std::vector<double> isotonic_nonincreasing(const std::vector<double>& x) {
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (double v : x) {
    blocks.push_back(Block{v, 1});
    while (blocks.size() >= 2) {
      const Block& a = blocks[blocks.size() - 2];
      const Block& b = blocks.back();
      if (a.sum * static_cast<double>(b.count) <
          b.sum * static_cast<double>(a.count)) {
        const Block merged{a.sum + b.sum, a.count + b.count};
        blocks.pop_back();
        blocks.back() = merged;
      } else {
        break;
      }
    }
  }
  std::vector<double> out;
  out.reserve(x.size());
  for (const Block& b : blocks) {
    const double mean = b.sum / static_cast<double>(b.count);
    out.insert(out.end(), b.count, mean);
  }
  return out;
}

}  // namespace

double failure_function(const WeightedSpectrum& sp, double x) {
  if (!(x >= 0.0)) throw validation_error("threshold x must be >= 0");
  CompensatedSum acc;
  for (const auto& e : sp.entries()) {
    if (e.value <= x) break;
    acc.add(std::exp(e.log_count) * (e.value - x));
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

double pflec_failure_oracle(const WeightedSpectrum& sp, double x) {
  if (!(x >= 0.0)) throw validation_error("threshold x must be >= 0");
  CompensatedSum kept;
  for (const auto& e : sp.entries()) {
    kept.add(std::exp(e.log_count) * std::min(e.value, x));
  }
  return std::clamp(1.0 - kept.value(), 0.0, 1.0);
}

ProtocolReport optimal_pflec(const WeightedSpectrum& sp, double x) {
  if (!(x > 0.0)) throw validation_error("threshold x must be > 0");
  if (!(x <= 1.0)) throw validation_error("threshold x must be <= 1");
  const double h = failure_function(sp, x);
  const long long size = std::max<long long>(floor_snap((1.0 - h) / x), 1);
  ProtocolReport report;
  report.size = size;
  report.failure = h;
  report.fidelity = 1.0 - h;
  report.threshold_x = x;
  return report;
}

ProtocolReport min_failure_for_size(const WeightedSpectrum& sp, long long L) {
  check_size(sp, L);
  const auto& entries = sp.entries();

  // On the x-segment between consecutive distinct values,
  // (1 - h(x))/x = A/x + B where B counts the atoms above the segment and A
  // is the remaining mass. The map is nonincreasing, so the largest feasible
  // x (and hence the smallest failure) sits where A/x + B crosses L; walk
  // segments from x = 1 downward until the crossing lands inside one.
  const double Ld = static_cast<double>(L);
  double B = 0.0;
  CompensatedSum mass_above;
  double x_star = -1.0;
  for (std::size_t k = 0; k <= entries.size(); ++k) {
    const double hi = (k == 0) ? 1.0 : entries[k - 1].value;
    const double lo = (k < entries.size()) ? entries[k].value : 0.0;
    const double A = 1.0 - mass_above.value();
    if (Ld <= B + 1e-9) {
      x_star = hi;  // ratio >= B >= L on the whole segment
      break;
    }
    const double x_cand = A / (Ld - B);
    if (x_cand >= lo - 1e-15) {
      x_star = std::min(x_cand, hi);
      break;
    }
    if (k < entries.size()) {
      B += entries[k].count;
      mass_above.add(std::exp(entries[k].log_value + entries[k].log_count));
    }
  }
  if (!(x_star > 0.0)) {
    throw numeric_domain_error("no threshold achieves the requested size");
  }
  ProtocolReport report;
  report.size = L;
  report.failure = failure_function(sp, x_star);
  report.fidelity = 1.0 - report.failure;
  report.threshold_x = x_star;
  return report;
}

DflecSolution dflec_solve(const WeightedSpectrum& sp, long long L) {
  check_size(sp, L);
  const double dim = sp.total_dimension();
  if (!(dim <= kAtomCap)) {
    throw validation_error("spectrum dimension too large for DFLEC solve");
  }
  const long long dim_ll = static_cast<long long>(std::llround(dim));
  const std::vector<double> atoms = leading_atoms(sp, std::min(L + 1, dim_ll));

  CompensatedSum prefix_mass;
  CompensatedSum prefix_sqrt;
  double best_fidelity = -1.0;
  long long best_l = -1;
  double best_fill = 0.0;

  for (long long l = 0; l < L; ++l) {
    const double P = prefix_mass.value();
    const double c = (1.0 - P) / static_cast<double>(L - l);
    const double p_here =
        l >= 1 ? atoms[static_cast<std::size_t>(l - 1)] : kInf;
    const double p_next =
        l < dim_ll ? atoms[static_cast<std::size_t>(l)] : 0.0;
    // Descending validity: c <= p_l. Majorization: c >= p_{l+1}.
    if (c <= p_here + 1e-15 && c >= p_next - 1e-15) {
      const double root =
          prefix_sqrt.value() +
          static_cast<double>(L - l) * std::sqrt(std::max(c, 0.0));
      const double fid =
          std::min(root * root / static_cast<double>(L), 1.0);
      if (fid > best_fidelity) {
        best_fidelity = fid;
        best_l = l;
        best_fill = std::max(c, 0.0);
      }
    }
    if (l < dim_ll) {
      prefix_mass.add(atoms[static_cast<std::size_t>(l)]);
      prefix_sqrt.add(std::sqrt(atoms[static_cast<std::size_t>(l)]));
    }
  }
  if (best_l < 0) {
    throw numeric_domain_error("no feasible flattening found");
  }

  // Materialize the optimizer spectrum: top-best_l atoms of p, then the
  // flat level on the remaining slots.
  std::vector<WeightedSpectrum::Entry> q_entries;
  long long taken = 0;
  for (const auto& e : sp.entries()) {
    if (taken >= best_l) break;
    const long long run =
        std::min(static_cast<long long>(e.count), best_l - taken);
    q_entries.push_back(WeightedSpectrum::Entry{
        e.value, e.log_value, static_cast<double>(run),
        std::log(static_cast<double>(run))});
    taken += run;
  }
  const double slots = static_cast<double>(L - best_l);
  q_entries.push_back(WeightedSpectrum::Entry{
      best_fill, std::log(best_fill), slots, std::log(slots)});

  ProtocolReport report;
  report.size = L;
  report.fidelity = best_fidelity;
  report.failure = 1.0 - best_fidelity;
  return DflecSolution{report,
                       WeightedSpectrum::from_log_entries(
                           std::move(q_entries), /*renormalize=*/false),
                       best_l, best_fill};
}

ProtocolReport dflec_max_fidelity(const WeightedSpectrum& sp, long long L) {
  return dflec_solve(sp, L).report;
}

double dflec_fidelity_oracle(const WeightedSpectrum& sp, long long L,
                             int samples, std::uint64_t seed) {
  if (sp.distinct_count() > 8) {
    throw validation_error("oracle requires <= 8 distinct values");
  }
  check_size(sp, L);
  const std::vector<double> p = all_atoms(sp);
  const std::size_t dim = p.size();

  double best = 0.0;
  std::vector<std::vector<double>> family;

  // Exhaustive keep-l/flatten family, feasibility checked by brute prefix
  // dominance rather than through the production code path.
  for (long long l = 0; l < L; ++l) {
    std::vector<double> q(p.begin(), p.begin() + static_cast<long>(l));
    double tail = 1.0;
    for (double v : q) tail -= v;
    const double c = tail / static_cast<double>(L - l);
    q.insert(q.end(), static_cast<std::size_t>(L - l), c);
    std::sort(q.begin(), q.end(), std::greater<double>());
    if (!prefix_dominates(q, p)) continue;
    family.push_back(q);
    best = std::max(best, mes_overlap(q, L));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> p_prefix(dim);
  {
    CompensatedSum acc;
    for (std::size_t i = 0; i < dim; ++i) {
      acc.add(p[i]);
      p_prefix[i] = acc.value();
    }
  }

  for (int s = 0; s < samples; ++s) {
    // Random direction: noise around p or around a family member.
    std::vector<double> t = family.empty() || (s % 2 == 0)
                                ? p
                                : family[static_cast<std::size_t>(s) %
                                         family.size()];
    t.resize(dim, 0.0);
    const double scale = 0.05 + 0.95 * unif(rng);
    double total = 0.0;
    for (double& v : t) {
      v = std::max(v + scale * (unif(rng) - 0.35) / static_cast<double>(dim),
                   1e-12);
      total += v;
    }
    for (double& v : t) v /= total;
    std::sort(t.begin(), t.end(), std::greater<double>());

    // Projection onto the majorization cone: prefix max against p, then a
    // nonincreasing isotonic fit of the increments.
    std::vector<double> g(dim);
    double run = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      run += t[i];
      g[i] = std::max(run, p_prefix[i]);
    }
    std::vector<double> inc(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      inc[i] = g[i] - (i == 0 ? 0.0 : g[i - 1]);
    }
    std::vector<double> q = isotonic_nonincreasing(inc);
    if (!prefix_dominates(q, p)) continue;  // fp guard
    best = std::max(best, mes_overlap(q, L));
  }
  return best;
}

double majorized_root_sum_bound(const WeightedSpectrum& sp, long long trT, long long M) {
  if (M < 1 || trT < M) {
    throw validation_error("majorized_root_sum_bound requires trT >= M >= 1");
  }
  const double threshold = 1.0 / static_cast<double>(M);
  CompensatedSum count_hi;
  CompensatedSum mass_hi;
  for (const auto& e : sp.entries()) {
    if (e.value >= threshold) {
      count_hi.add(e.count);
      mass_hi.add(std::exp(e.log_value + e.log_count));
    }
  }
  const double c = count_hi.value();
  const double m_hi = std::min(mass_hi.value(), 1.0);
  const double m_lo = std::max(1.0 - m_hi, 0.0);
  const double extra = std::max(static_cast<double>(trT) - c, 0.0);
  return std::sqrt(c) * std::sqrt(m_hi) + std::sqrt(extra) * std::sqrt(m_lo);
}

}  // namespace concentrate
