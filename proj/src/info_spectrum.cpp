#include "concentrate/info_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "concentrate/numeric.hpp"

namespace concentrate {

namespace {

// Least-squares slope of y against x.
double regression_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

double neg_log_over_n(const LogSumExp& lse, long n) {
  if (lse.empty()) return kInf;
  return -lse.value() / static_cast<double>(n);
}

}  // namespace

const char* quantity_name(SpectralQuantity q) {
  switch (q) {
    case SpectralQuantity::zeta: return "zeta";
    case SpectralQuantity::zeta_c: return "zeta_c";
    case SpectralQuantity::eta: return "eta";
    case SpectralQuantity::zeta_half: return "zeta_half";
    case SpectralQuantity::zeta_c_half: return "zeta_c_half";
  }
  return "unknown";
}

SpectralQuantity quantity_from_name(const std::string& name) {
  if (name == "zeta") return SpectralQuantity::zeta;
  if (name == "zeta_c") return SpectralQuantity::zeta_c;
  if (name == "eta") return SpectralQuantity::eta;
  if (name == "zeta_half") return SpectralQuantity::zeta_half;
  if (name == "zeta_c_half") return SpectralQuantity::zeta_c_half;
  throw validation_error("unknown quantity: " + name);
}

double K_n(const WeightedSpectrum& sp, long n, double a) {
  if (n < 1) throw validation_error("n must be >= 1");
  LogSumExp above;
  for (const auto& e : sp.entries()) {
    if (e.log_value + static_cast<double>(n) * a >= 0.0) {
      above.add(e.log_value + e.log_count);
    }
  }
  if (above.empty()) return 0.0;
  return std::min(std::exp(above.value()), 1.0);
}

FiniteQuantities finite_quantities(const WeightedSpectrum& sp, long n,
                                   double a) {
  if (n < 1) throw validation_error("n must be >= 1");
  LogSumExp rho_below, rho_above, count_above, half_below, half_above;
  const double na = static_cast<double>(n) * a;
  for (const auto& e : sp.entries()) {
    const bool above = e.log_value + na >= 0.0;
    const double mass = e.log_value + e.log_count;
    const double half = 0.5 * e.log_value + e.log_count;
    if (above) {
      rho_above.add(mass);
      count_above.add(e.log_count);
      half_above.add(half);
    } else {
      rho_below.add(mass);
      half_below.add(half);
    }
  }
  FiniteQuantities out;
  out.zeta = neg_log_over_n(rho_below, n);
  out.zeta_c = neg_log_over_n(rho_above, n);
  out.eta = neg_log_over_n(count_above, n);
  out.zeta_half = neg_log_over_n(half_below, n);
  out.zeta_c_half = neg_log_over_n(half_above, n);
  return out;
}

double finite_quantity(const WeightedSpectrum& sp, long n, double a,
                       SpectralQuantity q) {
  const FiniteQuantities all = finite_quantities(sp, n, a);
  switch (q) {
    case SpectralQuantity::zeta: return all.zeta;
    case SpectralQuantity::zeta_c: return all.zeta_c;
    case SpectralQuantity::eta: return all.eta;
    case SpectralQuantity::zeta_half: return all.zeta_half;
    case SpectralQuantity::zeta_c_half: return all.zeta_c_half;
  }
  return kInf;
}

double finite_rate_constant(const WeightedSpectrum& sp, long n, double eps) {
  if (n < 1) throw validation_error("n must be >= 1");
  if (!(eps >= 0.0)) throw validation_error("eps must be >= 0");
  // K_n steps up at a_k = -(1/n) log v_k; the feasible set {K_n <= eps} is
  // the open interval up to the first jump past eps.
  LogSumExp cumulative;
  for (const auto& e : sp.entries()) {
    cumulative.add(e.log_value + e.log_count);
    if (std::exp(cumulative.value()) > eps) {
      return -e.log_value / static_cast<double>(n);
    }
  }
  return kInf;  // eps >= 1: every rate is feasible
}

double finite_rate_failure(const WeightedSpectrum& sp, long n, double r) {
  if (n < 1) throw validation_error("n must be >= 1");
  if (!(r > 0.0)) throw validation_error("exponent r must be > 0");
  LogSumExp cumulative;
  for (const auto& e : sp.entries()) {
    cumulative.add(e.log_value + e.log_count);
    if (-cumulative.value() / static_cast<double>(n) < r) {
      return -e.log_value / static_cast<double>(n);
    }
  }
  return kInf;
}

SpectrumSequence SpectrumSequence::iid(WeightedSpectrum base,
                                       std::vector<long> ns,
                                       std::size_t class_cap) {
  SpectrumSequence seq;
  seq.generator = [base = std::move(base), class_cap](long n) {
    return iid_product(base, n, class_cap);
  };
  seq.n_range = std::move(ns);
  return seq;
}

EmpiricalRate empirical_rate(const SpectrumSequence& seq, SpectralQuantity q,
                             double a) {
  if (seq.n_range.size() < 3) {
    throw validation_error("empirical_rate needs at least 3 sample sizes");
  }
  std::vector<double> ns, ys;
  ns.reserve(seq.n_range.size());
  ys.reserve(seq.n_range.size());
  for (long n : seq.n_range) {
    const double v = finite_quantity(seq.generator(n), n, a, q);
    if (!std::isfinite(v)) {
      throw numeric_domain_error(std::string(quantity_name(q)) +
                                 " is infinite at n=" + std::to_string(n));
    }
    ns.push_back(static_cast<double>(n));
    ys.push_back(static_cast<double>(n) * v);
  }
  const double slope = regression_slope(ns, ys);
  double intercept = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    intercept += ys[i] - slope * ns[i];
  }
  intercept /= static_cast<double>(ns.size());
  double residual = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    residual =
        std::max(residual, std::abs(ys[i] - (intercept + slope * ns[i])) /
                               ns[i]);
  }
  return EmpiricalRate{slope, residual};
}

PairedSpectrum PairedSpectrum::from_bases(std::span<const double> rho,
                                          std::span<const double> sigma) {
  if (rho.empty() || rho.size() != sigma.size()) {
    throw validation_error("paired bases need equal nonzero lengths");
  }
  CompensatedSum total;
  for (double v : rho) {
    if (!(v > 0.0)) throw validation_error("rho values must be positive");
    total.add(v);
  }
  if (std::abs(total.value() - 1.0) > 1e-9) {
    throw validation_error("rho base must sum to 1");
  }
  PairedSpectrum sp;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(sigma[i] > 0.0)) {
      throw validation_error("sigma values must be positive");
    }
    sp.atoms.push_back(PairedAtom{std::log(rho[i]), std::log(sigma[i]), 0.0});
  }
  return sp;
}

PairedSpectrum PairedSpectrum::with_uniform_sigma(const WeightedSpectrum& rho) {
  PairedSpectrum sp;
  const double log_dim = rho.log_total_dimension();
  for (const auto& e : rho.entries()) {
    sp.atoms.push_back(PairedAtom{e.log_value, -log_dim, e.log_count});
  }
  return sp;
}

PairedSpectrum PairedSpectrum::with_sqrt_sigma(const WeightedSpectrum& rho) {
  PairedSpectrum sp;
  for (const auto& e : rho.entries()) {
    sp.atoms.push_back(PairedAtom{e.log_value, 0.5 * e.log_value, e.log_count});
  }
  return sp;
}

PairedSpectrum paired_iid_product(const PairedSpectrum& base, long copies,
                                  std::size_t class_cap) {
  if (copies < 1) throw validation_error("copy count must be >= 1");
  const long d = static_cast<long>(base.atoms.size());
  const double log_classes = std::lgamma(static_cast<double>(copies + d)) -
                             std::lgamma(static_cast<double>(copies + 1)) -
                             std::lgamma(static_cast<double>(d));
  if (log_classes > std::log(static_cast<double>(class_cap)) + 1e-9) {
    throw validation_error("paired type-class count exceeds the cap");
  }

  PairedSpectrum out;
  std::vector<long> parts(static_cast<std::size_t>(d), 0);
  auto walk = [&](auto&& self, long index, long remaining, double lr,
                  double ls, double lw) -> void {
    const auto& atom = base.atoms[static_cast<std::size_t>(index)];
    if (index == d - 1) {
      double log_mult = std::lgamma(static_cast<double>(copies) + 1.0);
      for (long i = 0; i < d - 1; ++i) {
        log_mult -=
            std::lgamma(static_cast<double>(parts[static_cast<std::size_t>(i)]) + 1.0);
      }
      log_mult -= std::lgamma(static_cast<double>(remaining) + 1.0);
      out.atoms.push_back(PairedAtom{lr + remaining * atom.log_rho,
                                     ls + remaining * atom.log_sigma,
                                     lw + remaining * atom.log_weight +
                                         log_mult});
      return;
    }
    for (long k = 0; k <= remaining; ++k) {
      parts[static_cast<std::size_t>(index)] = k;
      self(self, index + 1, remaining - k, lr + k * atom.log_rho,
           ls + k * atom.log_sigma, lw + k * atom.log_weight);
    }
  };
  walk(walk, 0, copies, 0.0, 0.0, 0.0);
  return out;
}

PairedQuantities paired_quantities(const PairedSpectrum& sp, long n, double a) {
  if (n < 1) throw validation_error("n must be >= 1");
  const double na = static_cast<double>(n) * a;
  LogSumExp rho_above, rho_below, sigma_above;
  for (const auto& atom : sp.atoms) {
    if (atom.log_rho - atom.log_sigma + na > 0.0) {
      rho_above.add(atom.log_rho + atom.log_weight);
      sigma_above.add(atom.log_sigma + atom.log_weight);
    } else {
      rho_below.add(atom.log_rho + atom.log_weight);
    }
  }
  PairedQuantities out;
  out.zeta = neg_log_over_n(rho_below, n);
  out.zeta_c = neg_log_over_n(rho_above, n);
  out.eta = neg_log_over_n(sigma_above, n);
  return out;
}

PairedSequence PairedSequence::iid(PairedSpectrum base, std::vector<long> ns,
                                   std::size_t class_cap) {
  PairedSequence seq;
  seq.generator = [base = std::move(base), class_cap](long n) {
    return paired_iid_product(base, n, class_cap);
  };
  seq.n_range = std::move(ns);
  return seq;
}

InequalityReport spectral_inequality_suite(const PairedSequence& seq,
                                std::span<const double> a_grid,
                                std::span<const double> b_grid, double slack) {
  if (seq.n_range.size() < 3) {
    throw validation_error("inequality suite needs at least 3 sample sizes");
  }
  InequalityReport report;
  const double nan = std::nan("");

  // One pass of per-n quantities for every grid point.
  std::vector<PairedSpectrum> spectra;
  spectra.reserve(seq.n_range.size());
  for (long n : seq.n_range) spectra.push_back(seq.generator(n));

  std::vector<std::vector<PairedQuantities>> table(a_grid.size());
  for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
    table[ai].reserve(seq.n_range.size());
    for (std::size_t ni = 0; ni < seq.n_range.size(); ++ni) {
      table[ai].push_back(
          paired_quantities(spectra[ni], seq.n_range[ni], a_grid[ai]));
    }
  }

  // zeta_c_n(a) <= eta_n(a) + a at every n, zero slack: the rho trace on
  // the strict set dominates e^{-na} times the sigma trace term by term.
  for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
    double worst = kInf;
    bool pass = true;
    for (std::size_t ni = 0; ni < seq.n_range.size(); ++ni) {
      const PairedQuantities& q = table[ai][ni];
      if (std::isinf(q.zeta_c) && std::isinf(q.eta)) continue;
      const double margin = (a_grid[ai] + q.eta) - q.zeta_c;
      worst = std::min(worst, margin);
      if (margin < -1e-12) pass = false;
    }
    report.checks.push_back(
        InequalityCheck{"threshold-trace", a_grid[ai], nan, worst, pass});
    if (!pass) ++report.failures;
  }

  // Empirical-limit estimates per grid point: regression slope of the
  // accumulated n * q_n. Grid points with a degenerate (empty-set) quantity
  // at some n are skipped for the limit-level checks.
  struct Estimate {
    double zeta = kInf, eta = kInf;
    bool usable = false;
  };
  std::vector<double> ns;
  for (long n : seq.n_range) ns.push_back(static_cast<double>(n));
  std::vector<Estimate> est(a_grid.size());
  for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
    std::vector<double> yz, ye;
    bool ok = true;
    for (std::size_t ni = 0; ni < seq.n_range.size(); ++ni) {
      const PairedQuantities& q = table[ai][ni];
      if (!std::isfinite(q.zeta) || !std::isfinite(q.eta)) {
        ok = false;
        break;
      }
      yz.push_back(ns[ni] * q.zeta);
      ye.push_back(ns[ni] * q.eta);
    }
    if (!ok) continue;
    est[ai].zeta = regression_slope(ns, yz);
    est[ai].eta = regression_slope(ns, ye);
    est[ai].usable = true;
  }

  // min{zeta(a), a + eta(a)} >= min{zeta(b), a + eta(b)} across the grids.
  for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
    if (!est[ai].usable) continue;
    const double a = a_grid[ai];
    const double lhs = std::min(est[ai].zeta, a + est[ai].eta);
    for (std::size_t bi = 0; bi < a_grid.size(); ++bi) {
      if (bi == ai || !est[bi].usable) continue;
      const double rhs = std::min(est[bi].zeta, a + est[bi].eta);
      const double margin = lhs - rhs + slack;
      const bool pass = margin >= 0.0;
      report.checks.push_back(
          InequalityCheck{"min-comparison", a, a_grid[bi], margin, pass});
      if (!pass) ++report.failures;
    }
  }

  // sup{a - zeta(a) | zeta(a) <= r} >= sup{-eta(a) | a + eta(a) <= r}.
  for (double r : b_grid) {
    double lhs = -kInf, rhs = -kInf;
    for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
      if (!est[ai].usable) continue;
      const double a = a_grid[ai];
      if (est[ai].zeta <= r + slack) lhs = std::max(lhs, a - est[ai].zeta);
      if (a + est[ai].eta <= r - slack) rhs = std::max(rhs, -est[ai].eta);
    }
    const bool trivial = rhs == -kInf;
    const double margin = trivial ? kInf : lhs - rhs + slack;
    const bool pass = trivial || margin >= 0.0;
    report.checks.push_back(InequalityCheck{"sup-comparison", nan, r, margin, pass});
    if (!pass) ++report.failures;
  }

  return report;
}

}  // namespace concentrate
