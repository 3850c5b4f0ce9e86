#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "concentrate/asymptotics.hpp"
#include "concentrate/info_spectrum.hpp"
#include "concentrate/json_io.hpp"
#include "concentrate/large_deviations.hpp"
#include "concentrate/majorization.hpp"
#include "concentrate/numeric.hpp"
#include "concentrate/protocols.hpp"
#include "concentrate/randomness.hpp"
#include "concentrate/sampling.hpp"
#include "concentrate/spectrum.hpp"
#include "concentrate/thermal.hpp"

using json = nlohmann::json;
using namespace concentrate;

namespace {

unsigned thread_cap() {
  if (const char* env = std::getenv("CONCENTRATE_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Deterministic parallel map: workers fill disjoint strides of a
// preallocated result slot, so output order never depends on scheduling.
template <typename F>
void parallel_for(std::size_t count, F&& body) {
  const unsigned threads =
      std::min<std::size_t>(thread_cap(), count == 0 ? 1 : count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<double> parse_grid(const std::string& spec) {
  double lo, hi, step;
  char c1, c2;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':') {
    throw validation_error("grid must be min:max:step, got '" + spec + "'");
  }
  return arange_inclusive(lo, hi, step);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double to_bits(double nats) { return nats / std::log(2.0); }

json tail_to_json(const TailValue& v) {
  if (v.is_infinite()) {
    return json{{"infinite", true}, {"sign", v.as_double() > 0 ? 1 : -1}};
  }
  return json{{"infinite", false}, {"value", v.value()}};
}

int run_protocol(const std::string& spectrum_path, double x, long long size,
                 const std::string& sweep, const std::string& out) {
  const auto sp = load_spectrum(spectrum_path);
  if (!sweep.empty()) {
    const auto grid = parse_grid(sweep);
    std::vector<std::string> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      const auto rep = optimal_pflec(sp, grid[i]);
      rows[i] = csv_num(grid[i]) + "," + std::to_string(rep.size) + "," +
                csv_num(rep.failure) + "," + csv_num(rep.fidelity);
    });
    std::string csv = "x,size,failure,fidelity\n";
    for (const auto& r : rows) csv += r + "\n";
    emit(csv, out);
    return 0;
  }
  ProtocolReport rep;
  if (size > 0) {
    rep = min_failure_for_size(sp, size);
  } else if (x > 0.0) {
    rep = optimal_pflec(sp, x);
  } else {
    throw validation_error("protocol needs --x, --size or --sweep");
  }
  emit(report_to_json(rep).dump(2), out);
  return 0;
}

int run_majorize(const std::string& source_path,
                 const std::string& target_path) {
  const auto source = load_spectrum(source_path);
  const auto target = load_spectrum(target_path);
  const auto verdict = majorization_verdict(source, target);
  if (verdict.holds) {
    std::cout << "source majorizes target\n";
  } else {
    std::cout << "source does not majorize target (first violated prefix k="
              << static_cast<long long>(*verdict.violated_prefix) << ")\n";
  }
  return 0;
}

int run_spectrum_rates(const std::string& iid_path, const std::string& n_spec,
                       const std::string& a_spec, const std::string& quantity,
                       bool bits, const std::string& out) {
  const auto base = load_spectrum(iid_path);
  const auto n_grid = parse_grid(n_spec);
  const auto a_grid = parse_grid(a_spec);
  const bool want_K = quantity == "K";
  const SpectralQuantity q =
      want_K ? SpectralQuantity::zeta : quantity_from_name(quantity);

  std::vector<std::string> blocks(n_grid.size());
  parallel_for(n_grid.size(), [&](std::size_t i) {
    const long n = static_cast<long>(std::llround(n_grid[i]));
    const auto prod = iid_product(base, n);
    std::string rows;
    for (double a : a_grid) {
      double v = want_K ? K_n(prod, n, a) : finite_quantity(prod, n, a, q);
      if (!want_K && bits) v = to_bits(v);
      rows += std::to_string(n) + "," + csv_num(a) + "," + csv_num(v) + "\n";
    }
    blocks[i] = rows;
  });
  std::string csv = "n,a," + quantity + "\n";
  for (const auto& b : blocks) csv += b;
  emit(csv, out);
  return 0;
}

int run_rates(const std::string& iid_path, double r, double eps, double a,
              const std::string& sweep, const std::string& formula, bool bits,
              bool strict_domain, const std::string& out) {
  const auto base = load_spectrum(iid_path);
  const auto profile = profile_from_spectrum(base);
  const double scale = bits ? 1.0 / std::log(2.0) : 1.0;

  auto eval_exponent = [&](double rr) -> double {
    if (formula == "fail") return rate_failure_exponent(profile, rr);
    if (formula == "succ-p") return rate_success_exponent_pflec(profile, rr);
    if (formula == "succ-d") return rate_success_exponent_dflec(profile, rr);
    throw validation_error("unknown formula: " + formula);
  };

  if (formula == "const") {
    if (!(eps >= 0.0 && eps < 1.0)) {
      throw validation_error("eps must lie in [0, 1)");
    }
    // The bracket is eps-free for any constant constraint below 1.
    const auto [lo, hi] = rate_constant(profile);
    emit(json{{"formula", "const"},
              {"eps", eps},
              {"lower", lo * scale},
              {"upper", hi * scale}}
             .dump(2),
         out);
    return 0;
  }
  if (formula == "zeta" || formula == "zeta-c") {
    auto eval_curve = [&](double aa) -> json {
      if (formula == "zeta") {
        const auto z = zeta_asymptotic(profile, aa);
        if (strict_domain && !z.in_domain) {
          throw numeric_domain_error(
              "a outside the stated zeta domain (clamping disabled)");
        }
        return json{{"a", aa * scale},
                    {"value", z.value * scale},
                    {"in_domain", z.in_domain}};
      }
      const double z = zeta_c_asymptotic(profile, aa);
      if (std::isinf(z)) {
        return json{{"a", aa * scale}, {"infinite", true}};
      }
      return json{{"a", aa * scale}, {"value", z * scale}};
    };
    if (!sweep.empty()) {
      const auto grid = parse_grid(sweep);
      std::string csv = "a,value\n";
      for (double aa : grid) {
        const json row = eval_curve(aa);
        csv += csv_num(aa * scale);
        csv += ",";
        csv += row.contains("infinite") ? "inf"
                                        : csv_num(row["value"].get<double>());
        csv += "\n";
      }
      emit(csv, out);
      return 0;
    }
    emit(eval_curve(a).dump(2), out);
    return 0;
  }

  if (!sweep.empty()) {
    const auto grid = parse_grid(sweep);
    std::vector<std::string> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      rows[i] =
          csv_num(grid[i]) + "," + csv_num(eval_exponent(grid[i]) * scale);
    });
    std::string csv = "r,value\n";
    for (const auto& row : rows) csv += row + "\n";
    emit(csv, out);
    return 0;
  }
  emit(
      json{{"formula", formula}, {"r", r}, {"value", eval_exponent(r) * scale}}
          .dump(2),
      out);
  return 0;
}

int run_thermal(const std::string& levels_path, double beta0, double r,
                bool bits, const std::string& out) {
  const auto pf = load_partition(levels_path);
  const auto rates = thermal_rates(pf, beta0, r);
  const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
  emit(json{{"b_const", rates.b_const * scale},
            {"b_fail", rates.b_fail * scale},
            {"b_succ_p", rates.b_succ_p * scale},
            {"b_succ_d", rates.b_succ_d * scale},
            {"r_half", rates.r_half * scale}}
           .dump(2),
       out);
  return 0;
}

LogMgf mgf_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "bernoulli") return mgf_bernoulli(j.at("q").get<double>());
  if (family == "gaussian") return mgf_gaussian();
  if (family == "from-spectrum") {
    return mgf_from_spectrum(spectrum_from_json(j.at("spectrum")));
  }
  throw validation_error("unknown mgf family: " + family);
}

int run_ldp(const std::string& mgf_path, double a, const std::string& out) {
  const auto mgf = mgf_from_json(read_json_file(mgf_path));
  const auto slopes = slope_constants(mgf);
  const auto tails = tail_exponents(mgf, a);
  emit(json{{"a", a},
            {"R1", tail_to_json(slopes.R1)},
            {"R2", slopes.R2},
            {"R3", slopes.R3},
            {"R4", tail_to_json(slopes.R4)},
            {"rate_function", tail_to_json(rate_function(mgf, a))},
            {"upper_tail", tail_to_json(tails.upper_ge)},
            {"lower_tail", tail_to_json(tails.lower_le)}}
           .dump(2),
       out);
  return 0;
}

int run_randomness(const std::string& spectrum_path, int M, bool greedy,
                   const std::string& map_path, const std::string& out) {
  const auto sp = load_spectrum(spectrum_path);
  PartitionMap pm;
  if (greedy) {
    pm = greedy_partition(sp, M);
  } else if (!map_path.empty()) {
    pm = load_partition_map(map_path);
  } else {
    throw validation_error("randomness needs --greedy or --map");
  }
  const auto rec = duality_check(sp, pm);
  json j{{"M", pm.M},
         {"epsilon", rec.epsilon},
         {"fidelity", rec.fidelity},
         {"kl_deficit", kl_deficit(sp, pm)},
         {"sandwich_holds", rec.sandwich_holds},
         {"bucket_masses", bucket_masses(sp, pm)}};
  if (greedy) {
    std::vector<int> one_based;
    for (int b : pm.assignment) one_based.push_back(b + 1);
    j["assignment"] = one_based;
  }
  emit(j.dump(2), out);
  return 0;
}

int run_selftest(std::uint64_t seed) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failures;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  {
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i) {
      const auto base = random_spectrum(rng, 4, 2);
      const auto prod = iid_product(base, 4);
      for (double s : {0.3, 1.6}) {
        ok = ok &&
             std::abs(renyi_psi(prod, s) - 4.0 * renyi_psi(base, s)) < 1e-9;
      }
    }
    report("psi additivity over product spectra", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i) {
      const auto sp = random_spectrum(rng, 6, 2);
      const double h = 1e-5;
      const double slope =
          (renyi_psi(sp, 1.0 + h) - renyi_psi(sp, 1.0 - h)) / (2.0 * h);
      ok = std::abs(-slope - entropy(sp)) <= 1e-6 * std::max(1.0, entropy(sp));
    }
    report("entropy equals -dpsi/ds at s=1", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 200 && ok; ++i) {
      const auto a = random_spectrum(rng, 5, 2);
      const auto b = random_spectrum(rng, 5, 2);
      const auto c = random_spectrum(rng, 5, 2);
      if (majorizes(a, b) && majorizes(b, c)) ok = majorizes(a, c);
    }
    report("majorization transitivity", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 200 && ok; ++i) {
      const auto sp = random_spectrum(rng, 8, 2);
      const double x = unif(rng);
      ok = std::abs(failure_function(sp, x) - pflec_failure_oracle(sp, x)) <=
           1e-12;
    }
    report("failure function equals its convex-program oracle", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 50 && ok; ++i) {
      const auto sp = random_spectrum(rng, 6, 2);
      const long long dim =
          static_cast<long long>(std::llround(sp.total_dimension()));
      for (long long L = 1; L <= dim && ok; ++L) {
        const auto sol = dflec_solve(sp, L);
        ok = majorizes(sol.optimizer, sp) &&
             sol.report.fidelity >=
                 1.0 - min_failure_for_size(sp, L).failure - 1e-12;
      }
    }
    report("dflec optimizer majorizes and beats the pflec view", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 20 && ok; ++i) {
      const auto sp = random_spectrum(rng, 6, 2);
      const long long dim =
          static_cast<long long>(std::llround(sp.total_dimension()));
      for (long long L = 1; L <= dim && ok; ++L) {
        const double oracle = dflec_fidelity_oracle(sp, L, 40, seed + i);
        ok = dflec_max_fidelity(sp, L).fidelity >= oracle - 1e-9;
      }
    }
    report("dflec certified against the cone-sampling oracle", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i) {
      const auto pr = profile_from_spectrum(random_spectrum(rng, 6, 2));
      ok = pr.h_inf() <= pr.h_minus() + 1e-9 &&
           pr.h_minus() <= pr.h_plus() + 1e-9 &&
           pr.h_plus() <= pr.neg_dpsi0() + 1e-9;
      for (double s : {0.3, 0.8, 1.5, 4.0}) ok = ok && pr.d2psi(s) >= -1e-8;
    }
    report("profile convexity and slope ordering", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 10; ++i) {
      const auto sp = random_spectrum(rng, 5, 2);
      if (sp.distinct_count() < 2) continue;
      const auto pr = profile_from_spectrum(sp);
      const double r_star = dflec_regime_boundary(pr);
      const double gap = rate_success_exponent_dflec(pr, r_star + 0.05) -
                         rate_success_exponent_pflec(pr, r_star + 0.05);
      const double cont = std::abs(rate_success_exponent_pflec(pr, r_star) -
                                   (2.0 * pr.psi(0.5) + r_star));
      ok = ok && gap > 0.0 && cont <= 1e-9;
    }
    report("dflec/pflec exponents split exactly past the boundary", ok);
  }
  {
    const std::vector<std::pair<double, double>> levels{{0.0, 1.0},
                                                        {1.0, 1.0}};
    const auto pf = PartitionFunction::from_levels(levels);
    const double beta0 = 0.5 + unif(rng);
    const auto thermal = profile_from_partition(pf, beta0);
    const double z = 1.0 + std::exp(beta0);
    const auto direct = profile_from_spectrum(WeightedSpectrum::from_values(
        std::vector<double>{1.0 / z, std::exp(beta0) / z}));
    bool ok = true;
    for (int i = 1; i <= 20; ++i) {
      const double s = 0.15 * i;
      ok = ok && std::abs(thermal.psi(s) - direct.psi(s)) <= 1e-12;
    }
    report("thermal profile equals the direct spectrum profile", ok);
  }
  {
    const auto base = random_spectrum(rng, 4, 1);
    const auto pr = profile_from_spectrum(base);
    const auto mgf = mgf_from_spectrum(base);
    bool ok = true;
    const double lo = pr.h_plus() + 0.02;
    const double hi = pr.neg_dpsi0() - 0.02;
    for (int i = 0; i < 5 && lo < hi; ++i) {
      const double a = lo + (hi - lo) * i / 4.0;
      ok = ok && std::abs(zeta_asymptotic(pr, a).value -
                          tail_exponents(mgf, a).upper_ge.value()) <= 1e-8;
    }
    report("zeta agrees with the tail-exponent substitution", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
      const auto sp = random_spectrum(rng, 6, 2);
      const int dim = static_cast<int>(sp.total_dimension());
      const int M = 1 + static_cast<int>(rng() % static_cast<unsigned>(dim));
      const auto pm = greedy_partition(sp, M);
      const auto rec = duality_check(sp, pm);
      ok = rec.identity_one_residual <= 1e-12 &&
           rec.identity_two_residual <= 1e-12 && rec.sandwich_holds;
    }
    report("randomness duality identities", ok);
  }
  {
    const auto base =
        WeightedSpectrum::from_values(std::vector<double>{0.75, 0.25});
    const auto pr = profile_from_spectrum(base);
    const auto curve = sample_zeta_curve(pr, 2000, 0.0, pr.neg_dpsi0());
    bool ok = true;
    for (double eps : {0.01, 0.05, 0.1}) {
      ok = ok && std::abs(b_kl(curve, eps) -
                          rate_success_exponent_pflec(pr, eps)) <= 1e-3;
    }
    report("B_KL matches the pflec success exponent", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 20 && ok; ++i) {
      std::vector<double> rho{0.5, 0.3, 0.2};
      std::vector<double> sigma{0.2 + unif(rng), 0.2 + unif(rng),
                                0.2 + unif(rng)};
      const double tot = sigma[0] + sigma[1] + sigma[2];
      for (auto& s : sigma) s /= tot;
      const auto prod =
          paired_iid_product(PairedSpectrum::from_bases(rho, sigma), 6);
      for (double a : {0.2, 0.5, 0.9}) {
        const auto q = paired_quantities(prod, 6, a);
        if (std::isinf(q.zeta_c) && std::isinf(q.eta)) continue;
        ok = ok && q.zeta_c <= a + q.eta + 1e-12;
      }
    }
    report("threshold trace inequality at every n", ok);
  }

  std::cout << (failures == 0 ? "selftest OK" : "selftest FAILED") << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "concentrate: exact finite-size and asymptotic rate calculations for "
      "fixed-length entanglement concentration on Schmidt spectra"};
  app.require_subcommand(1);

  std::string spectrum_path, source_path, target_path, iid_path, levels_path,
      mgf_path, map_path, out_path, sweep, n_spec, a_spec;
  std::string quantity = "zeta_c";
  std::string formula = "const";
  double x = 0.0, r = 0.0, eps = 0.0, a = 0.0, beta0 = 1.0;
  long long size = 0;
  int M = 1;
  bool bits = false, strict_domain = false, greedy = false;
  std::uint64_t seed = 42;

  auto* protocol = app.add_subcommand(
      "protocol", "Optimal PFLEC performance at a threshold or size");
  protocol->add_option("--spectrum", spectrum_path)->required();
  protocol->add_option("--x", x);
  protocol->add_option("--size", size);
  protocol->add_option("--sweep", sweep);
  protocol->add_option("-o,--output", out_path);

  auto* majorize =
      app.add_subcommand("majorize", "Majorization verdict for two spectra");
  majorize->add_option("--source", source_path)->required();
  majorize->add_option("--target", target_path)->required();

  auto* srates = app.add_subcommand(
      "spectrum-rates", "Finite-n information-spectrum quantities");
  srates->add_option("--iid", iid_path)->required();
  srates->add_option("--n", n_spec)->required();
  srates->add_option("--a", a_spec)->required();
  srates->add_option("--quantity", quantity);
  srates->add_flag("--bits", bits);
  srates->add_option("--csv,-o,--output", out_path);

  auto* rates = app.add_subcommand(
      "rates", "Asymptotic rates and exponents from the Renyi profile");
  rates->add_option("--iid", iid_path)->required();
  rates->add_option("--r", r);
  rates->add_option("--eps", eps);
  rates->add_option("--a", a);
  rates->add_option("--sweep", sweep);
  rates->add_option("--formula", formula)->required();
  rates->add_flag("--bits", bits);
  rates->add_flag("--strict-domain", strict_domain);
  rates->add_option("-o,--output,--csv", out_path);

  auto* thermal =
      app.add_subcommand("thermal", "Rates from a partition function");
  thermal->add_option("--levels", levels_path)->required();
  thermal->add_option("--beta0", beta0)->required();
  thermal->add_option("--r", r);
  thermal->add_flag("--bits", bits);
  thermal->add_option("-o,--output", out_path);

  auto* ldp = app.add_subcommand(
      "ldp", "Rate function, slope constants and tail exponents");
  ldp->add_option("--mgf", mgf_path)->required();
  ldp->add_option("--a", a)->required();
  ldp->add_option("-o,--output", out_path);

  auto* rnd = app.add_subcommand(
      "randomness", "Uniform-number extraction quality of a partition");
  rnd->add_option("--spectrum", spectrum_path)->required();
  rnd->add_option("--M", M);
  rnd->add_flag("--greedy", greedy);
  rnd->add_option("--map", map_path);
  rnd->add_option("-o,--output", out_path);

  auto* selftest =
      app.add_subcommand("selftest", "Run the cross-module invariant suite");
  selftest->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (protocol->parsed()) {
      return run_protocol(spectrum_path, x, size, sweep, out_path);
    }
    if (majorize->parsed()) return run_majorize(source_path, target_path);
    if (srates->parsed()) {
      return run_spectrum_rates(iid_path, n_spec, a_spec, quantity, bits,
                                out_path);
    }
    if (rates->parsed()) {
      return run_rates(iid_path, r, eps, a, sweep, formula, bits,
                       strict_domain, out_path);
    }
    if (thermal->parsed()) {
      return run_thermal(levels_path, beta0, r, bits, out_path);
    }
    if (ldp->parsed()) return run_ldp(mgf_path, a, out_path);
    if (rnd->parsed()) {
      return run_randomness(spectrum_path, M, greedy, map_path, out_path);
    }
    if (selftest->parsed()) return run_selftest(seed);
  } catch (const numeric_domain_error& e) {
    std::cerr << "numerical domain error: " << e.what() << "\n";
    return 3;
  } catch (const validation_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const json::parse_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
