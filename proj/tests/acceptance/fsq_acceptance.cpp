// Acceptance suite: one PASS/FAIL line per criterion.
//
//   fsq_acceptance              run all criteria
//   fsq_acceptance -c 3 -c 7    run a subset
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "fsq/core_dft.hpp"
#include "fsq/filter.hpp"
#include "fsq/harness.hpp"
#include "fsq/hash_to_bins.hpp"
#include "fsq/permutation.hpp"
#include "fsq/verification.hpp"

namespace {

using namespace fsq;

struct Outcome {
  bool passed = false;
  std::string summary;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<cplx> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& e : v) e = {g(rng), g(rng)};
  return v;
}

// 1. fft against the direct-sum oracle, and Parseval.
Outcome oracle_agreement() {
  constexpr double kEntryTol = 1e-9;
  constexpr double kParsevalTol = 1e-12;
  std::mt19937_64 rng(101);
  double worst_entry = 0.0;
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto x = random_vector(rng, n);
      const auto a = fft(x);
      const auto b = dft_oracle(x);
      for (std::size_t i = 0; i < n; ++i) worst_entry = std::max(worst_entry, std::abs(a[i] - b[i]));
    }
  }
  double worst_parseval = 0.0;
  std::uniform_int_distribution<int> log_n(1, 10);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto x = random_vector(rng, std::size_t{1} << log_n(rng));
    const double rel = std::abs(std::sqrt(norm2_squared(fft(x)) / norm2_squared(x)) - 1.0);
    worst_parseval = std::max(worst_parseval, rel);
  }
  return {worst_entry <= kEntryTol && worst_parseval <= kParsevalTol,
          "max entry error " + fmt("%.2e", worst_entry) + " (tol 1e-9), Parseval rel " +
              fmt("%.2e", worst_parseval) + " (tol 1e-12)"};
}

// 2. DFT(P x)_{pi(i)} = xhat_i exp(-2 pi i sigma a i / n).
Outcome permutation_identity() {
  constexpr double kTol = 1e-9;
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int cases = 0;
  for (const std::uint64_t n : {64u, 256u}) {
    for (int rep = 0; rep < 50; ++rep, ++cases) {
      Signal x(random_vector(rng, n));
      const auto p = sample_params(rng, n);
      std::vector<cplx> px(n);
      for (Index i = 0; i < n; ++i) px[i] = permute_time(x, p, i);
      const auto lhs = dft_oracle(px);
      const auto xhat = dft_oracle(x.raw());
      for (Index i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(lhs[permute_freq(p, i)] - xhat[i] * permutation_phase(p, i)));
      }
    }
  }
  return {worst <= kTol, std::to_string(cases) + " cases, max deviation " + fmt("%.2e", worst) + " (tol 1e-9)"};
}

// 3. Filter properties over the grid, dense check at every frequency.
Outcome filter_properties() {
  bool ok = true;
  double worst_ratio_to_delta = 0.0;
  double max_cf = 0.0;
  int built = 0;
  std::string failures;
  for (const std::uint64_t n : {1024u, 4096u}) {
    for (const std::uint64_t B : {32u, 64u}) {
      for (const double delta : {1e-2, 1e-3}) {
        for (const double alpha : {0.25, 0.125}) {
          try {
            const auto fp = build_filter(n, B, delta, alpha);
            const auto check = check_filter(fp, 4096);
            ++built;
            max_cf = std::max(max_cf, fp.support_ratio());
            worst_ratio_to_delta = std::max(worst_ratio_to_delta, check.max_leakage / delta);
            if (!check.passed(delta)) {
              ok = false;
              failures += " n=" + std::to_string(n) + ",B=" + std::to_string(B);
            }
          } catch (const std::exception& e) {
            ok = false;
            failures += std::string(" ") + e.what();
          }
        }
      }
    }
  }
  return {ok, std::to_string(built) + "/16 built, max leakage/delta " + fmt("%.3f", worst_ratio_to_delta) +
                  ", c_f max " + fmt("%.3f", max_cf) + " (limit " + fmt("%.0f", kFilterSupportConstant) + ")" +
                  failures};
}

// 4. HashToBins against the explicit bucket sum, per bin.
Outcome hash_to_bins_contract() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  int instances = 0;
  std::map<std::tuple<std::uint64_t, std::uint64_t, double>, FilterPair> filters;
  const std::uint64_t sizes[] = {256, 1024};
  const std::uint64_t bucket_counts[] = {16, 32};
  const double deltas[] = {1e-2, 1e-3};
  for (int rep = 0; rep < 100; ++rep, ++instances) {
    const std::uint64_t n = sizes[rep % 2];
    const std::uint64_t B = bucket_counts[(rep / 2) % 2];
    const double delta = deltas[(rep / 4) % 2];
    auto key = std::make_tuple(n, B, delta);
    if (!filters.count(key)) filters.emplace(key, build_filter(n, B, delta, 0.25));
    const auto& fp = filters.at(key);

    const std::size_t k = 1 + rep % (B / 8);
    std::vector<cplx> xhat(n);
    std::unordered_set<Index> used;
    std::uniform_int_distribution<Index> any(0, n - 1);
    std::uniform_real_distribution<double> phase(0.0, 2 * std::acos(-1.0));
    while (used.size() < k) {
      const Index i = any(rng);
      if (used.insert(i).second) xhat[i] = std::polar(1.0, phase(rng));
    }
    SparseSpectrum zhat(n);
    for (int z = 0; z < 1 + rep % 3; ++z) {
      const Index i = any(rng);
      zhat.set(i, rep % 2 ? xhat[i] * 0.5 : std::polar(0.3, phase(rng)));
    }
    Signal x(inverse_dft_oracle(xhat));
    const auto p = sample_params(rng, n);
    const auto out = hash_to_bins(x, zhat, p, fp);

    std::vector<cplx> expected(B);
    for (Index i = 0; i < n; ++i) {
      const cplx v = xhat[i] - zhat.get(i);
      if (v == cplx{}) continue;
      expected[hash_bin(p, B, i)] += v * eval_ghat(fp, -offset(p, B, i)) * permutation_phase(p, i);
    }
    const double budget = delta * norm1(xhat);
    for (std::size_t j = 0; j < B; ++j) worst = std::max(worst, std::abs(out.bins.values[j] - expected[j]) / budget);
  }
  return {worst <= 1.0, std::to_string(instances) + " instances, max deviation / (delta ||xhat||_1) " +
                            fmt("%.3f", worst) + " (limit 1)"};
}

// 5. Event rates across the grid.
Outcome event_bounds() {
  VerificationConfig config;
  config.event_trials = 10000;
  config.seed = 505;
  const auto claims = event_bound_claims(config);
  std::size_t failed = 0;
  double worst_z = -1e9;
  std::string first_failure;
  for (const auto& c : claims) {
    if (!c.passed) {
      ++failed;
      if (first_failure.empty()) first_failure = "; first failure: " + c.name + " " + c.detail;
    }
    if (c.std_err > 0) {
      const bool lower = c.name.rfind("well_isolated", 0) == 0;
      worst_z = std::max(worst_z, (lower ? c.bound - c.measured : c.measured - c.bound) / c.std_err);
    }
  }
  return {failed == 0, std::to_string(claims.size() - failed) + "/" + std::to_string(claims.size()) +
                           " rates within 3 SE (10^4 draws each), worst excess " + fmt("%.2f", worst_z) + " SE" +
                           first_failure};
}

// 6. Exact identities and the pairwise sign expectation.
Outcome exact_identities() {
  std::mt19937_64 rng(606);
  double worst_complex = 0.0;
  for (const std::uint64_t n : {2u, 16u, 64u, 256u}) {
    const auto x = random_vector(rng, n);
    for (std::uint64_t sigma = 1; sigma < n; sigma += 2 * std::max<std::uint64_t>(1, n / 16)) {
      const auto c = check_complex_expectation(x, sigma);
      worst_complex = std::max(worst_complex, std::abs(c.mean - c.target) / c.target);
    }
  }
  double worst_omega = 0.0;
  for (std::uint64_t i = 1; i < 1024; ++i) worst_omega = std::max(worst_omega, std::abs(check_omega_sum(1024, i)));
  std::vector<double> reals(16);
  std::normal_distribution<double> g;
  for (auto& v : reals) v = g(rng);
  const auto pw = check_pairwise_expectation(reals, 100000, rng);
  const double z = std::abs(pw.mean - pw.target) / pw.std_err;
  const bool ok = worst_complex <= 1e-10 && worst_omega <= 1e-12 && z <= 3.0;
  return {ok, "complex rel " + fmt("%.2e", worst_complex) + " (tol 1e-10), omega " + fmt("%.2e", worst_omega) +
                  " (tol 1e-12), pairwise |mean-target| " + fmt("%.2f", z) + " SE (limit 3)"};
}

ExperimentConfig desk_profile() {
  ExperimentConfig c;
  c.n = 4096;
  c.k = 8;
  c.eps = 0.5;
  c.delta = 1e-3;
  c.constants = kPracticalConstants;
  c.trials = 100;
  c.seed = 707;
  c.signal_model = SignalModel::SparsePlusGaussian;
  c.noise_sigma = 0.01;
  c.query_model = QueryModel::Superset;
  c.record_timing = false;
  return c;
}

// 7. End-to-end error bound at the desk-scale profile.
Outcome end_to_end() {
  const auto r = run_experiment(desk_profile());
  auto smoke = desk_profile();
  smoke.constants = ScheduleConstants{};
  smoke.trials = 1;
  const auto s = run_experiment(smoke);
  const bool smoke_clamped = s.records[0].clamped;
  const bool ok = r.summary.success_rate_proof >= 0.9;
  return {ok, "proof-form success " + fmt("%.2f", r.summary.success_rate_proof) + " (need 0.90), theorem-form " +
                  fmt("%.2f", r.summary.success_rate_theorem) + ", mean samples " +
                  fmt("%.0f", r.summary.samples_mean) + "/4096; default-constant smoke trial " +
                  (s.records[0].success_proof ? "ok" : "failed") + (smoke_clamped ? " (B clamped to n)" : "")};
}

// 8. Sample-complexity scaling over the grid.
Outcome sample_scaling() {
  std::vector<double> constants;
  std::ostringstream table;
  bool sublinear = true;
  for (const std::uint64_t n : {1024u, 4096u}) {
    for (const std::size_t k : {4u, 8u, 16u}) {
      for (const double eps : {0.25, 0.5}) {
        auto c = desk_profile();
        c.n = n;
        c.k = k;
        c.eps = eps;
        c.trials = 10;
        const auto r = run_experiment(c);
        constants.push_back(r.summary.fitted_constant);
        if (n == 4096 && r.summary.samples_max >= n / 2) sublinear = false;
        table << " " << n << "/" << k << "/" << eps << ":" << fmt("%.2f", r.summary.fitted_constant) << "@"
              << fmt("%.0f", r.summary.samples_mean);
      }
    }
  }
  const double mean = std::accumulate(constants.begin(), constants.end(), 0.0) / constants.size();
  const auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
  const double spread = std::max(mean - *lo, *hi - mean) / mean;
  const bool ok = spread <= 0.5 && sublinear;
  return {ok, "fitted c spread +-" + fmt("%.0f", 100 * spread) + "% (limit 50%), samples < n/2 at n=4096: " +
                  (sublinear ? "yes" : "no") + "; n/k/eps:c@samples" + table.str()};
}

// 9. Noise-free recovery on the exact support.
Outcome exact_sparse() {
  auto c = desk_profile();
  c.signal_model = SignalModel::PlantedSparse;
  c.query_model = QueryModel::ExactSupport;
  c.seed = 909;
  const auto r = run_experiment(c);
  std::size_t good = 0;
  double worst = 0.0;
  for (const auto& rec : r.records) {
    good += rec.max_relative_error <= 1e-3 ? 1 : 0;
    worst = std::max(worst, rec.max_relative_error);
  }
  return {good >= 95, std::to_string(good) + "/100 trials within 1e-3 relative (need 95), worst " + fmt("%.2e", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<int> selected;
  app.add_option("-c,--criterion", selected, "Criterion number(s) to run (default: all)")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "oracle agreement", 10, oracle_agreement},
      {2, "spectrum permutation identity", 10, permutation_identity},
      {3, "filter properties", 60, filter_properties},
      {4, "hash-to-bins contract", 60, hash_to_bins_contract},
      {5, "event bounds", 120, event_bounds},
      {6, "exact identities", 30, exact_identities},
      {7, "end-to-end error bound", 120, end_to_end},
      {8, "sample-complexity scaling", 300, sample_scaling},
      {9, "exact-sparse recovery", 60, exact_sparse},
  };

  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.limit_seconds;
    const bool passed = out.passed && in_time;
    all = all && passed;
    std::printf("[%s] criterion %d %s: %s; %.1fs (limit %.0fs)%s\n", passed ? "PASS" : "FAIL", c.id, c.name,
                out.summary.c_str(), seconds, c.limit_seconds, in_time ? "" : " over time limit");
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
