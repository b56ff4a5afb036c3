#include "fsq/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsq/hash_to_bins.hpp"

namespace fsq {

namespace {

constexpr std::uint64_t kNoiseEnumerationLimit = std::uint64_t{1} << 14;

double binomial_std_err(double rate, std::size_t trials) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

bool in_query(std::span<const Index> query, Index i) {
  return std::find(query.begin(), query.end(), i) != query.end();
}

// Mass of `residual` hashed into t's bucket from outside the query set,
// skipping zero coordinates (they contribute nothing).
double bucket_mass(Index t, std::span<const Index> sorted_query, std::span<const Index> nonzero,
                   std::span<const cplx> residual, const PermutationParams& p, std::uint64_t buckets) {
  const std::uint64_t target = hash_bin(p, buckets, t);
  double mass = 0.0;
  for (const Index i : nonzero) {
    if (hash_bin(p, buckets, i) != target) continue;
    if (std::binary_search(sorted_query.begin(), sorted_query.end(), i)) continue;
    mass += std::norm(residual[i]);
  }
  return mass;
}

std::vector<Index> nonzero_indices(std::span<const cplx> v) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != cplx{}) out.push_back(i);
  }
  return out;
}

bool noise_event(double mass, double err_sq, double alpha, std::uint64_t buckets) {
  const double threshold = err_sq / (alpha * static_cast<double>(buckets));
  return mass > 0.0 && mass >= threshold;
}

}  // namespace

bool is_collision(Index t, std::span<const Index> query, const PermutationParams& p, std::uint64_t buckets) {
  const std::uint64_t target = hash_bin(p, buckets, t);
  for (const Index s : query) {
    if (s != t && hash_bin(p, buckets, s) == target) return true;
  }
  return false;
}

bool is_large_offset(Index t, const PermutationParams& p, std::uint64_t buckets, double alpha) {
  const double limit = (1.0 - alpha) * static_cast<double>(p.n) / (2.0 * static_cast<double>(buckets));
  return std::abs(static_cast<double>(offset(p, buckets, t))) >= limit;
}

bool is_large_noise(Index t, std::span<const Index> query, std::span<const cplx> residual,
                    const PermutationParams& p, std::uint64_t buckets, double alpha, std::size_t k) {
  if (residual.size() != p.n) throw InvalidArgument("is_large_noise: residual length must equal n");
  if (p.n > kNoiseEnumerationLimit) throw InvalidArgument("is_large_noise: n exceeds the enumeration guard 2^14");
  std::vector<Index> sorted(query.begin(), query.end());
  std::sort(sorted.begin(), sorted.end());
  const auto nonzero = nonzero_indices(residual);
  const double err = err_k(residual, k);
  return noise_event(bucket_mass(t, sorted, nonzero, residual, p, buckets), err * err, alpha, buckets);
}

std::string to_string(Event e) {
  switch (e) {
    case Event::Collision: return "collision";
    case Event::LargeOffset: return "large_offset";
    case Event::LargeNoise: return "large_noise";
    case Event::WellIsolated: return "well_isolated";
  }
  return "unknown";
}

EventStats event_rate(Event event, const EventSetup& setup, std::size_t trials, std::mt19937_64& rng) {
  if (trials < 1000) throw InvalidArgument("event_rate: at least 1000 trials required");
  if (setup.buckets == 0 || setup.n % setup.buckets != 0) throw InvalidArgument("event_rate: B must divide n");
  if (!in_query(setup.query, setup.t)) throw InvalidArgument("event_rate: t must belong to the query set");

  const bool needs_noise = event == Event::LargeNoise || event == Event::WellIsolated;
  std::vector<Index> sorted(setup.query.begin(), setup.query.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Index> nonzero;
  double err_sq = 0.0;
  if (needs_noise) {
    if (setup.residual.size() != setup.n) throw InvalidArgument("event_rate: residual length must equal n");
    if (setup.n > kNoiseEnumerationLimit) throw InvalidArgument("event_rate: n exceeds the enumeration guard 2^14");
    nonzero = nonzero_indices(setup.residual);
    const double err = err_k(setup.residual, setup.k);
    err_sq = err * err;
  }

  const double s = static_cast<double>(setup.query.size());
  const double b = static_cast<double>(setup.buckets);
  EventStats stats;
  stats.trials = trials;
  switch (event) {
    case Event::Collision: stats.bound = 4.0 * s / b; break;
    case Event::LargeOffset: stats.bound = setup.alpha; break;
    case Event::LargeNoise: stats.bound = 4.0 * setup.alpha; break;
    case Event::WellIsolated:
      stats.bound = std::max(0.0, 1.0 - (4.0 * s / b + 5.0 * setup.alpha));
      stats.lower_bound = true;
      break;
  }

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto p = sample_params(rng, setup.n);
    bool hit = false;
    switch (event) {
      case Event::Collision: hit = is_collision(setup.t, setup.query, p, setup.buckets); break;
      case Event::LargeOffset: hit = is_large_offset(setup.t, p, setup.buckets, setup.alpha); break;
      case Event::LargeNoise:
        hit = noise_event(bucket_mass(setup.t, sorted, nonzero, setup.residual, p, setup.buckets), err_sq,
                          setup.alpha, setup.buckets);
        break;
      case Event::WellIsolated:
        hit = !is_collision(setup.t, setup.query, p, setup.buckets) &&
              !is_large_offset(setup.t, p, setup.buckets, setup.alpha) &&
              !noise_event(bucket_mass(setup.t, sorted, nonzero, setup.residual, p, setup.buckets), err_sq,
                           setup.alpha, setup.buckets);
        break;
    }
    if (hit) ++stats.hits;
  }
  stats.rate = static_cast<double>(stats.hits) / static_cast<double>(trials);
  stats.std_err = binomial_std_err(stats.rate, trials);
  return stats;
}

ExpectationCheck check_pairwise_expectation(std::span<const double> x, std::size_t trials, std::mt19937_64& rng) {
  if (trials < 10000) throw InvalidArgument("check_pairwise_expectation: at least 10^4 trials required");
  ExpectationCheck out;
  out.trials = trials;
  out.target = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);

  std::bernoulli_distribution coin(0.5);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    double acc = 0.0;
    for (const double v : x) acc += coin(rng) ? v : -v;
    const double sample = acc * acc;
    sum += sample;
    sum_sq += sample * sample;
  }
  const double dt = static_cast<double>(trials);
  out.mean = sum / dt;
  const double variance = std::max(0.0, sum_sq / dt - out.mean * out.mean);
  out.std_err = std::sqrt(variance / dt);
  return out;
}

ExpectationCheck check_complex_expectation(std::span<const cplx> x, std::uint64_t sigma) {
  const std::uint64_t n = x.size();
  if (n == 0 || n > 4096) throw InvalidArgument("check_complex_expectation: need 1 <= n <= 2^12");
  if (std::gcd(sigma, n) != 1) throw InvalidArgument("check_complex_expectation: sigma must be invertible mod n");

  std::vector<cplx> roots(n);
  for (std::uint64_t m = 0; m < n; ++m) roots[m] = std::conj(unit_root(m, n));  // w^m

  ExpectationCheck out;
  out.trials = n;
  out.target = norm2_squared(x);
  double total = 0.0;
  for (std::uint64_t a = 0; a < n; ++a) {
    const std::uint64_t step = (sigma % n) * a % n;
    cplx acc{};
    std::uint64_t m = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      acc += x[i] * roots[m];
      m = (m + step) % n;
    }
    total += std::norm(acc);
  }
  out.mean = total / static_cast<double>(n);
  return out;
}

cplx check_omega_sum(std::uint64_t n, std::uint64_t i) {
  if (n == 0) throw InvalidArgument("check_omega_sum: n must be positive");
  cplx acc{};
  const std::uint64_t step = i % n;
  std::uint64_t m = 0;
  for (std::uint64_t a = 0; a < n; ++a) {
    acc += std::conj(unit_root(m, n));
    m = (m + step) % n;
  }
  return acc / static_cast<double>(n);
}

VarianceCheck check_isolated_variance(const Signal& x, std::span<const cplx> xhat, const SparseSpectrum& zhat,
                                      Index t, std::span<const Index> query, const PermutationParams& sigma_b,
                                      const FilterPair& fp, std::size_t k) {
  const std::uint64_t n = x.size();
  if (n > 4096) throw InvalidArgument("check_isolated_variance: n must be <= 2^12");
  if (xhat.size() != n) throw InvalidArgument("check_isolated_variance: spectrum length must equal n");

  std::vector<cplx> residual(xhat.begin(), xhat.end());
  for (const auto& [i, v] : zhat) residual[i] -= v;

  VarianceCheck out;
  out.well_isolated = !is_collision(t, query, sigma_b, fp.buckets) &&
                      !is_large_offset(t, sigma_b, fp.buckets, fp.alpha) &&
                      !is_large_noise(t, query, residual, sigma_b, fp.buckets, fp.alpha, k);

  const double err = err_k(residual, k);
  const double l1 = norm1(xhat);
  const double rho_sq = err * err + fp.delta * fp.delta * static_cast<double>(n) * l1 * l1;
  out.bound = 2.0 * rho_sq / (fp.alpha * static_cast<double>(fp.buckets));

  double total = 0.0;
  for (std::uint64_t a = 0; a < n; ++a) {
    PermutationParams p = sigma_b;
    p.a = a;
    const auto bins = hash_to_bins(x, zhat, p, fp);
    const cplx expected = residual[t] * permutation_phase(p, t);
    total += std::norm(bins.bins.values[hash_bin(p, fp.buckets, t)] - expected);
  }
  out.mean_sq_error = total / static_cast<double>(n);
  return out;
}

}  // namespace fsq
