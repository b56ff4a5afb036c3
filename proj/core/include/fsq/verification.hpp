#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fsq/core_dft.hpp"
#include "fsq/filter.hpp"
#include "fsq/permutation.hpp"

namespace fsq {

/// Monte Carlo estimate of an event probability against a claimed bound.
struct EventStats {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double rate = 0.0;
  double bound = 0.0;
  double std_err = 0.0;
  /// true: the claim is rate >= bound (isolation); false: rate <= bound.
  bool lower_bound = false;

  /// Claim holds within `sigmas` binomial standard errors.
  bool consistent(double sigmas = 3.0) const noexcept {
    return lower_bound ? rate >= bound - sigmas * std_err : rate <= bound + sigmas * std_err;
  }
};

/// h(t) lands in h(S \ {t}).
bool is_collision(Index t, std::span<const Index> query, const PermutationParams& p, std::uint64_t buckets);

/// |o(t)| >= (1 - alpha) n / (2B).
bool is_large_offset(Index t, const PermutationParams& p, std::uint64_t buckets, double alpha);

/// Mass of the residual spectrum hashed into t's bucket from outside S is at
/// least Err^2(residual, k) / (alpha B). When both sides are zero the event
/// does not hold. Test-only: requires the full residual, n <= 2^14.
bool is_large_noise(Index t, std::span<const Index> query, std::span<const cplx> residual,
                    const PermutationParams& p, std::uint64_t buckets, double alpha, std::size_t k);

enum class Event { Collision, LargeOffset, LargeNoise, WellIsolated };

std::string to_string(Event e);

/// Everything an event needs; `residual` only for LargeNoise / WellIsolated.
struct EventSetup {
  std::uint64_t n = 0;
  Index t = 0;
  std::vector<Index> query;
  std::uint64_t buckets = 0;
  double alpha = 0.0;
  std::vector<cplx> residual;
  std::size_t k = 0;
};

/// Rate of `event` over fresh (sigma, b) draws, with its claimed bound:
/// Collision <= 4|S|/B, LargeOffset <= alpha, LargeNoise <= 4 alpha,
/// WellIsolated >= 1 - (4|S|/B + alpha + 4 alpha). Requires trials >= 1000.
EventStats event_rate(Event event, const EventSetup& setup, std::size_t trials, std::mt19937_64& rng);

struct ExpectationCheck {
  double mean = 0.0;
  double target = 0.0;
  double std_err = 0.0;  // 0 for exact enumeration
  std::size_t trials = 0;
};

/// Mean of (sum_i s_i x_i)^2 over random signs s against ||x||_2^2.
/// Requires trials >= 10^4.
ExpectationCheck check_pairwise_expectation(std::span<const double> x, std::size_t trials, std::mt19937_64& rng);

/// (1/n) sum_a |sum_i x_i w^{sigma a i}|^2 against ||x||_2^2, w = exp(2 pi i / n),
/// by full enumeration of a. Requires n <= 2^12 and gcd(sigma, n) = 1.
ExpectationCheck check_complex_expectation(std::span<const cplx> x, std::uint64_t sigma);

/// (1/n) sum_{a=0}^{n-1} w^{a i}: 0 when i is not a multiple of n, 1 when it is.
cplx check_omega_sum(std::uint64_t n, std::uint64_t i);

/// Mean over every shift a of |uhat_{h(t)} - xhat'_t exp(-2 pi i sigma a t / n)|^2
/// for fixed (sigma, b), against 2 rho^2 / (alpha B) with
/// rho^2 = Err^2(xhat', k) + delta^2 n ||xhat||_1^2. Requires n <= 2^12.
struct VarianceCheck {
  double mean_sq_error = 0.0;
  double bound = 0.0;
  bool well_isolated = false;
};
VarianceCheck check_isolated_variance(const Signal& x, std::span<const cplx> xhat, const SparseSpectrum& zhat,
                                      Index t, std::span<const Index> query, const PermutationParams& sigma_b,
                                      const FilterPair& fp, std::size_t k);

}  // namespace fsq
